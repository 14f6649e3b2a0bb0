#ifndef ACTFLOW_LINSOLVE_HPP_
#define ACTFLOW_LINSOLVE_HPP_

#include <functional>
#include <vector>

namespace actflow {

using Vector = std::vector<double>;
using LinearOp = std::function<void(const Vector& x, Vector& y)>;

struct KrylovOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_iter = 1000;
  /// Jacobi preconditioner (diagonal of the operator); empty means none.
  Vector diagonal;
  /// General preconditioner z = M^-1 r; takes precedence over `diagonal`.
  LinearOp preconditioner;
  /// Remove the mean of iterates and residuals (operators with constants in the kernel).
  bool project_mean = false;
  /// Entries fixed at their initial value (e.g. wall-normal velocities).
  std::vector<char> frozen;
};

struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // final ||b - A x||
  double rhs_norm = 0.0;
};

/// Preconditioned conjugate gradients for symmetric positive (semi)definite A.
/// x holds the initial guess on entry.
KrylovResult conjugate_gradient(const LinearOp& A, const Vector& b, Vector& x, const KrylovOptions& opt);

/// Jacobi-preconditioned BiCGSTAB for general A.
KrylovResult bicgstab(const LinearOp& A, const Vector& b, Vector& x, const KrylovOptions& opt);

}  // namespace actflow

#endif  // ACTFLOW_LINSOLVE_HPP_
