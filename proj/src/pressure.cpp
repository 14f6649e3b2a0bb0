#include "actflow/pressure.hpp"

#include <cmath>
#include <sstream>

#include "actflow/kernels.hpp"
#include "actflow/linsolve.hpp"

namespace actflow {

Field2D solve_pressure(const PressureProblem& prob, const Grid& g, PressureStats* stats, const Field2D* guess) {
  if (!(prob.epsilon > 0.0)) throw std::invalid_argument("pressure relaxation epsilon must be positive");
  if (!prob.rhs.same_shape(make_cell_field(g))) throw std::invalid_argument("pressure rhs does not match grid");
  const double m = mean(prob.rhs);
  if (std::abs(m) > kCompatibilityTol) {
    std::ostringstream os;
    os << "pressure rhs has mean " << m << "; a Neumann problem needs zero mean";
    throw IncompatibleRHS(os.str());
  }

  Field2D p = make_cell_field(g);
  if (guess != nullptr && guess->same_shape(p)) p = *guess;

  // Solve -eps Lap p = -rhs so that the operator is positive semidefinite.
  Field2D tmp = make_cell_field(g);
  const double eps = prob.epsilon;
  LinearOp A = [&](const Vector& x, Vector& y) {
    tmp.a = x;
    Field2D out;
    par::laplacian(g, tmp, out);
    y.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = -eps * out.a[i];
  };
  Vector b(prob.rhs.a.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = -(prob.rhs.a[i] - m);

  KrylovOptions opt;
  opt.rel_tol = prob.solver_tol;
  opt.max_iter = prob.max_iter > 0 ? prob.max_iter : 10 * (g.nx + g.ny);
  opt.project_mean = true;
  opt.diagonal.resize(b.size());
  const double ax = 1.0 / (g.hx() * g.hx());
  const double ay = 1.0 / (g.hy() * g.hy());
  for (int j = 0; j < g.ny; ++j) {
    const int ny_links = g.y_walls() ? (j > 0) + (j + 1 < g.ny) : 2;
    for (int i = 0; i < g.nx; ++i) opt.diagonal[static_cast<std::size_t>(j) * g.nx + i] = eps * (2.0 * ax + ny_links * ay);
  }

  const KrylovResult r = conjugate_gradient(A, b, p.a, opt);
  remove_mean(p);
  if (stats != nullptr) *stats = {r.iterations, r.residual, r.rhs_norm};
  if (!r.converged) {
    std::ostringstream os;
    os << "pressure solve did not converge in " << r.iterations << " iterations (residual " << r.residual
       << ", target " << prob.solver_tol * r.rhs_norm << ")";
    throw NoConvergence(os.str(), r.iterations, r.residual);
  }
  return p;
}

}  // namespace actflow
