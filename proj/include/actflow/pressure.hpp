#ifndef ACTFLOW_PRESSURE_HPP_
#define ACTFLOW_PRESSURE_HPP_

#include <stdexcept>

#include "actflow/grid.hpp"

namespace actflow {

/// epsilon * Lap_h p = rhs with zero Neumann flux on walls and zero mean.
struct PressureProblem {
  double epsilon = 1e-4;
  Field2D rhs;
  double solver_tol = 1e-10;
  int max_iter = 0;  // 0: 10 * (nx + ny)
};

struct PressureStats {
  int iterations = 0;
  double residual = 0.0;  // ||eps Lap_h p - rhs||_2 (unweighted)
  double rhs_norm = 0.0;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations(iterations), residual(residual) {}
  int iterations;
  double residual;
};

class IncompatibleRHS : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kCompatibilityTol = 1e-8;

/// `guess` seeds the iteration when non-null and shaped like the grid.
Field2D solve_pressure(const PressureProblem& prob, const Grid& g, PressureStats* stats = nullptr,
                       const Field2D* guess = nullptr);

/// Default relaxation 1e-4 * min(hx, hy)^2.
inline double default_epsilon(const Grid& g) {
  const double h = std::min(g.hx(), g.hy());
  return 1e-4 * h * h;
}

}  // namespace actflow

#endif  // ACTFLOW_PRESSURE_HPP_
