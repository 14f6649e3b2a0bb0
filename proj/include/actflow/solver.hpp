#ifndef ACTFLOW_SOLVER_HPP_
#define ACTFLOW_SOLVER_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "actflow/coefficients.hpp"
#include "actflow/config.hpp"
#include "actflow/grid.hpp"
#include "actflow/kernels.hpp"
#include "actflow/trajectory.hpp"

namespace actflow {

/// Smoothstep cutoff: 1 on [0, k], 0 on [2k, inf), cubic in between.
double phi_k(double x, double k);

class PicardNoConvergence : public std::runtime_error {
 public:
  PicardNoConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

class LinearSolveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State carried between steps: the hidden wall slip velocities.
struct SolverWorkspace {
  std::vector<double> slip_lo;
  std::vector<double> slip_hi;
  bool initialized = false;
};

/// Everything the momentum step produces besides the new state.
struct MomentumInfo {
  int picard_iters = 0;
  int cg_iters = 0;
  int pressure_iters = 0;
  double picard_residual = 0.0;
  Field2D u_star;
  Field2D v_star;
  Field2D dissipation;          // per unit area, cell centered, >= 0
  ViscousCoeffs coeffs;         // frozen lambda of the last Picard iterate
  TensorField rate;             // cell rate tensor of v*
  std::vector<double> slip_lo;  // wall slip velocity, bottom
  std::vector<double> slip_hi;
  std::vector<double> traction_lo;  // wall traction lambda_w * slip
  std::vector<double> traction_hi;
  double bulk_dissipation = 0.0;  // integral of the cell source
  double wall_dissipation = 0.0;  // sum of s . v_tau h
  double eps_work = 0.0;
  double forcing_work = 0.0;
  double div_residual = 0.0;
  double epsilon = 0.0;
};

/// One step of the regularized momentum system; e is left unchanged.
FlowState momentum_step(const FlowState& s, const SolverParams& params, const CoefficientSet& cs, const Grid& g,
                        MomentumInfo* info = nullptr, SolverWorkspace* ws = nullptr);

/// Backward-Euler internal-energy step with the given cell source.
FlowState energy_step(const FlowState& s, const Field2D& dissipation, const SolverParams& params,
                      const CoefficientSet& cs, const Grid& g, int* iterations = nullptr);

/// Initial state of a configuration (velocity preset, e0, optional bump).
FlowState initial_state(const SimConfig& cfg);

/// Advances from the initial data to t_final (or steady state). Writes
/// snapshots and budgets into the output directory when one is configured.
Trajectory run(const SimConfig& cfg);

}  // namespace actflow

#endif  // ACTFLOW_SOLVER_HPP_
