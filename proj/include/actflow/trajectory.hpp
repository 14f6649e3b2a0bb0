#ifndef ACTFLOW_TRAJECTORY_HPP_
#define ACTFLOW_TRAJECTORY_HPP_

#include <string>
#include <vector>

#include "actflow/grid.hpp"

namespace actflow {

/// One diagnostic row per time step. Energies are area integrals; the
/// dissipation and work entries are rates (multiply by dt for the step).
struct BudgetRecord {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double kinetic_energy = 0.0;
  double internal_energy = 0.0;
  double total_energy = 0.0;
  double wall_dissipation = 0.0;
  double bulk_dissipation = 0.0;
  double eps_work = 0.0;      // eps * ||grad p||^2
  double forcing_work = 0.0;  // <b, v>
  double div_residual = 0.0;  // ||div v - eps Lap p||_2
  double div_norm = 0.0;      // ||div v||_2
  int picard_iters = 0;
  int cg_iters = 0;
  int pressure_iters = 0;
  double min_e = 0.0;
  double max_v = 0.0;
  double budget_residual = 0.0;  // dE_total + dt (wall + eps_work - forcing)
  double min_cell_dissipation = 0.0;
  double min_wall_dissipation = 0.0;
  // monitored norms
  double v_l2 = 0.0;
  double v_h1 = 0.0;       // ||v||_{1,2}
  double S_l2 = 0.0;
  double wall_traction_sq = 0.0;  // sum over wall faces of |s|^2 h
  double e_l1 = 0.0;
  double e_w1_54 = 0.0;    // ||e||_{1,5/4}
  double p_l53 = 0.0;      // ||p||_{5/3}
};

/// Snapshots and budget rows of one run.
struct Trajectory {
  Grid grid;
  std::vector<FlowState> snapshots;
  std::vector<int> snapshot_steps;
  std::vector<BudgetRecord> budgets;
  double initial_min_e = 0.0;
  double c3 = 0.0;
  double epsilon = 0.0;
  bool steady = false;
  std::string status = "ok";

  const FlowState& final_state() const { return snapshots.back(); }
};

}  // namespace actflow

#endif  // ACTFLOW_TRAJECTORY_HPP_
