#ifndef ACTFLOW_DIAGNOSTICS_HPP_
#define ACTFLOW_DIAGNOSTICS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "actflow/config.hpp"
#include "actflow/solver.hpp"
#include "actflow/trajectory.hpp"

namespace actflow {

// Discrete norms. Gradients of face fields use the staggered differences
// (cells for the normal derivatives, corners for the cross derivatives).

double kinetic_energy(const FlowState& s, const Grid& g);
double internal_energy(const FlowState& s, const Grid& g);
/// (sum A |f|^r)^(1/r) over cells.
double lr_norm(const Field2D& f, const Grid& g, double r);
/// ||f||_r + ||grad f||_r for a cell field, zero-flux walls.
double w1r_norm(const Field2D& f, const Grid& g, double r);
/// sqrt(||v||^2 + ||grad v||^2); wall corners use the given slip velocities.
double velocity_h1(const Field2D& u, const Field2D& v, const Grid& g, const std::vector<double>& slip_lo,
                   const std::vector<double>& slip_hi);

/// Budget row of one step from the states before and after it.
BudgetRecord make_budget_record(int step, const FlowState& before, const FlowState& after, const MomentumInfo& info,
                                const SolverParams& params, const Grid& g);

/// Throws std::logic_error when a row breaks its own invariants
/// (negative dissipation, non-finite entries).
void check_record(const BudgetRecord& r);

std::string budgets_csv_header();
void write_budgets_csv(std::ostream& os, const std::vector<BudgetRecord>& rows);
std::vector<BudgetRecord> read_budgets_csv(std::istream& is);

/// config.json, meta.json, budgets.csv and snapshot_<step>.bin under cfg.output.directory.
void write_run_outputs(const SimConfig& cfg, const Trajectory& traj);
/// Reads what write_run_outputs wrote (snapshots included when present).
Trajectory load_trajectory(const std::string& directory);

struct AuditTolerances {
  double budget_c = 10.0;       // per step |residual| <= budget_c * dt^2 + budget_abs
  double budget_abs = 1e-10;
  double min_e = 1e-10;
  double dissipation = 1e-14;   // allowed negative round-off
  double div_residual = 1e-6;
  double monitor_bound = 1e12;
};

struct AuditCheck {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  int worst_step = 0;
  double limit = 0.0;
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  bool passed() const;
  const AuditCheck* find(const std::string& name) const;
  std::string text() const;
  std::string csv() const;
};

/// Nonnegative dissipation, budget closure, minimum principle, divergence
/// residual, bounded monitors; impermeability and zero-mean pressure on the
/// stored snapshots.
AuditReport audit_trajectory(const Trajectory& traj, const AuditTolerances& tol = {});

/// Sum over steps of |budget_residual|.
double accumulated_budget_residual(const Trajectory& traj);

// k-sweep of the monitored norms on otherwise identical configurations.

struct KSweepRow {
  int k = 0;
  double sup_v_l2_sq = 0.0;    // sup_t ||v||^2
  double int_v_h1_sq = 0.0;    // sum dt ||v||_{1,2}^2
  double int_S_l2_sq = 0.0;    // sum dt ||S||^2
  double int_wall_sq = 0.0;    // sum dt sum_wall |s|^2 h
  double sup_e_l1 = 0.0;
  double int_e_w1_54 = 0.0;    // sum dt ||e||_{1,5/4}
  double int_p_l53 = 0.0;      // sum dt ||p||_{5/3}
  double plug_creep = 0.0;     // velocity variation across the plug cells
};

struct KSweepTable {
  std::vector<KSweepRow> rows;
  double band = 0.10;
  std::vector<std::string> monitor_names;
  std::vector<double> spread;  // (max - min) / min per monitor
  std::vector<std::string> violations;

  bool uniform() const { return violations.empty(); }
  std::string csv() const;
};

/// Runs `base` once per k (k, k_wall and k_convection all set). Cells with
/// plug_mask[j] (by row) count towards plug_creep; empty mask skips it.
KSweepTable k_sweep_monitor(const SimConfig& base, const std::vector<int>& ks,
                            const std::vector<char>& plug_rows = {}, double band = 0.10);

/// Table from rows already computed (shared by k_sweep_monitor).
KSweepTable make_k_sweep_table(std::vector<KSweepRow> rows, double band);
KSweepRow k_sweep_row(int k, const Trajectory& traj, const std::vector<char>& plug_rows);

}  // namespace actflow

#endif  // ACTFLOW_DIAGNOSTICS_HPP_
