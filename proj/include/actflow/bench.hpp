#ifndef ACTFLOW_BENCH_HPP_
#define ACTFLOW_BENCH_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "actflow/coefficients.hpp"
#include "actflow/config.hpp"
#include "actflow/diagnostics.hpp"
#include "actflow/grid.hpp"
#include "actflow/trajectory.hpp"

namespace actflow {

// ---- oracles --------------------------------------------------------------

/// Steady channel flow y in [0, H] driven by a body force f with a
/// Navier-slip wall s = gamma u. `tau` is the yield stress of the scalar
/// shear law T = nu u' + tau sgn(u'); for the tensor law with the Frobenius
/// norm this is tau2 / sqrt(2).
struct PoiseuilleOracle {
  double f = 1.0;
  double H = 1.0;
  double nu = 1.0;
  double tau = 0.0;
  double gamma = 1.0;

  /// f H / 2 <= tau: no interior yielding, the channel slides as one plug.
  bool unyielded() const { return f * H / 2.0 <= tau; }
  double slip() const { return f * H / (2.0 * gamma); }
  /// Half width of the plug around mid-channel.
  double plug_half_width() const;
  double shear_stress(double y) const { return f * (H / 2.0 - y); }
  double shear_rate(double y) const;
  double operator()(double y) const;
};

PoiseuilleOracle poiseuille_bingham_slip_oracle(double f, double H, double nu, double tau, double gamma);

/// Largest membership defect of the oracle's (S, D) pairs in the bulk graph
/// at `samples` points across the channel (tensor law with tau2 = sqrt(2) tau).
double poiseuille_membership_defect(const PoiseuilleOracle& o, int samples = 257);

struct StickSlipOracle {
  bool slipping = false;
  double slip = 0.0;  // signed wall velocity
};

/// Wall velocity under a given wall shear for s = gamma v + sigma2 v/|v|.
StickSlipOracle stickslip_couette_oracle(double shear, double gamma, double sigma2);

// ---- regimes ----------------------------------------------------------------

enum class Regime { kBingham, kNewtonian, kEulerInactive, kViscousActive };

std::string to_string(Regime r);

/// Activations at or below `tol` count as zero.
Regime classify_regime(const CoefficientValues& c, double rate_norm, double tol = 0.0);

std::vector<Regime> regime_flags(const FlowState& s, const CoefficientSet& cs, const Grid& g, double tol = 0.0);

/// True if `seq` walks through `pattern` in order. Repeats and regimes not in
/// `pattern` may sit in between; stepping back to an earlier entry restarts.
bool follows_sequence(const std::vector<Regime>& seq, const std::vector<Regime>& pattern);

// ---- hysteresis -------------------------------------------------------------

struct HysteresisPoint {
  double D = 0.0;  // |D|
  double e = 0.0;
  double S = 0.0;  // |S| of the exact graph
};

struct HysteresisTrace {
  std::vector<HysteresisPoint> points;
  double area = 0.0;        // enclosed area of the closed path in the (|D|, |S|) plane
  double separation = 0.0;  // max |S_up - S_down| at matching |D|
  std::string csv() const;
};

/// Evaluates the exact bulk graph along the path (simple shear direction).
/// Closes the polygon back to the first point for the area.
HysteresisTrace hysteresis_sweep(const CoefficientSet& cs, const std::vector<double>& D_path,
                                 const std::vector<double>& e_path);

/// Up branch at e_lo for |D| in [0, d_max], heat to e_hi at d_max, down
/// branch at e_hi, cool back at |D| = 0.
void loop_path(double e_lo, double e_hi, double d_max, int n, std::vector<double>& D_path,
               std::vector<double>& e_path);

// ---- scenarios --------------------------------------------------------------

struct BenchOptions {
  std::string out_root;  // empty: nothing written
  std::uint64_t seed = 1;
  std::vector<int> k_list;  // empty: scenario default
};

struct ScenarioReport {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::string table;  // human-readable summary

  double metric(const std::string& key) const;
};

std::vector<std::string> scenario_names();
/// Throws std::invalid_argument for unknown names.
ScenarioReport run_scenario(const std::string& name, const BenchOptions& opt = {});

// Building blocks shared with the acceptance tests.

struct PoiseuilleSetup {
  double f = 1.0;
  double nu = 1.0;
  double tau2 = 0.1;
  double gamma = 1.0;
};

SimConfig poiseuille_config(int n, int k, const PoiseuilleSetup& p = {});

struct ProfileComparison {
  std::vector<double> y, u_numeric, u_oracle;
  double rel_l2 = 0.0;
  std::string csv() const;
};

/// Row means of u against the oracle at the u-face heights.
ProfileComparison compare_profile(const FlowState& s, const Grid& g, const PoiseuilleOracle& o);
PoiseuilleOracle oracle_for(const SimConfig& cfg);
/// Rows whose face height lies inside the oracle plug (margin in cells).
std::vector<char> plug_rows(const Grid& g, const PoiseuilleOracle& o, int margin = 1);

struct StickSlipCase {
  double shear_ratio = 0.0;  // wall shear / sigma2
  double wall_shear = 0.0;   // measured steady mean traction
  double slip = 0.0;         // measured mean wall velocity
  double oracle_slip = 0.0;
  bool steady = false;
  double min_e_margin = 0.0;  // min e - e floor over the run
  bool minimum_principle = true;
};

SimConfig stickslip_config(double shear_ratio, int ny = 32);
StickSlipCase run_stickslip_case(double shear_ratio, const std::string& out_dir = "");

SimConfig energy_decay_config(double dt);
SimConfig regime_ramp_config();
SimConfig eps_sweep_config(double eps_factor);

}  // namespace actflow

#endif  // ACTFLOW_BENCH_HPP_
