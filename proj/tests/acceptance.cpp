// Acceptance run: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "actflow/bench.hpp"
#include "actflow/graphs.hpp"

using namespace actflow;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::map<std::string, ScenarioReport> reports;

const ScenarioReport& scenario(const std::string& name) {
  auto it = reports.find(name);
  if (it == reports.end()) it = reports.emplace(name, run_scenario(name)).first;
  return it->second;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

const CoefficientSet kSet = make_preset("activated");

PropertyOptions property_options() {
  PropertyOptions po;
  po.pairs = 100000;
  po.seed = 1;
  return po;
}

Outcome graph_property(bool coercivity) {
  const PropertyOptions po = property_options();
  bool ok = true;
  double worst = INFINITY;
  std::string bad;
  for (double k : {0.0, 1.0, 8.0, 64.0}) {
    const PropertyResult rs[2] = {
        coercivity ? check_bulk_coercivity<2>(kSet, k, po) : check_bulk_monotonicity<2>(kSet, k, po),
        coercivity ? check_wall_coercivity<2>(kSet, k, po) : check_wall_monotonicity<2>(kSet, k, po)};
    for (const PropertyResult& r : rs) {
      worst = std::min(worst, r.worst);
      if (!r.passed) {
        ok = false;
        bad = r.name + " k=" + num(k) + ": " + r.counterexample;
      }
    }
  }
  if (!coercivity) worst -= po.monotonicity_tol;
  std::string d = (coercivity ? "min S.D - bound " : "min (S-S').(D-D') ") + num(worst) +
                  " over 1e5 pairs, k in {exact,1,8,64}, bulk and wall";
  if (!ok) d += "; " + bad;
  return {ok, d};
}

Outcome projection_bound() {
  DistanceStudyOptions o;
  o.k_list = {8, 16, 32, 64};
  const std::vector<DistanceRow> rows = graph_distance_study(kSet, o);
  bool ok = true;
  std::string d = "max displacement";
  for (const DistanceRow& r : rows) {
    ok = ok && r.max_displacement <= r.bound_2c0_over_k && r.max_bound_ratio <= 1.0 && r.projected > 0;
    d += " " + num(r.max_displacement);
  }
  d += "; halving ratios";
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const double ratio = rows[n - 1].max_displacement / rows[n].max_displacement;
    ok = ok && ratio >= 1.6 && ratio <= 2.4;
    d += " " + num(ratio);
  }
  return {ok, d};
}

Outcome poiseuille() {
  const ScenarioReport& r = scenario("poiseuille_bingham");
  return {r.passed, "rel L2 " + num(r.metric("rel_l2_n32")) + " / " + num(r.metric("rel_l2_n64")) + " / " +
                        num(r.metric("rel_l2_n128")) + " at n = 32/64/128, k = 64"};
}

Outcome stickslip() {
  const ScenarioReport& r = scenario("stickslip_channel");
  return {r.passed, "stick slip " + num(r.metric("slip_ratio_0.5")) + ", " + num(r.metric("slip_ratio_0.8")) +
                        "; slip rel err " + num(r.metric("err_ratio_1.25")) + ", " + num(r.metric("err_ratio_1.5")) +
                        ", " + num(r.metric("err_ratio_2"))};
}

Outcome energy() {
  const ScenarioReport& r = scenario("energy_decay");
  return {r.passed, "accumulated residual ratio " + num(r.metric("ratio")) + ", max per-step C " +
                        num(r.metric("max_C"))};
}

Outcome minimum_principle() {
  bool ok = true;
  double margin = INFINITY;
  std::string d;
  for (const std::string& name : scenario_names()) {
    const ScenarioReport& r = scenario(name);
    bool has = false;
    for (const auto& m : r.metrics) has = has || m.first == "minimum_principle";
    if (!has) {
      d += name + " n/a; ";
      continue;
    }
    ok = ok && r.metric("minimum_principle") == 1.0;
    margin = std::min(margin, r.metric("min_e_margin"));
  }
  return {ok, d + "smallest margin above the floor " + num(margin)};
}

Outcome k_uniformity() {
  const ScenarioReport& r = scenario("k_sweep");
  std::string d = "spreads";
  for (const auto& m : r.metrics) {
    if (m.first.rfind("spread_", 0) == 0) d += " " + num(m.second);
  }
  d += "; creep ratio worst rel dev " + num(r.metric("creep_ratio_worst_rel_dev"));
  return {r.passed, d};
}

Outcome regimes() {
  const ScenarioReport& ramp = scenario("regime_ramp");
  const ScenarioReport& loop = scenario("hysteresis_loop");
  return {ramp.passed && loop.passed, num(ramp.metric("cells_with_sequence")) +
                                          " cells follow the sequence; loop separation " +
                                          num(loop.metric("separation"))};
}

Outcome quasicompressibility() {
  const ScenarioReport& r = scenario("eps_sweep");
  std::string d = "div residual";
  for (const auto& m : r.metrics) {
    if (m.first.rfind("div_", 0) == 0) d += " " + num(m.second);
  }
  return {r.passed, d};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Criterion all[] = {
      {1, "graph monotonicity", 5, [] { return graph_property(false); }},
      {2, "graph coercivity", 5, [] { return graph_property(true); }},
      {3, "projection bound", 10, projection_bound},
      {4, "Bingham-Poiseuille with slip", 300, poiseuille},
      {5, "stick-slip threshold", 300, stickslip},
      {6, "energy budget", 300, energy},
      {8, "k-uniformity", 900, k_uniformity},
      {9, "regime transitions", 120, regimes},
      {10, "quasicompressibility", 600, quasicompressibility},
      // last: reuses every scenario run above
      {7, "minimum principle", 1e300, minimum_principle},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool ok = o.passed && in_time;
    failed += !ok;
    std::printf("criterion %2d %s  %-30s %s  [%.1f s%s]\n", c.id, ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
