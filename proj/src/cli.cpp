#include "actflow/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "actflow/bench.hpp"
#include "actflow/config.hpp"
#include "actflow/diagnostics.hpp"
#include "actflow/graphs.hpp"
#include "actflow/solver.hpp"

namespace actflow {

namespace fs = std::filesystem;

int cmd_simulate(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.config.empty()) {
    err << "simulate: --config is required\n";
    return kExitUsage;
  }
  SimConfig cfg;
  try {
    cfg = load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (!opt.k_list.empty()) cfg.solver.k = opt.k_list.front();
    if (!opt.out.empty()) cfg.output.directory = opt.out;
    if (cfg.output.directory.empty()) cfg.output.directory = "results/" + cfg.name;
    validate_config(cfg);
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const Trajectory traj = run(cfg);
    const BudgetRecord* last = traj.budgets.empty() ? nullptr : &traj.budgets.back();
    out << "simulate: " << cfg.name << " finished, " << traj.budgets.size() << " steps"
        << (traj.steady ? " (steady)" : "") << ", outputs in " << cfg.output.directory << "\n";
    if (last != nullptr) {
      out << "  t = " << last->t << ", kinetic " << last->kinetic_energy << ", internal " << last->internal_energy
          << ", min e " << last->min_e << "\n";
    }
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_verify_graphs(const CliOptions& opt, std::ostream& out, std::ostream& err,
                      const CoefficientSet* override_set) {
  CoefficientSet cs;
  try {
    if (override_set != nullptr) {
      cs = *override_set;
    } else if (!opt.config.empty()) {
      cs = load_config(opt.config).coefficients;
    } else {
      cs = make_preset(opt.preset.empty() ? "activated" : opt.preset);
    }
  } catch (const std::exception& e) {
    err << "verify-graphs: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<int> ks = opt.k_list.empty() ? std::vector<int>{1, 8, 64} : opt.k_list;
  PropertyOptions po;
  po.seed = opt.seed.value_or(1);
  if (opt.samples) po.pairs = static_cast<std::size_t>(*opt.samples);

  bool ok = true;
  out << "coefficient set: " << cs.name << ", seed " << po.seed << ", pairs " << po.pairs << "\n";
  out << std::left << std::setw(28) << "property" << std::setw(8) << "k" << std::setw(8) << "result"
      << "worst slack\n";
  auto show = [&](const PropertyResult& r, int k) {
    out << std::left << std::setw(28) << r.name << std::setw(8) << (k == 0 ? std::string("exact") : std::to_string(k))
        << std::setw(8) << (r.passed ? "pass" : "FAIL") << r.worst << "\n";
    if (!r.passed) {
      ok = false;
      err << "counterexample (" << r.name << ", k = " << k << "): " << r.counterexample << "\n";
    }
  };
  std::vector<int> all{0};
  all.insert(all.end(), ks.begin(), ks.end());
  for (int k : all) {
    show(check_bulk_monotonicity<2>(cs, k, po), k);
    show(check_bulk_coercivity<2>(cs, k, po), k);
    show(check_wall_monotonicity<2>(cs, k, po), k);
    show(check_wall_coercivity<2>(cs, k, po), k);
  }

  DistanceStudyOptions dso;
  dso.seed = po.seed;
  if (!opt.k_list.empty()) dso.k_list.assign(opt.k_list.begin(), opt.k_list.end());
  if (opt.samples) dso.samples_per_k = *opt.samples;
  std::vector<DistanceRow> rows;
  try {
    rows = graph_distance_study(cs, dso);
  } catch (const std::exception& e) {
    err << "verify-graphs: distance study failed: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  out << "\n" << distance_table_csv(rows);
  for (const DistanceRow& r : rows) {
    if (r.max_displacement > r.bound_2c0_over_k) {
      ok = false;
      err << "projection bound violated at k = " << r.k << "\n";
    }
  }
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    std::ofstream(fs::path(opt.out) / "graph_distance.csv") << distance_table_csv(rows);
  }
  out << (ok ? "verify-graphs: all properties hold\n" : "verify-graphs: FAILED\n");
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> names = scenario_names();
  if (opt.scenario.empty()) {
    err << "bench: scenario name required; one of";
    for (const auto& n : names) err << " " << n;
    err << "\n";
    return kExitUsage;
  }
  std::vector<std::string> todo;
  if (opt.scenario == "all") {
    todo = names;
  } else if (std::find(names.begin(), names.end(), opt.scenario) != names.end()) {
    todo = {opt.scenario};
  } else {
    err << "bench: unknown scenario '" << opt.scenario << "'\n";
    return kExitUsage;
  }
  BenchOptions bo;
  bo.out_root = opt.out.empty() ? "results" : opt.out;
  bo.seed = opt.seed.value_or(1);
  bo.k_list = opt.k_list;
  bool ok = true;
  for (const std::string& name : todo) {
    try {
      const ScenarioReport rep = run_scenario(name, bo);
      out << "== " << name << ": " << (rep.passed ? "PASS" : "FAIL") << "\n" << rep.table;
      for (const auto& [k, v] : rep.metrics) out << "  " << k << " = " << v << "\n";
      ok = ok && rep.passed;
    } catch (const std::exception& e) {
      err << "bench " << name << ": " << e.what() << "\n";
      return kExitSolver;
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_audit(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const std::string dir = !opt.out.empty() ? opt.out : opt.config;
  if (dir.empty()) {
    err << "audit: give the results directory with --out DIR\n";
    return kExitUsage;
  }
  Trajectory traj;
  try {
    traj = load_trajectory(dir);
  } catch (const std::exception& e) {
    err << "audit: " << e.what() << "\n";
    return kExitUsage;
  }
  const AuditReport rep = audit_trajectory(traj);
  out << rep.text();
  std::ofstream(fs::path(dir) / "audit.txt") << rep.text();
  std::ofstream(fs::path(dir) / "audit.csv") << rep.csv();
  return rep.passed() ? kExitOk : kExitCheckFailed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"actflow: channel flow with temperature-activated constitutive graphs"};
  app.require_subcommand(1);
  CliOptions opt;
  std::string k_text;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "configuration file (JSON)");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--k", k_text, "comma separated regularization levels");
    sub->add_option("--samples", opt.samples, "sample count");
  };
  CLI::App* sim = app.add_subcommand("simulate", "run one configuration");
  common(sim);
  CLI::App* ver = app.add_subcommand("verify-graphs", "property suites and graph distance study");
  common(ver);
  ver->add_option("--preset", opt.preset, "coefficient preset when no config is given");
  CLI::App* ben = app.add_subcommand("bench", "run a named scenario against its oracle");
  common(ben);
  ben->add_option("scenario", opt.scenario, "scenario name or 'all'");
  CLI::App* aud = app.add_subcommand("audit", "audit a results directory");
  common(aud);
  aud->add_option("dir", opt.out, "results directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  if (!k_text.empty()) {
    std::stringstream ss(k_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const int k = std::stoi(item, &used);
        if (used != item.size() || k < 1) throw std::invalid_argument(item);
        opt.k_list.push_back(k);
      } catch (const std::exception&) {
        err << "--k: '" << item << "' is not a positive integer\n";
        return kExitUsage;
      }
    }
  }
  if (opt.samples && *opt.samples < 1) {
    err << "--samples must be positive\n";
    return kExitUsage;
  }
  if (sim->parsed()) return cmd_simulate(opt, out, err);
  if (ver->parsed()) return cmd_verify_graphs(opt, out, err);
  if (ben->parsed()) return cmd_bench(opt, out, err);
  return cmd_audit(opt, out, err);
}

}  // namespace actflow
