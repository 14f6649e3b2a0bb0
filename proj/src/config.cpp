#include "actflow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actflow/pressure.hpp"

namespace actflow {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type for '" + std::string(key) + "' in " + where);
  }
}

void read_double(const json& obj, const char* key, const std::string& where, double& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be a number");
  out = it->get<double>();
}

void read_int(const json& obj, const char* key, const std::string& where, int& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be an integer");
  out = it->get<int>();
}

PiecewiseLinear read_function(const json& j, const std::string& name) {
  if (j.is_number()) return PiecewiseLinear::constant(j.get<double>());
  only_keys(j, "coefficients." + name, {"breakpoints", "values"});
  if (!j.contains("breakpoints") || !j.contains("values")) {
    throw ConfigError("coefficients." + name + " needs breakpoints and values");
  }
  try {
    return PiecewiseLinear(j.at("breakpoints").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
  } catch (const json::exception&) {
    throw ConfigError("coefficients." + name + " breakpoints/values must be number arrays");
  } catch (const std::invalid_argument& e) {
    throw ConfigError("coefficients." + name + ": " + e.what());
  }
}

ordered_json write_function(const PiecewiseLinear& f) {
  ordered_json j;
  j["breakpoints"] = f.breakpoints();
  j["values"] = f.values();
  return j;
}

PiecewiseLinear* function_slot(CoefficientSet& cs, const std::string& key) {
  if (key == "nu") return &cs.nu;
  if (key == "gamma") return &cs.gamma;
  if (key == "kappa") return &cs.kappa;
  if (key == "tau1") return &cs.tau1;
  if (key == "tau2") return &cs.tau2;
  if (key == "sigma1") return &cs.sigma1;
  if (key == "sigma2") return &cs.sigma2;
  return nullptr;
}

const PiecewiseLinear* function_slot(const CoefficientSet& cs, const std::string& key) {
  return function_slot(const_cast<CoefficientSet&>(cs), key);
}

const char* const kFunctions[] = {"nu", "gamma", "kappa", "tau1", "tau2", "sigma1", "sigma2"};

}  // namespace

SimConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw ConfigError("config parse error at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                      (pos == std::string::npos ? what : what.substr(pos)));
  }
  only_keys(root, "config", {"name", "seed", "grid", "coefficients", "solver", "initial", "output"});
  SimConfig cfg;
  read(root, "name", "config", cfg.name);
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  if (root.contains("grid")) {
    const json& g = root["grid"];
    only_keys(g, "grid", {"Lx", "Ly", "nx", "ny", "x_boundary", "y_boundary"});
    read_double(g, "Lx", "grid", cfg.grid.Lx);
    read_double(g, "Ly", "grid", cfg.grid.Ly);
    read_int(g, "nx", "grid", cfg.grid.nx);
    read_int(g, "ny", "grid", cfg.grid.ny);
    try {
      if (g.contains("x_boundary")) cfg.grid.x_boundary = boundary_from_string(g["x_boundary"].get<std::string>());
      if (g.contains("y_boundary")) cfg.grid.y_boundary = boundary_from_string(g["y_boundary"].get<std::string>());
    } catch (const json::exception&) {
      throw ConfigError("grid boundaries must be strings");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (root.contains("coefficients")) {
    const json& c = root["coefficients"];
    only_keys(c, "coefficients",
              {"preset", "nu", "gamma", "kappa", "tau1", "tau2", "sigma1", "sigma2", "c0", "c1", "c2", "c3"});
    if (c.contains("preset")) {
      read(c, "preset", "coefficients", cfg.coefficient_preset);
      try {
        cfg.coefficients = make_preset(cfg.coefficient_preset);
      } catch (const UnknownPreset& e) {
        throw ConfigError(e.what());
      }
    }
    for (const char* name : kFunctions) {
      if (c.contains(name)) *function_slot(cfg.coefficients, name) = read_function(c[name], name);
    }
    read_double(c, "c0", "coefficients", cfg.coefficients.c0);
    read_double(c, "c1", "coefficients", cfg.coefficients.c1);
    read_double(c, "c2", "coefficients", cfg.coefficients.c2);
    read_double(c, "c3", "coefficients", cfg.c3);
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    const std::string w = "solver";
    only_keys(s, w,
              {"dt", "t_final", "max_steps", "k", "k_wall", "k_convection", "epsilon", "picard_tol", "picard_max",
               "body_force", "cg_tol", "cg_max", "pressure_tol", "energy_tol", "solve_energy", "stop_at_steady",
               "steady_tol"});
    SolverParams& p = cfg.solver;
    read_double(s, "dt", w, p.dt);
    read_double(s, "t_final", w, cfg.t_final);
    read_int(s, "max_steps", w, cfg.max_steps);
    read_int(s, "k", w, p.k);
    read_int(s, "k_wall", w, p.k_wall);
    read_int(s, "k_convection", w, p.k_convection);
    read_double(s, "epsilon", w, p.epsilon);
    read_double(s, "picard_tol", w, p.picard_tol);
    read_int(s, "picard_max", w, p.picard_max);
    if (s.contains("body_force")) {
      const json& b = s["body_force"];
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
        throw ConfigError("solver.body_force must be [fx, fy]");
      }
      p.body_force = {b[0].get<double>(), b[1].get<double>()};
    }
    read_double(s, "cg_tol", w, p.cg_tol);
    read_int(s, "cg_max", w, p.cg_max);
    read_double(s, "pressure_tol", w, p.pressure_tol);
    read_double(s, "energy_tol", w, p.energy_tol);
    read(s, "solve_energy", w, p.solve_energy);
    read(s, "stop_at_steady", w, cfg.stop_at_steady);
    read_double(s, "steady_tol", w, cfg.steady_tol);
  }

  if (root.contains("initial")) {
    const json& i = root["initial"];
    only_keys(i, "initial", {"velocity", "amplitude", "e0", "e_spike", "snapshot"});
    read(i, "velocity", "initial", cfg.initial.velocity);
    read_double(i, "amplitude", "initial", cfg.initial.amplitude);
    read_double(i, "e0", "initial", cfg.initial.e0);
    read_double(i, "e_spike", "initial", cfg.initial.e_spike);
    read(i, "snapshot", "initial", cfg.initial.snapshot);
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    only_keys(o, "output", {"directory", "snapshot_every"});
    read(o, "directory", "output", cfg.output.directory);
    read_int(o, "snapshot_every", "output", cfg.output.snapshot_every);
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const SimConfig& cfg) {
  ordered_json root;
  root["name"] = cfg.name;
  root["seed"] = cfg.seed;
  root["grid"] = {{"Lx", cfg.grid.Lx},
                  {"Ly", cfg.grid.Ly},
                  {"nx", cfg.grid.nx},
                  {"ny", cfg.grid.ny},
                  {"x_boundary", to_string(cfg.grid.x_boundary)},
                  {"y_boundary", to_string(cfg.grid.y_boundary)}};
  ordered_json c;
  if (!cfg.coefficient_preset.empty()) c["preset"] = cfg.coefficient_preset;
  for (const char* name : kFunctions) c[name] = write_function(*function_slot(cfg.coefficients, name));
  c["c0"] = cfg.coefficients.c0;
  c["c1"] = cfg.coefficients.c1;
  c["c2"] = cfg.coefficients.c2;
  c["c3"] = cfg.c3;
  root["coefficients"] = c;
  const SolverParams& p = cfg.solver;
  root["solver"] = {{"dt", p.dt},
                    {"t_final", cfg.t_final},
                    {"max_steps", cfg.max_steps},
                    {"k", p.k},
                    {"k_wall", p.k_wall},
                    {"k_convection", p.k_convection},
                    {"epsilon", p.epsilon},
                    {"picard_tol", p.picard_tol},
                    {"picard_max", p.picard_max},
                    {"body_force", {p.body_force[0], p.body_force[1]}},
                    {"cg_tol", p.cg_tol},
                    {"cg_max", p.cg_max},
                    {"pressure_tol", p.pressure_tol},
                    {"energy_tol", p.energy_tol},
                    {"solve_energy", p.solve_energy},
                    {"stop_at_steady", cfg.stop_at_steady},
                    {"steady_tol", cfg.steady_tol}};
  root["initial"] = {{"velocity", cfg.initial.velocity},
                     {"amplitude", cfg.initial.amplitude},
                     {"e0", cfg.initial.e0},
                     {"e_spike", cfg.initial.e_spike},
                     {"snapshot", cfg.initial.snapshot}};
  root["output"] = {{"directory", cfg.output.directory}, {"snapshot_every", cfg.output.snapshot_every}};
  return root.dump(2) + "\n";
}

void validate_config(const SimConfig& cfg) {
  try {
    cfg.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  const ValidationReport rep = validate(cfg.coefficients, 2000, cfg.seed);
  if (!rep.ok()) throw ConfigError("coefficients: " + rep.summary());
  if (!(cfg.c3 > 0.0)) throw ConfigError("c3 must be positive");
  const double e_min = cfg.initial.e0 + std::min(0.0, cfg.initial.e_spike);
  if (cfg.initial.velocity != "snapshot" && !(e_min >= cfg.c3)) {
    std::ostringstream os;
    os << "initial energy violates e0 >= c3 (min e0 = " << e_min << ", c3 = " << cfg.c3 << ")";
    throw ConfigError(os.str());
  }
  static const std::set<std::string> velocities{"rest", "vortex", "shear", "snapshot"};
  if (!velocities.count(cfg.initial.velocity)) {
    throw ConfigError("unknown initial velocity '" + cfg.initial.velocity + "'");
  }
  if (cfg.initial.velocity == "snapshot" && cfg.initial.snapshot.empty()) {
    throw ConfigError("initial.snapshot path is required for velocity = snapshot");
  }
  const SolverParams& p = cfg.solver;
  if (!(p.dt > 0.0)) throw ConfigError("solver.dt must be positive");
  if (!(cfg.t_final > 0.0)) throw ConfigError("solver.t_final must be positive");
  if (cfg.max_steps < 1) throw ConfigError("solver.max_steps must be >= 1");
  if (p.k < 1 || p.k_wall < 0 || p.k_convection < 0) throw ConfigError("regularization levels must be >= 1");
  if (p.epsilon < 0.0) throw ConfigError("solver.epsilon must be >= 0");
  if (!(p.picard_tol > 0.0)) throw ConfigError("solver.picard_tol must be positive");
  if (p.picard_max < 1) throw ConfigError("solver.picard_max must be >= 1");
  if (!(p.cg_tol > 0.0) || !(p.pressure_tol > 0.0) || !(p.energy_tol > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (cfg.output.snapshot_every < 0) throw ConfigError("output.snapshot_every must be >= 0");
}

double effective_epsilon(const SimConfig& cfg) {
  return cfg.solver.epsilon > 0.0 ? cfg.solver.epsilon : default_epsilon(cfg.grid);
}

}  // namespace actflow
