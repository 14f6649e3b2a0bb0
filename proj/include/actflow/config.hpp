#ifndef ACTFLOW_CONFIG_HPP_
#define ACTFLOW_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "actflow/coefficients.hpp"
#include "actflow/grid.hpp"
#include "actflow/tensor.hpp"

namespace actflow {

struct SolverParams {
  double dt = 0.01;
  int k = 64;
  int k_wall = 0;        // 0: use k
  int k_convection = 0;  // 0: use k
  double epsilon = 0.0;  // 0: 1e-4 h^2
  double picard_tol = 1e-8;
  int picard_max = 100;
  Vec2 body_force{0.0, 0.0};
  double cg_tol = 1e-10;
  int cg_max = 20000;
  double pressure_tol = 1e-10;
  double energy_tol = 1e-11;
  bool solve_energy = true;

  int wall_k() const { return k_wall > 0 ? k_wall : k; }
  int convection_k() const { return k_convection > 0 ? k_convection : k; }

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

struct InitialCondition {
  std::string velocity = "rest";  // rest | vortex | shear | snapshot
  double amplitude = 0.0;
  double e0 = 1.0;
  double e_spike = 0.0;       // bump added at the domain center
  std::string snapshot;       // path, for velocity = snapshot

  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

struct OutputSpec {
  std::string directory;
  int snapshot_every = 0;  // 0: initial and final only

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct SimConfig {
  std::string name = "custom";
  std::uint64_t seed = 1;
  Grid grid;
  std::string coefficient_preset;  // empty: tables only
  CoefficientSet coefficients;
  double c3 = 0.1;
  SolverParams solver;
  double t_final = 1.0;
  int max_steps = 1000000;
  bool stop_at_steady = false;
  double steady_tol = 1e-8;
  InitialCondition initial;
  OutputSpec output;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON document. Unknown keys, wrong types and syntax errors throw
/// ConfigError; syntax errors carry "line L, column C".
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
std::string dump_config(const SimConfig& cfg);

/// Semantic checks (grid, coefficients, e0 >= c3, positive dt ...).
void validate_config(const SimConfig& cfg);

/// Effective epsilon of a configuration.
double effective_epsilon(const SimConfig& cfg);

}  // namespace actflow

#endif  // ACTFLOW_CONFIG_HPP_
