#ifndef ACTFLOW_COEFFICIENTS_HPP_
#define ACTFLOW_COEFFICIENTS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace actflow {

/// Continuous piecewise-linear function of the internal energy.
///
/// Between breakpoints the value is interpolated linearly; beyond the outermost
/// breakpoints it is extended by a constant, so the function is defined on the
/// whole real line. A single breakpoint encodes a constant.
class PiecewiseLinear {
 public:
  PiecewiseLinear() : xs_{0.0}, ys_{0.0} {}
  PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> values);

  static PiecewiseLinear constant(double value) { return PiecewiseLinear({0.0}, {value}); }
  /// max{0, min{height, slope * (e - origin)}} as a breakpoint table.
  static PiecewiseLinear clamp_ramp(double origin, double slope, double height);

  double operator()(double e) const;

  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }

  bool is_constant() const;
  double min_value() const;
  double max_value() const;

  friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Point values of all seven material functions at one internal energy.
struct CoefficientValues {
  double nu = 1.0;
  double gamma = 1.0;
  double kappa = 1.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

/// The temperature-dependent material functions together with their
/// admissibility constants. c0 bounds the activations, [c1, c2] brackets
/// the viscosity, friction and conductivity.
struct CoefficientSet {
  std::string name = "custom";
  PiecewiseLinear nu = PiecewiseLinear::constant(1.0);
  PiecewiseLinear gamma = PiecewiseLinear::constant(1.0);
  PiecewiseLinear kappa = PiecewiseLinear::constant(1.0);
  PiecewiseLinear tau1 = PiecewiseLinear::constant(0.0);
  PiecewiseLinear tau2 = PiecewiseLinear::constant(0.0);
  PiecewiseLinear sigma1 = PiecewiseLinear::constant(0.0);
  PiecewiseLinear sigma2 = PiecewiseLinear::constant(0.0);
  double c0 = 1.0;
  double c1 = 0.5;
  double c2 = 2.0;

  CoefficientValues evaluate(double e) const;

  /// Every breakpoint of every function, sorted and deduplicated.
  std::vector<double> all_breakpoints() const;

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;
};

inline CoefficientValues evaluate_coefficients(const CoefficientSet& cs, double e) {
  return cs.evaluate(e);
}

enum class ViolationKind {
  kActivationBound,  // outside [0, c0]
  kMaterialBound,    // outside [c1, c2]
  kBulkProduct,      // tau1 * tau2 != 0
  kWallProduct,      // sigma1 * sigma2 != 0
  kOverlappingSupport,
  kBadConstants,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string function;  // which coefficient, or "tau1*tau2" etc.
  double argument = 0.0;
  double value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t samples_checked = 0;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks bounds and product conditions. Samples the breakpoint grid, the
/// midpoints between breakpoints, a margin outside them, and `sample_count`
/// seeded random arguments; in addition the supports of (tau1, tau2) and
/// (sigma1, sigma2) are certified disjoint interval by interval.
ValidationReport validate(const CoefficientSet& cs, int sample_count, std::uint64_t seed = 7);

class UnknownPreset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Named coefficient families:
///   newtonian       all activations zero, nu = gamma = kappa = 1
///   activated       tau1 = max{0,min{1,e-1}}, tau2 = max{0,min{1,1-e}}
///   bingham_const   tau2 = 0.3 (constant yield stress), Navier slip
///   stick_slip      Newtonian bulk, sigma2 = 0.5 at the wall
///   perfect_slip_slip  Newtonian bulk, sigma1 = 0.5 at the wall
/// "paper_example" is accepted as another name for "activated".
CoefficientSet make_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace actflow

#endif  // ACTFLOW_COEFFICIENTS_HPP_
