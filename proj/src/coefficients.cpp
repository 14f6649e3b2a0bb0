#include "actflow/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace actflow {

PiecewiseLinear::PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> values)
    : xs_(std::move(breakpoints)), ys_(std::move(values)) {
  if (xs_.empty() || xs_.size() != ys_.size()) {
    throw std::invalid_argument("piecewise-linear table needs matching, non-empty breakpoint and value lists");
  }
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
      throw std::invalid_argument("piecewise-linear table contains a non-finite entry");
    }
    if (i > 0 && !(xs_[i] > xs_[i - 1])) {
      throw std::invalid_argument("piecewise-linear breakpoints must be strictly increasing");
    }
  }
}

PiecewiseLinear PiecewiseLinear::clamp_ramp(double origin, double slope, double height) {
  if (slope == 0.0 || height <= 0.0) return constant(0.0);
  const double end = origin + height / slope;
  if (slope > 0.0) return PiecewiseLinear({origin, end}, {0.0, height});
  return PiecewiseLinear({end, origin}, {height, 0.0});
}

double PiecewiseLinear::operator()(double e) const {
  if (e <= xs_.front()) return ys_.front();
  if (e >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), e);
  const std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
  const std::size_t lo = hi - 1;
  const double t = (e - xs_[lo]) / (xs_[hi] - xs_[lo]);
  // exact at both ends, so clamped ranges survive interpolation
  return (1.0 - t) * ys_[lo] + t * ys_[hi];
}

bool PiecewiseLinear::is_constant() const {
  return std::all_of(ys_.begin(), ys_.end(), [&](double y) { return y == ys_.front(); });
}

double PiecewiseLinear::min_value() const { return *std::min_element(ys_.begin(), ys_.end()); }
double PiecewiseLinear::max_value() const { return *std::max_element(ys_.begin(), ys_.end()); }

CoefficientValues CoefficientSet::evaluate(double e) const {
  return {nu(e), gamma(e), kappa(e), tau1(e), tau2(e), sigma1(e), sigma2(e)};
}

std::vector<double> CoefficientSet::all_breakpoints() const {
  std::vector<double> xs;
  for (const PiecewiseLinear* f : {&nu, &gamma, &kappa, &tau1, &tau2, &sigma1, &sigma2}) {
    xs.insert(xs.end(), f->breakpoints().begin(), f->breakpoints().end());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kActivationBound: return "activation-bound";
    case ViolationKind::kMaterialBound: return "material-bound";
    case ViolationKind::kBulkProduct: return "bulk-product";
    case ViolationKind::kWallProduct: return "wall-product";
    case ViolationKind::kOverlappingSupport: return "overlapping-support";
    case ViolationKind::kBadConstants: return "bad-constants";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  if (ok()) {
    os << "coefficients valid (" << samples_checked << " samples)";
    return os.str();
  }
  os << violations.size() << " violation(s) over " << samples_checked << " samples";
  const std::size_t shown = std::min<std::size_t>(violations.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& v = violations[i];
    os << "\n  [" << to_string(v.kind) << "] " << v.function << " at e=" << v.argument
       << ": " << v.message;
  }
  if (shown < violations.size()) os << "\n  ...";
  return os.str();
}

namespace {

// Exact certification that f * g vanishes identically. Both are linear between
// consecutive merged breakpoints and nonnegative, so the product vanishes on an
// interval iff one factor is zero at both of its ends.
void check_disjoint_supports(const PiecewiseLinear& f, const PiecewiseLinear& g,
                             const std::string& label, ValidationReport& report) {
  std::vector<double> xs = f.breakpoints();
  xs.insert(xs.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  // the two constant tails are checked as degenerate intervals at the ends
  std::vector<std::pair<double, double>> pieces{{xs.front(), xs.front()}};
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) pieces.emplace_back(xs[i], xs[i + 1]);
  pieces.emplace_back(xs.back(), xs.back());
  for (const auto& [a, b] : pieces) {
    const bool f_zero = f(a) == 0.0 && f(b) == 0.0;
    const bool g_zero = g(a) == 0.0 && g(b) == 0.0;
    if (!f_zero && !g_zero) {
      std::ostringstream msg;
      if (a == b) {
        msg << "supports overlap on the constant tail at " << a;
      } else {
        msg << "supports overlap on [" << a << ", " << b << "]";
      }
      report.violations.push_back({ViolationKind::kOverlappingSupport, label, 0.5 * (a + b),
                                   f(0.5 * (a + b)) * g(0.5 * (a + b)), msg.str()});
    }
  }
}

struct NamedFunction {
  const char* name;
  const PiecewiseLinear* f;
  bool activation;
};

}  // namespace

ValidationReport validate(const CoefficientSet& cs, int sample_count, std::uint64_t seed) {
  ValidationReport report;
  if (sample_count < 2) {
    report.violations.push_back({ViolationKind::kBadConstants, "sample_count", 0.0,
                                 static_cast<double>(sample_count), "sample_count must be >= 2"});
    return report;
  }
  if (!(cs.c0 > 0.0) || !(cs.c1 > 0.0) || !(cs.c2 >= cs.c1)) {
    std::ostringstream msg;
    msg << "need c0 > 0 and 0 < c1 <= c2, got c0=" << cs.c0 << " c1=" << cs.c1 << " c2=" << cs.c2;
    report.violations.push_back({ViolationKind::kBadConstants, "c0,c1,c2", 0.0, 0.0, msg.str()});
  }

  const NamedFunction functions[] = {
      {"nu", &cs.nu, false},       {"gamma", &cs.gamma, false},   {"kappa", &cs.kappa, false},
      {"tau1", &cs.tau1, true},    {"tau2", &cs.tau2, true},      {"sigma1", &cs.sigma1, true},
      {"sigma2", &cs.sigma2, true}};

  // Sample set: breakpoints, midpoints, a margin on both sides, random points.
  std::vector<double> xs = cs.all_breakpoints();
  const double lo = xs.front();
  const double hi = xs.back();
  const double margin = std::max(1.0, hi - lo);
  std::vector<double> samples = xs;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) samples.push_back(0.5 * (xs[i] + xs[i + 1]));
  samples.push_back(lo - margin);
  samples.push_back(hi + margin);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo - margin, hi + margin);
  for (int i = 0; i < sample_count; ++i) samples.push_back(dist(rng));
  report.samples_checked = samples.size();

  auto record = [&](ViolationKind kind, const std::string& fn, double e, double value,
                    const std::string& msg) { report.violations.push_back({kind, fn, e, value, msg}); };

  for (double e : samples) {
    for (const auto& nf : functions) {
      const double val = (*nf.f)(e);
      if (nf.activation) {
        if (!(val >= 0.0 && val <= cs.c0)) {
          std::ostringstream msg;
          msg << "value " << val << " outside [0, c0=" << cs.c0 << "]";
          record(ViolationKind::kActivationBound, nf.name, e, val, msg.str());
        }
      } else if (!(val >= cs.c1 && val <= cs.c2)) {
        std::ostringstream msg;
        msg << "value " << val << " outside [c1=" << cs.c1 << ", c2=" << cs.c2 << "]";
        record(ViolationKind::kMaterialBound, nf.name, e, val, msg.str());
      }
    }
    const double pb = cs.tau1(e) * cs.tau2(e);
    if (pb != 0.0) {
      record(ViolationKind::kBulkProduct, "tau1*tau2", e, pb, "both bulk activations positive");
    }
    const double pw = cs.sigma1(e) * cs.sigma2(e);
    if (pw != 0.0) {
      record(ViolationKind::kWallProduct, "sigma1*sigma2", e, pw, "both wall activations positive");
    }
  }

  check_disjoint_supports(cs.tau1, cs.tau2, "tau1/tau2", report);
  check_disjoint_supports(cs.sigma1, cs.sigma2, "sigma1/sigma2", report);
  return report;
}

CoefficientSet make_preset(const std::string& name) {
  CoefficientSet cs;
  cs.name = name;
  if (name == "newtonian") {
    return cs;
  }
  if (name == "activated" || name == "paper_example") {
    cs.name = "activated";
    cs.tau1 = PiecewiseLinear({1.0, 2.0}, {0.0, 1.0});
    cs.tau2 = PiecewiseLinear({0.0, 1.0}, {1.0, 0.0});
    return cs;
  }
  if (name == "bingham_const") {
    cs.tau2 = PiecewiseLinear::constant(0.3);
    return cs;
  }
  if (name == "stick_slip") {
    cs.sigma2 = PiecewiseLinear::constant(0.5);
    return cs;
  }
  if (name == "perfect_slip_slip") {
    cs.sigma1 = PiecewiseLinear::constant(0.5);
    return cs;
  }
  throw UnknownPreset("unknown coefficient preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"newtonian", "activated", "bingham_const", "stick_slip", "perfect_slip_slip"};
}

}  // namespace actflow
