#ifndef ACTFLOW_GRAPHS_HPP_
#define ACTFLOW_GRAPHS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "actflow/coefficients.hpp"
#include "actflow/tensor.hpp"

namespace actflow {

/// Magnitudes below this are treated as zero in every f(|X|)/|X| * X expression.
inline constexpr double kZeroGuard = 1e-30;

/// Regularization index shared by the bulk graph, the wall graph and the
/// convection cutoff unless overridden.
class RegularizationLevel {
 public:
  explicit RegularizationLevel(double k) : k_(k) {
    if (!(k >= 1.0) || std::floor(k) != k) {
      throw std::invalid_argument("regularization level must be an integer >= 1");
    }
  }
  double value() const { return k_; }

 private:
  double k_;
};

class BranchUnavailable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotOnApproximateGraph : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <int Dim>
struct BulkTriplet {
  SymTensor<Dim> S;
  SymTensor<Dim> D;
  double e = 0.0;
};

template <int Dim>
struct WallTriplet {
  Vec<Dim> s{};
  Vec<Dim> v_tau{};
  double e = 0.0;
};

enum class Direction { kStressFromRate, kRateFromStress };

// ---------------------------------------------------------------------------
// Scalar laws. Every graph here is radial: X -> g(|X|) X/|X|. The helpers below
// work on magnitudes and are shared by bulk and wall (substitute nu -> gamma/2,
// tau -> sigma).
// ---------------------------------------------------------------------------

/// Secant factor of the regularized law: min{k + slope, [slope (r - a)^+ + b] / r}.
/// `slope` is 2 nu for the bulk and gamma for the wall; a, b are the rate and
/// stress activations. Returns k + slope at r = 0 (the limit value).
inline double regularized_factor(double r, double slope, double a, double b, double k) {
  const double cap = k + slope;
  if (r < kZeroGuard) return (b > 0.0 || a == 0.0) ? cap : 0.0;
  return std::min(cap, (slope * std::max(r - a, 0.0) + b) / r);
}

/// Left side of the exact relation in magnitude form: slope (r - a)^+.
inline double rate_side(double r, double slope, double a) { return slope * std::max(r - a, 0.0); }
/// Right side: (q - b)^+.
inline double stress_side(double q, double b) { return std::max(q - b, 0.0); }

inline double bulk_factor(double d_norm, const CoefficientValues& c, double k) {
  return regularized_factor(d_norm, 2.0 * c.nu, c.tau1, c.tau2, k);
}

inline double wall_factor(double v_norm, const CoefficientValues& c, double k) {
  return regularized_factor(v_norm, c.gamma, c.sigma1, c.sigma2, k);
}

// ---------------------------------------------------------------------------
// Regularized single-valued graphs.
// ---------------------------------------------------------------------------

template <int Dim>
SymTensor<Dim> bulk_stress_regularized(const SymTensor<Dim>& D, double e, RegularizationLevel k,
                                       const CoefficientSet& cs) {
  const double d = norm(D);
  if (d < kZeroGuard) return {};
  return bulk_factor(d, cs.evaluate(e), k.value()) * D;
}

template <int Dim>
Vec<Dim> wall_traction_regularized(const Vec<Dim>& v_tau, double e, RegularizationLevel k,
                                   const CoefficientSet& cs) {
  const double v = norm<Dim>(v_tau);
  if (v < kZeroGuard) return Vec<Dim>{};
  return scaled<Dim>(v_tau, wall_factor(v, cs.evaluate(e), k.value()));
}

// ---------------------------------------------------------------------------
// Exact graphs: membership.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
T radial(const T& x, double mag, double new_mag) {
  if (mag < kZeroGuard) return T{};
  return x * (new_mag / mag);
}

template <int Dim>
Vec<Dim> radial_vec(const Vec<Dim>& x, double mag, double new_mag) {
  if (mag < kZeroGuard) return Vec<Dim>{};
  return scaled<Dim>(x, new_mag / mag);
}

inline double membership_scale(double a, double b) { return std::max({1.0, a, b}); }

}  // namespace detail

/// Default membership tolerance, relative to max(1, |S|, |D|).
inline constexpr double kMembershipTol = 1e-9;

template <int Dim>
double bulk_membership_defect(const BulkTriplet<Dim>& t, const CoefficientSet& cs) {
  const CoefficientValues c = cs.evaluate(t.e);
  const double d = norm(t.D);
  const double s = norm(t.S);
  const SymTensor<Dim> lhs = detail::radial(t.D, d, rate_side(d, 2.0 * c.nu, c.tau1));
  const SymTensor<Dim> rhs = detail::radial(t.S, s, stress_side(s, c.tau2));
  return norm(lhs - rhs);
}

template <int Dim>
bool bulk_membership(const BulkTriplet<Dim>& t, const CoefficientSet& cs, double tol = kMembershipTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("membership tolerance must be positive");
  const double scale = detail::membership_scale(norm(t.S), norm(t.D));
  return bulk_membership_defect(t, cs) <= tol * scale;
}

template <int Dim>
double wall_membership_defect(const WallTriplet<Dim>& t, const CoefficientSet& cs) {
  const CoefficientValues c = cs.evaluate(t.e);
  const double v = norm<Dim>(t.v_tau);
  const double s = norm<Dim>(t.s);
  const Vec<Dim> lhs = detail::radial_vec<Dim>(t.v_tau, v, rate_side(v, c.gamma, c.sigma1));
  const Vec<Dim> rhs = detail::radial_vec<Dim>(t.s, s, stress_side(s, c.sigma2));
  return norm<Dim>(lhs - rhs);
}

template <int Dim>
bool wall_membership(const WallTriplet<Dim>& t, const CoefficientSet& cs, double tol = kMembershipTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("membership tolerance must be positive");
  const double scale = detail::membership_scale(norm<Dim>(t.s), norm<Dim>(t.v_tau));
  return wall_membership_defect(t, cs) <= tol * scale;
}

template <int Dim>
bool bulk_membership_regularized(const BulkTriplet<Dim>& t, RegularizationLevel k, const CoefficientSet& cs,
                                 double tol = kMembershipTol) {
  const SymTensor<Dim> S = bulk_stress_regularized(t.D, t.e, k, cs);
  const double scale = detail::membership_scale(norm(t.S), norm(t.D));
  return norm(S - t.S) <= tol * scale;
}

// ---------------------------------------------------------------------------
// Exact graphs: resolution of the partner quantity.
// ---------------------------------------------------------------------------

/// Magnitude of the exact partner. `slope` = 2 nu (bulk) or gamma (wall);
/// `a`, `b` the rate and stress activations. Throws BranchUnavailable where
/// the requested direction is multivalued.
inline double resolve_magnitude(double known, Direction dir, double slope, double a, double b) {
  if (dir == Direction::kRateFromStress) {
    if (a == 0.0) return stress_side(known, b) / slope;
    // a > 0, b = 0: stress -> rate is single valued away from zero stress
    if (known < kZeroGuard) {
      throw BranchUnavailable("rate is multivalued at zero stress while the rate activation is positive");
    }
    return known / slope + a;
  }
  if (b == 0.0) return rate_side(known, slope, a);
  // b > 0, a = 0: rate -> stress single valued away from zero rate; at zero
  // rate the selection convention picks the zero stress
  if (known < kZeroGuard) return 0.0;
  return slope * known + b;
}

template <int Dim>
SymTensor<Dim> resolve_bulk(const SymTensor<Dim>& known, double e, Direction dir, const CoefficientSet& cs) {
  const CoefficientValues c = cs.evaluate(e);
  const double m = norm(known);
  return detail::radial(known, m, resolve_magnitude(m, dir, 2.0 * c.nu, c.tau1, c.tau2));
}

template <int Dim>
Vec<Dim> resolve_wall(const Vec<Dim>& known, double e, Direction dir, const CoefficientSet& cs) {
  const CoefficientValues c = cs.evaluate(e);
  const double m = norm<Dim>(known);
  return detail::radial_vec<Dim>(known, m, resolve_magnitude(m, dir, c.gamma, c.sigma1, c.sigma2));
}

// ---------------------------------------------------------------------------
// Projection of the regularized graph onto the exact one. Only the rate is
// moved, and only on the steep segment near zero rate.
// ---------------------------------------------------------------------------

/// Rate magnitude after projection, or the input when outside the trigger band.
inline double project_rate_magnitude(double stress_mag, double rate_mag, double slope, double b, double k) {
  if (stress_mag < b + slope * b / k) return stress_side(stress_mag, b) / slope;
  return rate_mag;
}

template <int Dim>
BulkTriplet<Dim> project_bulk(const BulkTriplet<Dim>& t, RegularizationLevel k, const CoefficientSet& cs,
                              double tol = kMembershipTol) {
  if (!bulk_membership_regularized(t, k, cs, tol)) {
    throw NotOnApproximateGraph("bulk triplet is not on the regularized graph");
  }
  const CoefficientValues c = cs.evaluate(t.e);
  const double s = norm(t.S);
  const double slope = 2.0 * c.nu;
  if (!(s < c.tau2 + slope * c.tau2 / k.value())) return t;
  BulkTriplet<Dim> out = t;
  out.D = detail::radial(t.S, s, stress_side(s, c.tau2) / slope);
  return out;
}

template <int Dim>
WallTriplet<Dim> project_wall(const WallTriplet<Dim>& t, RegularizationLevel k, const CoefficientSet& cs,
                              double tol = kMembershipTol) {
  const Vec<Dim> s_reg = wall_traction_regularized<Dim>(t.v_tau, t.e, k, cs);
  const double scale = detail::membership_scale(norm<Dim>(t.s), norm<Dim>(t.v_tau));
  if (norm<Dim>(s_reg - t.s) > tol * scale) {
    throw NotOnApproximateGraph("wall triplet is not on the regularized graph");
  }
  const CoefficientValues c = cs.evaluate(t.e);
  const double s = norm<Dim>(t.s);
  if (!(s < c.sigma2 + c.gamma * c.sigma2 / k.value())) return t;
  WallTriplet<Dim> out = t;
  out.v_tau = detail::radial_vec<Dim>(t.s, s, stress_side(s, c.sigma2) / c.gamma);
  return out;
}

// ---------------------------------------------------------------------------
// Studies and property suites (implemented in graphs.cpp).
// ---------------------------------------------------------------------------

struct DistanceRow {
  double k = 0.0;
  double max_displacement = 0.0;
  double bound_2c0_over_k = 0.0;
  double max_bound_ratio = 0.0;  // max over samples of displacement / (2 tau2(e)/k)
  std::size_t samples = 0;
  std::size_t projected = 0;
};

struct DistanceStudyOptions {
  std::vector<double> e_samples;
  double ball_radius = 4.0;
  std::vector<double> k_list{8, 16, 32, 64};
  std::size_t samples_per_k = 20000;
  std::uint64_t seed = 1;
  bool wall = false;  // study the wall graph instead of the bulk graph
};

/// Samples the regularized graph inside a ball of the given radius and
/// reports, per k, the largest displacement of the projection.
std::vector<DistanceRow> graph_distance_study(const CoefficientSet& cs, const DistanceStudyOptions& opt);

std::string distance_table_csv(const std::vector<DistanceRow>& rows);

/// Admissibility constants for the coercivity bound S.D >= alpha(|S|^2+|D|^2) - beta.
struct CoercivityConstants {
  double alpha;
  double beta;
};

inline CoercivityConstants coercivity_constants(const CoefficientSet& cs) {
  return {std::min(1.0 / (16.0 * cs.c2), cs.c1), cs.c0 * cs.c0 / (4.0 * cs.c2)};
}

/// The wall law has slope gamma in [c1, c2] where the bulk has 2 nu in
/// [2 c1, 2 c2], so the same bound holds with c1, c2 halved.
inline CoercivityConstants wall_coercivity_constants(const CoefficientSet& cs) {
  return {std::min(1.0 / (8.0 * cs.c2), 0.5 * cs.c1), cs.c0 * cs.c0 / (2.0 * cs.c2)};
}

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  double worst = 0.0;  // smallest slack observed (negative means violated)
  std::string counterexample;
};

struct PropertyOptions {
  std::size_t pairs = 100000;
  double radius = 4.0;
  double monotonicity_tol = 1e-12;
  std::uint64_t seed = 1;
  std::vector<double> e_samples;  // empty: drawn around the coefficient breakpoints
};

/// Monotonicity of the exact graph (k = 0) or of A^k for the given k.
template <int Dim>
PropertyResult check_bulk_monotonicity(const CoefficientSet& cs, double k, const PropertyOptions& opt);
template <int Dim>
PropertyResult check_bulk_coercivity(const CoefficientSet& cs, double k, const PropertyOptions& opt);
template <int Dim>
PropertyResult check_wall_monotonicity(const CoefficientSet& cs, double k, const PropertyOptions& opt);
template <int Dim>
PropertyResult check_wall_coercivity(const CoefficientSet& cs, double k, const PropertyOptions& opt);

/// Energies at which to sample when the caller gives none.
std::vector<double> default_energy_samples(const CoefficientSet& cs, std::size_t count, std::uint64_t seed);

}  // namespace actflow

#endif  // ACTFLOW_GRAPHS_HPP_
