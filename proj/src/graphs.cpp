#include "actflow/graphs.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace actflow {

namespace {

// Random traceless symmetric tensor of unit norm.
template <int Dim>
SymTensor<Dim> random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::array<double, SymTensor<Dim>::kSize> c{};
  for (double& x : c) x = n01(rng);
  SymTensor<Dim> t = SymTensor<Dim>::from_components(c).deviatoric();
  const double m = norm(t);
  if (m < 1e-12) return random_direction<Dim>(rng);
  return (1.0 / m) * t;
}

template <int Dim>
Vec<Dim> random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec<Dim> v;
  for (double& x : v) x = n01(rng);
  const double m = norm<Dim>(v);
  if (m < 1e-12) return random_unit_vector<Dim>(rng);
  return scaled<Dim>(v, 1.0 / m);
}

// Magnitudes are drawn on two scales: the whole ball, and the thin layer of
// width ~ c0 near the origin where activations and the steep branch live.
double random_magnitude(std::mt19937_64& rng, double radius, double fine) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double r = u01(rng);
  if (r < 0.5) return radius * u01(rng);
  if (r < 0.8) return std::min(radius, 2.0 * fine) * u01(rng);
  return std::min(radius, 2.0 * fine / 16.0) * u01(rng);
}

template <typename T>
std::string describe(const T& x) {
  std::ostringstream os;
  os << std::setprecision(17) << "[";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << "]";
  return os.str();
}

template <int Dim>
std::string describe_tensor(const SymTensor<Dim>& t) {
  return describe(t.components());
}

// A point of the exact bulk graph at energy e. Where tau1 vanishes the graph
// is a function of S, otherwise of D.
template <int Dim>
BulkTriplet<Dim> sample_exact_bulk(const CoefficientSet& cs, double e, double radius, std::mt19937_64& rng) {
  const CoefficientValues c = cs.evaluate(e);
  BulkTriplet<Dim> t;
  t.e = e;
  const double fine = std::max({c.tau1, c.tau2, 1e-3});
  if (c.tau1 == 0.0) {
    t.S = random_magnitude(rng, radius, fine) * random_direction<Dim>(rng);
    t.D = resolve_bulk(t.S, e, Direction::kRateFromStress, cs);
  } else {
    t.D = random_magnitude(rng, radius, fine) * random_direction<Dim>(rng);
    t.S = resolve_bulk(t.D, e, Direction::kStressFromRate, cs);
  }
  return t;
}

template <int Dim>
BulkTriplet<Dim> sample_regularized_bulk(const CoefficientSet& cs, double e, double k, double radius,
                                         std::mt19937_64& rng) {
  const CoefficientValues c = cs.evaluate(e);
  BulkTriplet<Dim> t;
  t.e = e;
  const double fine = std::max({c.tau1, c.tau2 / k, 1e-3});
  t.D = random_magnitude(rng, radius, fine) * random_direction<Dim>(rng);
  t.S = bulk_stress_regularized(t.D, e, RegularizationLevel(k), cs);
  return t;
}

template <int Dim>
WallTriplet<Dim> sample_exact_wall(const CoefficientSet& cs, double e, double radius, std::mt19937_64& rng) {
  const CoefficientValues c = cs.evaluate(e);
  WallTriplet<Dim> t;
  t.e = e;
  const double fine = std::max({c.sigma1, c.sigma2, 1e-3});
  if (c.sigma1 == 0.0) {
    t.s = scaled<Dim>(random_unit_vector<Dim>(rng), random_magnitude(rng, radius, fine));
    t.v_tau = resolve_wall<Dim>(t.s, e, Direction::kRateFromStress, cs);
  } else {
    t.v_tau = scaled<Dim>(random_unit_vector<Dim>(rng), random_magnitude(rng, radius, fine));
    t.s = resolve_wall<Dim>(t.v_tau, e, Direction::kStressFromRate, cs);
  }
  return t;
}

template <int Dim>
WallTriplet<Dim> sample_regularized_wall(const CoefficientSet& cs, double e, double k, double radius,
                                         std::mt19937_64& rng) {
  const CoefficientValues c = cs.evaluate(e);
  WallTriplet<Dim> t;
  t.e = e;
  const double fine = std::max({c.sigma1, c.sigma2 / k, 1e-3});
  t.v_tau = scaled<Dim>(random_unit_vector<Dim>(rng), random_magnitude(rng, radius, fine));
  t.s = wall_traction_regularized<Dim>(t.v_tau, e, RegularizationLevel(k), cs);
  return t;
}

std::vector<double> energies_for(const CoefficientSet& cs, const PropertyOptions& opt) {
  if (!opt.e_samples.empty()) return opt.e_samples;
  return default_energy_samples(cs, 64, opt.seed);
}

std::string label_for(const char* what, double k) {
  std::ostringstream os;
  os << what << (k > 0.0 ? " A^k" : " exact");
  if (k > 0.0) os << " k=" << k;
  return os.str();
}

// Shared driver: draws same-energy pairs and feeds them to `check`, which
// returns the slack (negative = violated) and fills a counterexample text.
template <typename Sample, typename Check>
PropertyResult run_pairs(std::string name, const CoefficientSet& cs, const PropertyOptions& opt, Sample sample,
                         Check check) {
  PropertyResult res;
  res.name = std::move(name);
  res.worst = std::numeric_limits<double>::infinity();
  const std::vector<double> es = energies_for(cs, opt);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, es.size() - 1);
  for (std::size_t i = 0; i < opt.pairs; ++i) {
    const double e = es[pick(rng)];
    auto a = sample(e, rng);
    auto b = sample(e, rng);
    std::string text;
    const double slack = check(a, b, text);
    ++res.checked;
    if (slack < res.worst) res.worst = slack;
    if (slack < 0.0 && res.passed) {
      res.passed = false;
      res.counterexample = text;
    }
  }
  if (res.checked == 0) res.worst = 0.0;
  return res;
}

}  // namespace

std::vector<double> default_energy_samples(const CoefficientSet& cs, std::size_t count, std::uint64_t seed) {
  std::vector<double> xs = cs.all_breakpoints();
  std::vector<double> es;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    es.push_back(xs[i]);
    es.push_back(xs[i] - 1e-3);
    es.push_back(xs[i] + 1e-3);
    if (i + 1 < xs.size()) es.push_back(0.5 * (xs[i] + xs[i + 1]));
  }
  const double lo = xs.front() - 1.0;
  const double hi = xs.back() + 1.0;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(lo, hi);
  while (es.size() < count) es.push_back(dist(rng));
  return es;
}

std::vector<DistanceRow> graph_distance_study(const CoefficientSet& cs, const DistanceStudyOptions& opt) {
  if (!(opt.ball_radius > 0.0)) throw std::invalid_argument("ball_radius must be positive");
  if (opt.k_list.empty()) throw std::invalid_argument("k_list must not be empty");
  const std::vector<double> es =
      opt.e_samples.empty() ? default_energy_samples(cs, 64, opt.seed) : opt.e_samples;

  std::vector<DistanceRow> rows;
  for (double kv : opt.k_list) {
    const RegularizationLevel k(kv);
    DistanceRow row;
    row.k = kv;
    row.bound_2c0_over_k = 2.0 * cs.c0 / kv;
    std::mt19937_64 rng(opt.seed + static_cast<std::uint64_t>(kv));
    std::uniform_int_distribution<std::size_t> pick(0, es.size() - 1);
    std::size_t drawn = 0;
    while (row.samples < opt.samples_per_k && drawn < 20 * opt.samples_per_k) {
      ++drawn;
      const double e = es[pick(rng)];
      const CoefficientValues c = cs.evaluate(e);
      const double bound_e = 2.0 * (opt.wall ? c.sigma2 : c.tau2) / kv;
      double disp = 0.0;
      if (opt.wall) {
        const WallTriplet<3> t = sample_regularized_wall<3>(cs, e, kv, opt.ball_radius, rng);
        if (norm<3>(t.s) > opt.ball_radius) continue;
        const WallTriplet<3> p = project_wall<3>(t, k, cs);
        disp = norm<3>(p.v_tau - t.v_tau);
      } else {
        const BulkTriplet<3> t = sample_regularized_bulk<3>(cs, e, kv, opt.ball_radius, rng);
        if (norm(t.S) > opt.ball_radius) continue;
        const BulkTriplet<3> p = project_bulk<3>(t, k, cs);
        disp = norm(p.D - t.D);
      }
      ++row.samples;
      if (disp > 0.0) ++row.projected;
      row.max_displacement = std::max(row.max_displacement, disp);
      if (bound_e > 0.0) {
        row.max_bound_ratio = std::max(row.max_bound_ratio, disp / bound_e);
      } else if (disp > 0.0) {
        row.max_bound_ratio = std::numeric_limits<double>::infinity();
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string distance_table_csv(const std::vector<DistanceRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "k,max_displacement,bound_2c0_over_k,max_bound_ratio,samples,projected\n";
  for (const auto& r : rows) {
    os << r.k << ',' << r.max_displacement << ',' << r.bound_2c0_over_k << ',' << r.max_bound_ratio << ','
       << r.samples << ',' << r.projected << '\n';
  }
  return os.str();
}

template <int Dim>
PropertyResult check_bulk_monotonicity(const CoefficientSet& cs, double k, const PropertyOptions& opt) {
  auto sample = [&](double e, std::mt19937_64& rng) {
    return k > 0.0 ? sample_regularized_bulk<Dim>(cs, e, k, opt.radius, rng)
                   : sample_exact_bulk<Dim>(cs, e, opt.radius, rng);
  };
  auto check = [&](const BulkTriplet<Dim>& a, const BulkTriplet<Dim>& b, std::string& text) {
    const double v = inner(a.S - b.S, a.D - b.D);
    if (v < -opt.monotonicity_tol) {
      text = "e=" + std::to_string(a.e) + " S=" + describe_tensor(a.S) + " D=" + describe_tensor(a.D) +
             " S'=" + describe_tensor(b.S) + " D'=" + describe_tensor(b.D) +
             " (S-S').(D-D')=" + std::to_string(v);
    }
    return v + opt.monotonicity_tol;
  };
  return run_pairs(label_for("bulk monotonicity", k), cs, opt, sample, check);
}

template <int Dim>
PropertyResult check_bulk_coercivity(const CoefficientSet& cs, double k, const PropertyOptions& opt) {
  const CoercivityConstants cc = coercivity_constants(cs);
  auto sample = [&](double e, std::mt19937_64& rng) {
    return k > 0.0 ? sample_regularized_bulk<Dim>(cs, e, k, opt.radius, rng)
                   : sample_exact_bulk<Dim>(cs, e, opt.radius, rng);
  };
  auto slack_of = [&](const BulkTriplet<Dim>& t) {
    const double s = norm(t.S);
    const double d = norm(t.D);
    return inner(t.S, t.D) - cc.alpha * (s * s + d * d) + cc.beta;
  };
  auto check = [&](const BulkTriplet<Dim>& a, const BulkTriplet<Dim>& b, std::string& text) {
    const double sa = slack_of(a);
    const double sb = slack_of(b);
    const BulkTriplet<Dim>& w = sa <= sb ? a : b;
    const double v = std::min(sa, sb);
    if (v < 0.0) {
      text = "e=" + std::to_string(w.e) + " S=" + describe_tensor(w.S) + " D=" + describe_tensor(w.D) +
             " slack=" + std::to_string(v);
    }
    return v;
  };
  return run_pairs(label_for("bulk coercivity", k), cs, opt, sample, check);
}

template <int Dim>
PropertyResult check_wall_monotonicity(const CoefficientSet& cs, double k, const PropertyOptions& opt) {
  auto sample = [&](double e, std::mt19937_64& rng) {
    return k > 0.0 ? sample_regularized_wall<Dim>(cs, e, k, opt.radius, rng)
                   : sample_exact_wall<Dim>(cs, e, opt.radius, rng);
  };
  auto check = [&](const WallTriplet<Dim>& a, const WallTriplet<Dim>& b, std::string& text) {
    const double v = dot<Dim>(a.s - b.s, a.v_tau - b.v_tau);
    if (v < -opt.monotonicity_tol) {
      text = "e=" + std::to_string(a.e) + " s=" + describe(a.s) + " v=" + describe(a.v_tau) +
             " s'=" + describe(b.s) + " v'=" + describe(b.v_tau) + " (s-s').(v-v')=" + std::to_string(v);
    }
    return v + opt.monotonicity_tol;
  };
  return run_pairs(label_for("wall monotonicity", k), cs, opt, sample, check);
}

template <int Dim>
PropertyResult check_wall_coercivity(const CoefficientSet& cs, double k, const PropertyOptions& opt) {
  const CoercivityConstants cc = wall_coercivity_constants(cs);
  auto sample = [&](double e, std::mt19937_64& rng) {
    return k > 0.0 ? sample_regularized_wall<Dim>(cs, e, k, opt.radius, rng)
                   : sample_exact_wall<Dim>(cs, e, opt.radius, rng);
  };
  auto slack_of = [&](const WallTriplet<Dim>& t) {
    const double s = norm<Dim>(t.s);
    const double v = norm<Dim>(t.v_tau);
    return dot<Dim>(t.s, t.v_tau) - cc.alpha * (s * s + v * v) + cc.beta;
  };
  auto check = [&](const WallTriplet<Dim>& a, const WallTriplet<Dim>& b, std::string& text) {
    const double sa = slack_of(a);
    const double sb = slack_of(b);
    const WallTriplet<Dim>& w = sa <= sb ? a : b;
    const double v = std::min(sa, sb);
    if (v < 0.0) {
      text = "e=" + std::to_string(w.e) + " s=" + describe(w.s) + " v=" + describe(w.v_tau) +
             " slack=" + std::to_string(v);
    }
    return v;
  };
  return run_pairs(label_for("wall coercivity", k), cs, opt, sample, check);
}

template PropertyResult check_bulk_monotonicity<2>(const CoefficientSet&, double, const PropertyOptions&);
template PropertyResult check_bulk_monotonicity<3>(const CoefficientSet&, double, const PropertyOptions&);
template PropertyResult check_bulk_coercivity<2>(const CoefficientSet&, double, const PropertyOptions&);
template PropertyResult check_bulk_coercivity<3>(const CoefficientSet&, double, const PropertyOptions&);
template PropertyResult check_wall_monotonicity<2>(const CoefficientSet&, double, const PropertyOptions&);
template PropertyResult check_wall_monotonicity<3>(const CoefficientSet&, double, const PropertyOptions&);
template PropertyResult check_wall_coercivity<2>(const CoefficientSet&, double, const PropertyOptions&);
template PropertyResult check_wall_coercivity<3>(const CoefficientSet&, double, const PropertyOptions&);

}  // namespace actflow
