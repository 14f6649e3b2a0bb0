#include "doctest.h"

#include <random>

#include "actflow/coefficients.hpp"

using namespace actflow;

TEST_CASE("activated family evaluates clamp values") {
  const CoefficientSet cs = make_preset("activated");
  CoefficientValues c = evaluate_coefficients(cs, 2.0);
  CHECK(c.tau1 == 1.0);
  CHECK(c.tau2 == 0.0);
  c = evaluate_coefficients(cs, 1.0);
  CHECK(c.tau1 == 0.0);
  CHECK(c.tau2 == 0.0);
  c = evaluate_coefficients(cs, 0.5);
  CHECK(c.tau1 == 0.0);
  CHECK(c.tau2 == 0.5);
  CHECK(c.nu == 1.0);
  CHECK(c.gamma == 1.0);
  CHECK(c.kappa == 1.0);
}

TEST_CASE("constant extension beyond breakpoints") {
  const CoefficientSet cs = make_preset("activated");
  CHECK(cs.tau1(-100.0) == 0.0);
  CHECK(cs.tau1(100.0) == 1.0);
  CHECK(cs.tau2(-100.0) == 1.0);
  CHECK(cs.tau2(100.0) == 0.0);
}

TEST_CASE("clamp_ramp matches the closed form") {
  const PiecewiseLinear up = PiecewiseLinear::clamp_ramp(1.0, 1.0, 1.0);
  const PiecewiseLinear down = PiecewiseLinear::clamp_ramp(1.0, -1.0, 1.0);
  for (double e = -2.0; e <= 4.0; e += 0.125) {
    CHECK(up(e) == doctest::Approx(std::max(0.0, std::min(1.0, e - 1.0))));
    CHECK(down(e) == doctest::Approx(std::max(0.0, std::min(1.0, 1.0 - e))));
  }
}

TEST_CASE("piecewise-linear table rejects bad input") {
  CHECK_THROWS_AS(PiecewiseLinear({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinear({0.0, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinear({1.0, 1.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinear({0.0, std::nan("")}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("activated family validates clean") {
  const ValidationReport r = validate(make_preset("activated"), 1000);
  CHECK(r.ok());
  CHECK(r.samples_checked > 1000);
}

TEST_CASE("every preset validates") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    CHECK(validate(make_preset(name), 200).ok());
  }
  CHECK_THROWS_AS(make_preset("no_such_family"), UnknownPreset);
}

TEST_CASE("overlapping activations violate the product condition everywhere") {
  CoefficientSet cs;
  cs.tau1 = PiecewiseLinear::constant(0.5);
  cs.tau2 = PiecewiseLinear::constant(0.5);
  const ValidationReport r = validate(cs, 50);
  std::size_t products = 0;
  bool overlap = false;
  for (const auto& v : r.violations) {
    if (v.kind == ViolationKind::kBulkProduct) {
      ++products;
      CHECK(v.value == doctest::Approx(0.25));
    }
    if (v.kind == ViolationKind::kOverlappingSupport) overlap = true;
  }
  CHECK(products == r.samples_checked);
  CHECK(overlap);
  CHECK_FALSE(r.ok());
}

TEST_CASE("zero viscosity violates the lower bound") {
  CoefficientSet cs;
  cs.nu = PiecewiseLinear::constant(0.0);
  const ValidationReport r = validate(cs, 10);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().kind == ViolationKind::kMaterialBound);
  CHECK(r.violations.front().function == "nu");
  CHECK(r.summary().find("material-bound") != std::string::npos);
}

TEST_CASE("activation above c0 is reported with its argument") {
  CoefficientSet cs;
  cs.sigma2 = PiecewiseLinear({0.0, 1.0}, {0.0, 3.0});
  const ValidationReport r = validate(cs, 10);
  bool found = false;
  for (const auto& v : r.violations) {
    if (v.kind == ViolationKind::kActivationBound && v.function == "sigma2") {
      found = true;
      CHECK(v.value > cs.c0);
      CHECK(cs.sigma2(v.argument) == v.value);
    }
  }
  CHECK(found);
}

TEST_CASE("supports touching at a shared zero breakpoint are disjoint") {
  CoefficientSet cs;
  cs.sigma1 = PiecewiseLinear({0.0, 1.0}, {0.5, 0.0});
  cs.sigma2 = PiecewiseLinear({1.0, 2.0}, {0.0, 0.5});
  CHECK(validate(cs, 100).ok());
  // ramps that cross between samples are caught by the support check
  cs.sigma2 = PiecewiseLinear({0.999, 2.0}, {0.0, 0.5});
  const ValidationReport r = validate(cs, 2, 3);
  bool overlap = false;
  for (const auto& v : r.violations) overlap |= v.kind == ViolationKind::kOverlappingSupport;
  CHECK(overlap);
}

TEST_CASE("sample_count below two is reported, not thrown") {
  const ValidationReport r = validate(make_preset("newtonian"), 1);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::kBadConstants);
}

TEST_CASE("bounds hold exactly on random arguments") {
  const CoefficientSet cs = make_preset("activated");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int i = 0; i < 100000; ++i) {
    const CoefficientValues c = cs.evaluate(dist(rng));
    REQUIRE(c.tau1 >= 0.0);
    REQUIRE(c.tau1 <= cs.c0);
    REQUIRE(c.tau2 >= 0.0);
    REQUIRE(c.tau2 <= cs.c0);
    REQUIRE(c.tau1 * c.tau2 == 0.0);
  }
}
