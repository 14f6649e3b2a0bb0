#include "doctest.h"

#include <cmath>

#include "actflow/bench.hpp"
#include "actflow/solver.hpp"

using namespace actflow;

TEST_CASE("Newtonian Poiseuille is a parabola on the slip value") {
  const PoiseuilleOracle o = poiseuille_bingham_slip_oracle(1.0, 1.0, 1.0, 0.0, 1.0);
  CHECK_FALSE(o.unyielded());
  CHECK(o.slip() == doctest::Approx(0.5));
  CHECK(o(0.0) == doctest::Approx(0.5));
  CHECK(o(0.3) == doctest::Approx(0.605));
  CHECK(o(0.5) == doctest::Approx(0.625));
  CHECK(o(0.7) == doctest::Approx(o(0.3)));
  CHECK(o.plug_half_width() == 0.0);
}

TEST_CASE("unyielded channel slides as one plug") {
  const PoiseuilleOracle o = poiseuille_bingham_slip_oracle(0.4, 1.0, 1.0, 0.2, 4.0);
  CHECK(o.unyielded());  // f H / 2 = 0.2 <= tau
  for (double y : {0.0, 0.1, 0.5, 0.93, 1.0}) CHECK(o(y) == doctest::Approx(0.05));
  CHECK(o.shear_rate(0.0) == 0.0);
}

TEST_CASE("yielded Bingham profile with slip") {
  // f = 1, tau = 0.1, gamma = 2: slip 0.25, plug |y - 1/2| <= 0.1,
  // u = 0.25 + 0.4 y - y^2 / 2 below the plug
  const PoiseuilleOracle o = poiseuille_bingham_slip_oracle(1.0, 1.0, 1.0, 0.1, 2.0);
  CHECK(o.plug_half_width() == doctest::Approx(0.1));
  CHECK(o(0.0) == doctest::Approx(0.25));
  CHECK(o(0.2) == doctest::Approx(0.31));
  CHECK(o(0.4) == doctest::Approx(0.33));
  CHECK(o(0.5) == doctest::Approx(0.33));
  CHECK(o(0.55) == doctest::Approx(0.33));
  CHECK(o(0.8) == doctest::Approx(0.31));
  CHECK(o.shear_rate(0.1) == doctest::Approx(0.3));
  CHECK(o.shear_rate(0.9) == doctest::Approx(-0.3));
  CHECK(o.shear_rate(0.45) == 0.0);
  CHECK_THROWS_AS(poiseuille_bingham_slip_oracle(1.0, 1.0, -1.0, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("oracle pairs lie on the bulk graph") {
  for (double tau : {0.0, 0.05, 0.1 / std::sqrt(2.0), 0.3, 0.6}) {
    for (double nu : {0.5, 1.0, 2.0}) {
      const PoiseuilleOracle o = poiseuille_bingham_slip_oracle(1.0, 1.0, nu, tau, 1.0);
      CHECK(poiseuille_membership_defect(o) <= 1e-10);
    }
  }
}

TEST_CASE("stick-slip oracle") {
  const double sigma2 = 0.5, gamma = 2.0;
  CHECK_FALSE(stickslip_couette_oracle(sigma2 / 2.0, gamma, sigma2).slipping);
  CHECK(stickslip_couette_oracle(sigma2 / 2.0, gamma, sigma2).slip == 0.0);
  CHECK(stickslip_couette_oracle(sigma2 + gamma, gamma, sigma2).slip == doctest::Approx(1.0));
  CHECK(stickslip_couette_oracle(-(sigma2 + gamma), gamma, sigma2).slip == doctest::Approx(-1.0));
  CHECK(stickslip_couette_oracle(0.8, gamma, 0.0).slip == doctest::Approx(0.4));
  CHECK_FALSE(stickslip_couette_oracle(sigma2, gamma, sigma2).slipping);
}

TEST_CASE("regime examples on the activated family") {
  const CoefficientSet cs = make_preset("activated");
  CHECK(classify_regime(cs.evaluate(0.5), 0.3) == Regime::kBingham);
  CHECK(classify_regime(cs.evaluate(1.0), 0.3) == Regime::kNewtonian);
  CHECK(classify_regime(cs.evaluate(2.0), 0.5) == Regime::kEulerInactive);
  CHECK(classify_regime(cs.evaluate(2.0), 1.5) == Regime::kViscousActive);
  // activations under the tolerance count as zero
  CHECK(classify_regime(cs.evaluate(0.98), 0.3, 0.05) == Regime::kNewtonian);
  CHECK(classify_regime(cs.evaluate(0.9), 0.3, 0.05) == Regime::kBingham);
  CHECK(to_string(Regime::kEulerInactive) == "EULER_INACTIVE");
}

TEST_CASE("regime flags of a resting state follow the cell energy") {
  const Grid g{1.0, 1.0, 4, 4, Boundary::kPeriodic, Boundary::kWall};
  FlowState s = FlowState::zeros(g, 0.5);
  s.e(1, 1) = 1.0;
  s.e(2, 2) = 2.0;
  const std::vector<Regime> f = regime_flags(s, make_preset("activated"), g);
  CHECK(f[0] == Regime::kBingham);
  CHECK(f[5] == Regime::kNewtonian);
  CHECK(f[10] == Regime::kEulerInactive);
}

TEST_CASE("sequence matching") {
  using R = Regime;
  const std::vector<R> pat{R::kBingham, R::kNewtonian, R::kEulerInactive};
  CHECK(follows_sequence({R::kBingham, R::kBingham, R::kNewtonian, R::kEulerInactive}, pat));
  CHECK(follows_sequence({R::kBingham, R::kNewtonian, R::kViscousActive, R::kEulerInactive}, pat));
  CHECK_FALSE(follows_sequence({R::kBingham, R::kEulerInactive}, pat));
  CHECK_FALSE(follows_sequence({R::kNewtonian, R::kBingham, R::kEulerInactive}, pat));
  CHECK_FALSE(follows_sequence({R::kBingham, R::kNewtonian, R::kBingham, R::kEulerInactive}, pat));
  CHECK(follows_sequence({R::kBingham, R::kNewtonian, R::kBingham, R::kNewtonian, R::kEulerInactive}, pat));
  CHECK(follows_sequence({R::kNewtonian}, {}));
}

TEST_CASE("hysteresis sweep examples") {
  std::vector<double> D, e;
  loop_path(0.5, 2.0, 2.0, 4, D, e);
  REQUIRE(D.size() == 16);
  CHECK(D.front() == 0.0);
  CHECK(e.front() == 0.5);
  CHECK(D[4] == 2.0);
  CHECK(e[8] == 2.0);

  const HysteresisTrace loop = hysteresis_sweep(make_preset("activated"), D, e);
  // at |D| = 2: 2 |D| + 0.5 on the way up, 2 (|D| - 1) on the way down
  CHECK(loop.points[4].S == doctest::Approx(4.5));
  CHECK(loop.points[8].S == doctest::Approx(2.0));
  CHECK(loop.separation == doctest::Approx(2.5));
  CHECK(loop.area > 0.0);

  const HysteresisTrace newt = hysteresis_sweep(make_preset("newtonian"), D, e);
  CHECK(newt.separation == 0.0);
  CHECK(newt.area == 0.0);

  // constant energy: there and back again on one curve
  std::vector<double> Dc{0.0, 0.5, 1.0, 1.5, 1.0, 0.5, 0.0}, ec(7, 0.7);
  const HysteresisTrace same = hysteresis_sweep(make_preset("activated"), Dc, ec);
  CHECK(same.separation == 0.0);
  CHECK(same.area == doctest::Approx(0.0).scale(1e-14));
  CHECK(same.points[1].S == same.points[5].S);
  CHECK(loop.csv().rfind("index,D,e,S\n", 0) == 0);
  CHECK_THROWS(hysteresis_sweep(make_preset("newtonian"), {0.0, 1.0}, {1.0}));
}

TEST_CASE("profile comparison against the oracle") {
  const SimConfig cfg = poiseuille_config(16, 64);
  const PoiseuilleOracle o = oracle_for(cfg);
  CHECK(o.tau == doctest::Approx(0.1 / std::sqrt(2.0)));
  const Grid& g = cfg.grid;
  FlowState s = FlowState::zeros(g, 1.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) s.u(i, j) = o((j + 0.5) * g.hy());
  }
  ProfileComparison c = compare_profile(s, g, o);
  CHECK(c.rel_l2 < 1e-14);
  CHECK(c.y.size() == 16);
  CHECK(c.csv().rfind("y,u_numeric,u_oracle,abs_err\n", 0) == 0);
  s.u.a[3] += 0.1;
  c = compare_profile(s, g, o);
  CHECK(c.rel_l2 > 0.0);

  const std::vector<char> plug = plug_rows(g, o, 0);
  int n = 0;
  for (char p : plug) n += p;
  CHECK(n == 2);  // plug half width 0.0707 covers two rows of height 1/16
}

TEST_CASE("scenario registry") {
  const std::vector<std::string> names = scenario_names();
  CHECK(names.size() == 7);
  CHECK(std::find(names.begin(), names.end(), "poiseuille_bingham") != names.end());
  CHECK_THROWS_AS(run_scenario("nope"), std::invalid_argument);
  const ScenarioReport r = run_scenario("hysteresis_loop");
  CHECK(r.passed);
  CHECK(r.metric("separation") == doctest::Approx(2.5));
  CHECK_THROWS_AS(r.metric("nope"), std::out_of_range);
}

TEST_CASE("stick-slip cases on either side of the threshold") {
  const StickSlipCase stick = run_stickslip_case(0.5);
  CHECK(stick.steady);
  CHECK(stick.wall_shear == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(std::abs(stick.slip) < 1e-6);

  const StickSlipCase slip = run_stickslip_case(2.0);
  CHECK(slip.steady);
  CHECK(slip.oracle_slip == doctest::Approx(0.5));
  CHECK(slip.slip == doctest::Approx(slip.oracle_slip).epsilon(0.02));
}
