#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "actflow/pressure.hpp"

using namespace actflow;

namespace {

constexpr double kPi = std::numbers::pi;

const Grid kG{1.0, 1.0, 24, 20, Boundary::kPeriodic, Boundary::kWall};

Field2D manufactured(const Grid& g) {
  Field2D p = make_cell_field(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = (i + 0.5) * g.hx(), y = (j + 0.5) * g.hy();
      p(i, j) = std::cos(2.0 * kPi * x / g.Lx) + 0.5 * std::cos(kPi * y / g.Ly);
    }
  }
  remove_mean(p);
  return p;
}

}  // namespace

TEST_CASE("default epsilon scales with h^2") {
  CHECK(default_epsilon(Grid{1.0, 1.0, 32, 32}) == doctest::Approx(9.765625e-8));
  CHECK(default_epsilon(Grid{2.0, 1.0, 16, 32}) == doctest::Approx(1e-4 / 1024.0));
}

TEST_CASE("zero rhs gives zero pressure") {
  PressureProblem prob;
  prob.rhs = make_cell_field(kG);
  PressureStats st;
  const Field2D p = solve_pressure(prob, kG, &st);
  CHECK(max_abs(p) == 0.0);
  CHECK(st.iterations == 0);
}

TEST_CASE("apply then solve recovers the manufactured pressure") {
  for (double eps : {1e-4, 1.0}) {
    const Field2D pstar = manufactured(kG);
    PressureProblem prob;
    prob.epsilon = eps;
    prob.solver_tol = 1e-12;
    prob.rhs = neumann_laplacian_apply(pstar, kG);
    for (double& x : prob.rhs.a) x *= eps;
    PressureStats st;
    const Field2D p = solve_pressure(prob, kG, &st);
    double err = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) err = std::max(err, std::abs(p.a[n] - pstar.a[n]));
    CHECK(err < 1e-9);
    CHECK(std::abs(mean(p)) <= 1e-12);
    CHECK(st.residual <= prob.solver_tol * st.rhs_norm);
  }
}

TEST_CASE("constant rhs is incompatible") {
  PressureProblem prob;
  prob.rhs = make_cell_field(kG, 0.3);
  CHECK_THROWS_AS(solve_pressure(prob, kG), IncompatibleRHS);
  prob.rhs = make_cell_field(kG, 1e-9);
  prob.rhs(0, 0) = 0.0;
  CHECK_NOTHROW(solve_pressure(prob, kG));
}

TEST_CASE("bad problems are rejected") {
  PressureProblem prob;
  prob.rhs = make_cell_field(kG);
  prob.epsilon = 0.0;
  CHECK_THROWS_AS(solve_pressure(prob, kG), std::invalid_argument);
  prob.epsilon = 1.0;
  prob.rhs = Field2D(3, 3);
  CHECK_THROWS_AS(solve_pressure(prob, kG), std::invalid_argument);
}

TEST_CASE("iteration cap reports NoConvergence") {
  PressureProblem prob;
  prob.rhs = neumann_laplacian_apply(manufactured(kG), kG);
  prob.max_iter = 2;
  prob.epsilon = 1.0;
  try {
    solve_pressure(prob, kG);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.iterations == 2);
    CHECK(e.residual > 0.0);
  }
}

TEST_CASE("solution does not depend on a constant shift of the guess") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  PressureProblem prob;
  prob.epsilon = 1e-3;
  prob.solver_tol = 1e-12;
  prob.rhs = make_cell_field(kG);
  for (double& x : prob.rhs.a) x = d(rng);
  remove_mean(prob.rhs);
  Field2D guess = make_cell_field(kG);
  for (double& x : guess.a) x = d(rng);
  Field2D shifted = guess;
  for (double& x : shifted.a) x += 5.0;
  const Field2D a = solve_pressure(prob, kG, nullptr, &guess);
  const Field2D b = solve_pressure(prob, kG, nullptr, &shifted);
  const Field2D c = solve_pressure(prob, kG);
  for (std::size_t n = 0; n < a.size(); ++n) {
    CHECK(a.a[n] == doctest::Approx(b.a[n]).epsilon(1e-8).scale(1.0));
    CHECK(a.a[n] == doctest::Approx(c.a[n]).epsilon(1e-8).scale(1.0));
  }
  CHECK(std::abs(mean(a)) <= 1e-12);
}

TEST_CASE("fully periodic box") {
  const Grid g{1.0, 1.0, 16, 16, Boundary::kPeriodic, Boundary::kPeriodic};
  Field2D pstar = make_cell_field(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) pstar(i, j) = std::sin(2.0 * kPi * (j + 0.5) * g.hy());
  }
  remove_mean(pstar);
  PressureProblem prob;
  prob.epsilon = 1.0;
  prob.solver_tol = 1e-12;
  prob.rhs = neumann_laplacian_apply(pstar, g);
  const Field2D p = solve_pressure(prob, g);
  for (std::size_t n = 0; n < p.size(); ++n) CHECK(std::abs(p.a[n] - pstar.a[n]) < 1e-9);
}
