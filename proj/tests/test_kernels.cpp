#include "doctest.h"

#include <cmath>
#include <random>

#include "actflow/kernels.hpp"

using namespace actflow;

namespace {

void randomize(Field2D& f, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  for (double& x : f.a) x = d(rng);
}

void zero_wall_rows(Field2D& v, const Grid& g) {
  if (!g.y_walls()) return;
  for (int i = 0; i < g.nx; ++i) v(i, 0) = v(i, g.ny) = 0.0;
}

ViscousCoeffs random_coeffs(const Grid& g, std::mt19937_64& rng) {
  ViscousCoeffs c = make_viscous_coeffs(g);
  randomize(c.cell, rng, 0.1, 3.0);
  randomize(c.corner, rng, 0.1, 3.0);
  std::uniform_real_distribution<double> d(0.0, 2.0);
  for (double& w : c.wall_lo) w = d(rng);
  for (double& w : c.wall_hi) w = d(rng);
  return c;
}

double inner(const Field2D& a, const Field2D& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a.a[n] * b.a[n];
  return s;
}

const Grid kWalls{1.0, 0.7, 12, 9, Boundary::kPeriodic, Boundary::kWall};
const Grid kTorus{1.3, 1.0, 10, 8, Boundary::kPeriodic, Boundary::kPeriodic};

}  // namespace

TEST_CASE("laplacian stencil on a single spike") {
  const Grid g{1.0, 1.0, 4, 4, Boundary::kPeriodic, Boundary::kWall};
  Field2D f = make_cell_field(g);
  f(1, 1) = 1.0;
  Field2D out;
  ref::laplacian(g, f, out);
  CHECK(out(1, 1) == doctest::Approx(-64.0));
  CHECK(out(0, 1) == doctest::Approx(16.0));
  CHECK(out(1, 2) == doctest::Approx(16.0));
  CHECK(out(3, 3) == 0.0);

  // next to the wall one flux is missing
  f.fill(0.0);
  f(0, 0) = 1.0;
  ref::laplacian(g, f, out);
  CHECK(out(0, 0) == doctest::Approx(-48.0));
  CHECK(out(3, 0) == doctest::Approx(16.0));  // periodic neighbour
}

TEST_CASE("reference and OpenMP kernels agree") {
  std::mt19937_64 rng(7);
  for (const Grid& g : {kWalls, kTorus}) {
    Field2D p = make_cell_field(g), u = make_u_field(g), v = make_v_field(g);
    Field2D au = make_u_field(g), av = make_v_field(g);
    randomize(p, rng);
    randomize(u, rng);
    randomize(v, rng);
    randomize(au, rng);
    randomize(av, rng);
    zero_wall_rows(v, g);
    zero_wall_rows(av, g);
    const ViscousCoeffs c = random_coeffs(g, rng);

    Field2D r1, r2, s1, s2, t1, t2;
    ref::laplacian(g, p, r1);
    par::laplacian(g, p, r2);
    CHECK(r1 == r2);
    ref::divergence(g, u, v, r1);
    par::divergence(g, u, v, r2);
    CHECK(r1 == r2);
    ref::gradient(g, p, r1, s1);
    par::gradient(g, p, r2, s2);
    CHECK(r1 == r2);
    CHECK(s1 == s2);

    r1 = make_cell_field(g);
    s1 = make_cell_field(g);
    t1 = make_corner_field(g);
    r2 = r1;
    s2 = s1;
    t2 = t1;
    ref::strain(g, u, v, r1, s1, t1);
    par::strain(g, u, v, r2, s2, t2);
    CHECK(r1 == r2);
    CHECK(s1 == s2);
    CHECK(t1 == t2);

    ref::viscous_apply(g, c, u, v, r1, s1);
    par::viscous_apply(g, c, u, v, r2, s2);
    for (std::size_t n = 0; n < r1.size(); ++n) CHECK(r1.a[n] == doctest::Approx(r2.a[n]).epsilon(1e-14));
    for (std::size_t n = 0; n < s1.size(); ++n) CHECK(s1.a[n] == doctest::Approx(s2.a[n]).epsilon(1e-14));

    ref::convection(g, au, av, u, v, r1, s1);
    par::convection(g, au, av, u, v, r2, s2);
    for (std::size_t n = 0; n < r1.size(); ++n) CHECK(r1.a[n] == doctest::Approx(r2.a[n]).epsilon(1e-14));
    for (std::size_t n = 0; n < s1.size(); ++n) CHECK(s1.a[n] == doctest::Approx(s2.a[n]).epsilon(1e-14));
  }
}

TEST_CASE("blocked dot matches the serial sum") {
  std::mt19937_64 rng(3);
  std::vector<double> a(10007), b(10007);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  CHECK(par::dot(a, b) == doctest::Approx(ref::dot(a, b)).epsilon(1e-12));
  std::vector<double> y1 = b, y2 = b;
  ref::axpy(0.3, a, y1);
  par::axpy(0.3, a, y2);
  CHECK(y1 == y2);
}

TEST_CASE("viscous operator is symmetric and nonnegative") {
  std::mt19937_64 rng(11);
  for (const Grid& g : {kWalls, kTorus}) {
    const ViscousCoeffs c = random_coeffs(g, rng);
    Field2D u1 = make_u_field(g), v1 = make_v_field(g), u2 = make_u_field(g), v2 = make_v_field(g);
    randomize(u1, rng);
    randomize(v1, rng);
    randomize(u2, rng);
    randomize(v2, rng);
    zero_wall_rows(v1, g);
    zero_wall_rows(v2, g);
    Field2D ku1, kv1, ku2, kv2;
    par::viscous_apply(g, c, u1, v1, ku1, kv1);
    par::viscous_apply(g, c, u2, v2, ku2, kv2);
    const double a = inner(ku1, u2) + inner(kv1, v2);
    const double b = inner(u1, ku2) + inner(v1, kv2);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(inner(ku1, u1) + inner(kv1, v1) > 0.0);
  }
}

TEST_CASE("constant velocity is in the kernel of the bulk operator") {
  ViscousCoeffs c = make_viscous_coeffs(kTorus, 2.0);
  const Field2D u = make_u_field(kTorus, 0.4), v = make_v_field(kTorus, -1.1);
  Field2D ku, kv;
  par::viscous_apply(kTorus, c, u, v, ku, kv);
  for (double x : ku.a) CHECK(std::abs(x) < 1e-12);
  for (double x : kv.a) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("skew convection is energy neutral for any transport field") {
  std::mt19937_64 rng(5);
  for (const Grid& g : {kWalls, kTorus}) {
    for (int trial = 0; trial < 5; ++trial) {
      Field2D u = make_u_field(g), v = make_v_field(g), au = make_u_field(g), av = make_v_field(g);
      randomize(u, rng);
      randomize(v, rng);
      randomize(au, rng, -3.0, 3.0);
      randomize(av, rng, -3.0, 3.0);
      zero_wall_rows(v, g);
      zero_wall_rows(av, g);
      Field2D cu, cv;
      par::convection(g, au, av, u, v, cu, cv);
      const double scale = std::sqrt(inner(cu, cu) + inner(cv, cv)) * std::sqrt(inner(u, u) + inner(v, v));
      CHECK(std::abs(inner(cu, u) + inner(cv, v)) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("convection of a uniform field by a uniform stream vanishes") {
  const Field2D au = make_u_field(kTorus, 0.8), av = make_v_field(kTorus, 0.3);
  const Field2D u = make_u_field(kTorus, 1.0), v = make_v_field(kTorus, 2.0);
  Field2D cu, cv;
  par::convection(kTorus, au, av, u, v, cu, cv);
  for (double x : cu.a) CHECK(std::abs(x) < 1e-13);
  for (double x : cv.a) CHECK(std::abs(x) < 1e-13);
}
