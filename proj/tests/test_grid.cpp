#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "actflow/grid.hpp"

using namespace actflow;

namespace {

constexpr double kPi = std::numbers::pi;

const Grid kChannel{2.0, 1.0, 16, 12, Boundary::kPeriodic, Boundary::kWall};

double face_inner(const Field2D& a, const Field2D& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a.a[n] * b.a[n];
  return s;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(kChannel.validate());
  CHECK_THROWS_AS((Grid{1.0, 1.0, 3, 8}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Grid{-1.0, 1.0, 8, 8}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Grid{1.0, 1.0, 8, 8, Boundary::kWall, Boundary::kWall}.validate()), std::invalid_argument);
  CHECK(boundary_from_string("wall") == Boundary::kWall);
  CHECK_THROWS(boundary_from_string("slab"));
  CHECK(kChannel.nvy() == 13);
  CHECK(Grid{1.0, 1.0, 8, 8, Boundary::kPeriodic, Boundary::kPeriodic}.nvy() == 8);
}

TEST_CASE("sym_gradient of constant and linear shear") {
  FlowState s = FlowState::zeros(kChannel);
  s.u.fill(0.7);
  s.v.fill(0.0);
  TensorField d = sym_gradient(s, kChannel);
  for (std::size_t n = 0; n < d.xx.size(); ++n) {
    CHECK(d.xx.a[n] == 0.0);
    CHECK(d.yy.a[n] == 0.0);
    CHECK(d.xy.a[n] == 0.0);
  }
  const double hy = kChannel.hy();
  for (int j = 0; j < kChannel.ny; ++j) {
    for (int i = 0; i < kChannel.nx; ++i) s.u(i, j) = (j + 0.5) * hy;
  }
  d = sym_gradient(s, kChannel);
  for (std::size_t n = 0; n < d.xy.size(); ++n) {
    CHECK(d.xy.a[n] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.xx.a[n] == 0.0);
  }
}

TEST_CASE("sym_gradient converges at second order") {
  double err[2];
  int c = 0;
  for (int n : {16, 32}) {
    const Grid g{1.0, 1.0, n, n, Boundary::kPeriodic, Boundary::kWall};
    FlowState s = FlowState::zeros(g);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) s.u(i, j) = std::sin(2.0 * kPi * i * g.hx());
    }
    const TensorField d = sym_gradient(s, g);
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        e = std::max(e, std::abs(d.xx(i, j) - 2.0 * kPi * std::cos(2.0 * kPi * (i + 0.5) * g.hx())));
      }
    }
    err[c++] = e;
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("divergence examples") {
  FlowState uniform = FlowState::zeros(kChannel);
  uniform.u.fill(1.5);
  for (double x : divergence(uniform, kChannel).a) CHECK(x == 0.0);

  // u = x on faces: divergence 1 away from the periodic seam
  FlowState lin = FlowState::zeros(kChannel);
  for (int j = 0; j < kChannel.ny; ++j) {
    for (int i = 0; i < kChannel.nx; ++i) lin.u(i, j) = i * kChannel.hx();
  }
  const Field2D d = divergence(lin, kChannel);
  for (int j = 0; j < kChannel.ny; ++j) {
    for (int i = 0; i + 1 < kChannel.nx; ++i) CHECK(d(i, j) == doctest::Approx(1.0));
  }
}

TEST_CASE("stream function velocity is discretely divergence free") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field2D psi = make_corner_field(kChannel);
  for (double& x : psi.a) x = dist(rng);
  for (int i = 0; i < kChannel.nx; ++i) {
    psi(i, 0) = 0.3;
    psi(i, kChannel.ny) = -0.2;
  }
  Field2D u, v;
  velocity_from_stream(psi, kChannel, u, v);
  for (double x : divergence(u, v, kChannel).a) CHECK(std::abs(x) <= 1e-13);
  for (int i = 0; i < kChannel.nx; ++i) {
    CHECK(v(i, 0) == 0.0);
    CHECK(v(i, kChannel.ny) == 0.0);
  }
}

TEST_CASE("neumann laplacian examples") {
  for (double x : neumann_laplacian_apply(make_cell_field(kChannel, 3.0), kChannel).a) CHECK(x == 0.0);

  // Fourier symbol of the 5-point stencil, and O(h^2) to the continuous one
  const Grid g{1.5, 1.0, 24, 10, Boundary::kPeriodic, Boundary::kWall};
  Field2D f = make_cell_field(g);
  const double kx = 2.0 * kPi / g.Lx;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) f(i, j) = std::cos(kx * (i + 0.5) * g.hx());
  }
  const Field2D lf = neumann_laplacian_apply(f, g);
  const double symbol = (2.0 * std::cos(kx * g.hx()) - 2.0) / (g.hx() * g.hx());
  for (std::size_t n = 0; n < f.size(); ++n) {
    CHECK(lf.a[n] == doctest::Approx(symbol * f.a[n]).epsilon(1e-10).scale(1.0));
    CHECK(std::abs(lf.a[n] + kx * kx * f.a[n]) <= 0.01 * kx * kx);
  }

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& x : f.a) x = dist(rng);
  double sum = 0.0;
  for (double x : neumann_laplacian_apply(f, g).a) sum += x;
  CHECK(std::abs(sum) <= 1e-12 * g.nx * g.ny / (g.hx() * g.hx()));
}

TEST_CASE("summation by parts between divergence and gradient") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (const Grid& g : {kChannel, Grid{1.0, 2.0, 8, 10, Boundary::kPeriodic, Boundary::kPeriodic}}) {
    Field2D u = make_u_field(g), v = make_v_field(g), q = make_cell_field(g);
    for (double& x : u.a) x = dist(rng);
    for (double& x : v.a) x = dist(rng);
    for (double& x : q.a) x = dist(rng);
    if (g.y_walls()) {
      for (int i = 0; i < g.nx; ++i) v(i, 0) = v(i, g.ny) = 0.0;
    }
    Field2D gu, gv;
    gradient(q, g, gu, gv);
    const double lhs = face_inner(divergence(u, v, g), q);
    const double rhs = -(face_inner(u, gu) + face_inner(v, gv));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("operators are linear") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field2D a = make_cell_field(kChannel), b = make_cell_field(kChannel), ab = make_cell_field(kChannel);
  for (double& x : a.a) x = dist(rng);
  for (double& x : b.a) x = dist(rng);
  for (std::size_t n = 0; n < ab.size(); ++n) ab.a[n] = a.a[n] + 2.0 * b.a[n];
  const Field2D la = neumann_laplacian_apply(a, kChannel), lb = neumann_laplacian_apply(b, kChannel),
                lab = neumann_laplacian_apply(ab, kChannel);
  for (std::size_t n = 0; n < ab.size(); ++n) {
    CHECK(lab.a[n] == doctest::Approx(la.a[n] + 2.0 * lb.a[n]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("norms and means") {
  const Grid g{2.0, 1.0, 4, 4, Boundary::kPeriodic, Boundary::kWall};
  Field2D f = make_cell_field(g, 3.0);
  CHECK(integrate(f, g) == doctest::Approx(6.0));
  CHECK(mean(f) == doctest::Approx(3.0));
  CHECK(l2_norm(f, g) == doctest::Approx(std::sqrt(18.0)));
  remove_mean(f);
  CHECK(max_abs(f) == 0.0);
  f(1, 1) = NAN;
  CHECK_FALSE(all_finite(f));
  CHECK(velocity_l2(make_u_field(g, 1.0), make_v_field(g), g) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("snapshot round trip and corrupt files") {
  const auto dir = std::filesystem::temp_directory_path() / "actflow_test_grid";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "s.bin").string();

  FlowState s = FlowState::zeros(kChannel, 1.25);
  s.t = 0.375;
  s.u(3, 4) = -2.5;
  s.v(1, 5) = 1e-300;
  s.p(0, 0) = 7.0;
  write_snapshot(path, s, kChannel);
  Grid g;
  const FlowState back = read_snapshot(path, g);
  CHECK(g == kChannel);
  CHECK(back == s);

  std::ofstream(dir / "bad.bin") << "NOTASNAPSHOT";
  CHECK_THROWS_AS(read_snapshot((dir / "bad.bin").string(), g), SnapshotError);
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  }
  CHECK_THROWS_AS(read_snapshot((dir / "short.bin").string(), g), SnapshotError);
  CHECK_THROWS_AS(read_snapshot((dir / "missing.bin").string(), g), SnapshotError);

  std::ostringstream csv;
  write_snapshot_csv(csv, s, kChannel);
  CHECK(csv.str().rfind("x,y,u,v,p,e\n", 0) == 0);
  std::filesystem::remove_all(dir);
}
