#include "actflow/grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>

#include "actflow/kernels.hpp"

namespace actflow {

std::string to_string(Boundary b) { return b == Boundary::kWall ? "wall" : "periodic"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "wall") return Boundary::kWall;
  if (s == "periodic") return Boundary::kPeriodic;
  throw std::invalid_argument("boundary must be 'wall' or 'periodic', got '" + s + "'");
}

void Grid::validate() const {
  if (nx < 4 || ny < 4) throw std::invalid_argument("grid needs nx, ny >= 4");
  if (!(Lx > 0.0) || !(Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly)) {
    throw std::invalid_argument("grid lengths must be positive and finite");
  }
  if (x_boundary != Boundary::kPeriodic) {
    throw std::invalid_argument("only x-periodic channels are supported");
  }
}

Field2D make_cell_field(const Grid& g, double value) { return Field2D(g.nx, g.ny, value); }
Field2D make_u_field(const Grid& g, double value) { return Field2D(g.nx, g.ny, value); }
Field2D make_v_field(const Grid& g, double value) {
  Field2D f(g.nx, g.nvy(), value);
  if (g.y_walls()) {
    for (int i = 0; i < g.nx; ++i) f(i, 0) = f(i, g.ny) = 0.0;
  }
  return f;
}
Field2D make_corner_field(const Grid& g, double value) { return Field2D(g.nx, g.nvy(), value); }

FlowState FlowState::zeros(const Grid& g, double e0) {
  FlowState s;
  s.u = make_u_field(g);
  s.v = make_v_field(g);
  s.p = make_cell_field(g);
  s.e = make_cell_field(g, e0);
  return s;
}

bool FlowState::consistent_with(const Grid& g) const {
  return u.nx == g.nx && u.ny == g.ny && v.nx == g.nx && v.ny == g.nvy() && p.nx == g.nx && p.ny == g.ny &&
         e.nx == g.nx && e.ny == g.ny;
}

TensorField sym_gradient(const FlowState& s, const Grid& g) {
  Field2D dxx;
  Field2D dyy;
  Field2D dxy;
  par::strain(g, s.u, s.v, dxx, dyy, dxy);
  if (g.y_walls()) {
    // one-sided shear at the walls, exact for affine profiles
    for (int i = 0; i < g.nx; ++i) {
      dxy(i, 0) = 0.5 * (s.u(i, 1) - s.u(i, 0)) / g.hy();
      dxy(i, g.ny) = 0.5 * (s.u(i, g.ny - 1) - s.u(i, g.ny - 2)) / g.hy();
    }
  }
  TensorField t{dxx, dyy, make_cell_field(g)};
  for (int j = 0; j < g.ny; ++j) {
    const int jn = g.y_walls() ? j + 1 : (j + 1) % g.ny;
    for (int i = 0; i < g.nx; ++i) {
      const int ie = (i + 1) % g.nx;
      t.xy(i, j) = 0.25 * (dxy(i, j) + dxy(ie, j) + dxy(i, jn) + dxy(ie, jn));
    }
  }
  return t;
}

Field2D divergence(const Field2D& u, const Field2D& v, const Grid& g) {
  Field2D out;
  par::divergence(g, u, v, out);
  return out;
}

Field2D divergence(const FlowState& s, const Grid& g) { return divergence(s.u, s.v, g); }

void gradient(const Field2D& p, const Grid& g, Field2D& gu, Field2D& gv) { par::gradient(g, p, gu, gv); }

Field2D neumann_laplacian_apply(const Field2D& f, const Grid& g) {
  Field2D out;
  par::laplacian(g, f, out);
  return out;
}

double integrate(const Field2D& f, const Grid& g) {
  double s = 0.0;
  for (double x : f.a) s += x;
  return s * g.cell_area();
}

double mean(const Field2D& f) {
  if (f.a.empty()) return 0.0;
  double s = 0.0;
  for (double x : f.a) s += x;
  return s / static_cast<double>(f.a.size());
}

void remove_mean(Field2D& f) {
  const double m = mean(f);
  for (double& x : f.a) x -= m;
}

double l2_norm(const Field2D& f, const Grid& g) { return std::sqrt(par::dot(f.a, f.a) * g.cell_area()); }

double velocity_l2(const Field2D& u, const Field2D& v, const Grid& g) {
  return std::sqrt((par::dot(u.a, u.a) + par::dot(v.a, v.a)) * g.cell_area());
}

double max_abs(const Field2D& f) {
  double m = 0.0;
  for (double x : f.a) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const Field2D& f) {
  for (double x : f.a) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void velocity_from_stream(const Field2D& psi, const Grid& g, Field2D& u, Field2D& v) {
  u = make_u_field(g);
  v = make_v_field(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jn = g.y_walls() ? j + 1 : (j + 1) % g.ny;
    for (int i = 0; i < g.nx; ++i) u(i, j) = (psi(i, jn) - psi(i, j)) / g.hy();
  }
  for (int j = 0; j < g.nvy(); ++j) {
    for (int i = 0; i < g.nx; ++i) v(i, j) = -(psi((i + 1) % g.nx, j) - psi(i, j)) / g.hx();
  }
}

namespace {

constexpr char kMagic[8] = {'A', 'F', 'S', 'N', 'A', 'P', '0', '1'};

template <typename T>
void put(std::ofstream& os, T x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T x{};
  is.read(reinterpret_cast<char*>(&x), sizeof(T));
  if (!is) throw SnapshotError("snapshot truncated");
  return x;
}

void put_field(std::ofstream& os, const Field2D& f) {
  os.write(reinterpret_cast<const char*>(f.a.data()), static_cast<std::streamsize>(f.a.size() * sizeof(double)));
}

void get_field(std::ifstream& is, Field2D& f) {
  is.read(reinterpret_cast<char*>(f.a.data()), static_cast<std::streamsize>(f.a.size() * sizeof(double)));
  if (!is) throw SnapshotError("snapshot truncated");
}

}  // namespace

void write_snapshot(const std::string& path, const FlowState& s, const Grid& g) {
  if (!s.consistent_with(g)) throw SnapshotError("state does not match grid");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("cannot open '" + path + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  put<std::int32_t>(os, g.nx);
  put<std::int32_t>(os, g.ny);
  put<std::int32_t>(os, g.y_walls() ? 1 : 0);
  put<double>(os, g.Lx);
  put<double>(os, g.Ly);
  put<double>(os, s.t);
  put_field(os, s.u);
  put_field(os, s.v);
  put_field(os, s.p);
  put_field(os, s.e);
  if (!os) throw SnapshotError("write to '" + path + "' failed");
}

FlowState read_snapshot(const std::string& path, Grid& g) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("cannot open '" + path + "'");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw SnapshotError("not a snapshot file");
  g.nx = get<std::int32_t>(is);
  g.ny = get<std::int32_t>(is);
  g.y_boundary = get<std::int32_t>(is) ? Boundary::kWall : Boundary::kPeriodic;
  g.x_boundary = Boundary::kPeriodic;
  g.Lx = get<double>(is);
  g.Ly = get<double>(is);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("bad snapshot header: ") + e.what());
  }
  FlowState s = FlowState::zeros(g);
  s.t = get<double>(is);
  get_field(is, s.u);
  get_field(is, s.v);
  get_field(is, s.p);
  get_field(is, s.e);
  return s;
}

void write_snapshot_csv(std::ostream& os, const FlowState& s, const Grid& g) {
  os << "x,y,u,v,p,e\n";
  const auto old = os.precision(17);
  for (int j = 0; j < g.ny; ++j) {
    const int jn = g.y_walls() ? j + 1 : (j + 1) % g.ny;
    for (int i = 0; i < g.nx; ++i) {
      const double uc = 0.5 * (s.u(i, j) + s.u((i + 1) % g.nx, j));
      const double vc = 0.5 * (s.v(i, j) + s.v(i, jn));
      os << (i + 0.5) * g.hx() << ',' << (j + 0.5) * g.hy() << ',' << uc << ',' << vc << ',' << s.p(i, j) << ','
         << s.e(i, j) << '\n';
    }
  }
  os.precision(old);
}

}  // namespace actflow
