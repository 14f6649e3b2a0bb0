#include "actflow/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace actflow {

ViscousCoeffs make_viscous_coeffs(const Grid& g, double value) {
  ViscousCoeffs c;
  c.cell = make_cell_field(g, value);
  c.corner = make_corner_field(g, value);
  c.wall_lo.assign(g.nx, 0.0);
  c.wall_hi.assign(g.nx, 0.0);
  return c;
}

// ---------------------------------------------------------------------------
// Serial reference. Written for clarity: periodic neighbours by modular
// arithmetic, stresses stored in temporaries.
// ---------------------------------------------------------------------------

namespace ref {

namespace {

int wrap(int i, int n) { return (i % n + n) % n; }

}  // namespace

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void laplacian(const Grid& g, const Field2D& f, Field2D& out) {
  const double ax = 1.0 / (g.hx() * g.hx());
  const double ay = 1.0 / (g.hy() * g.hy());
  out = make_cell_field(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double r = ax * (f(wrap(i + 1, g.nx), j) - f(i, j)) - ax * (f(i, j) - f(wrap(i - 1, g.nx), j));
      if (g.y_walls()) {
        if (j + 1 < g.ny) r += ay * (f(i, j + 1) - f(i, j));
        if (j > 0) r -= ay * (f(i, j) - f(i, j - 1));
      } else {
        r += ay * (f(i, wrap(j + 1, g.ny)) - f(i, j)) - ay * (f(i, j) - f(i, wrap(j - 1, g.ny)));
      }
      out(i, j) = r;
    }
  }
}

void divergence(const Grid& g, const Field2D& u, const Field2D& v, Field2D& out) {
  out = make_cell_field(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jn = g.y_walls() ? j + 1 : wrap(j + 1, g.ny);
    for (int i = 0; i < g.nx; ++i) {
      out(i, j) = (u(wrap(i + 1, g.nx), j) - u(i, j)) / g.hx() + (v(i, jn) - v(i, j)) / g.hy();
    }
  }
}

void gradient(const Grid& g, const Field2D& p, Field2D& gu, Field2D& gv) {
  gu = make_u_field(g);
  gv = make_v_field(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) gu(i, j) = (p(i, j) - p(wrap(i - 1, g.nx), j)) / g.hx();
  }
  for (int j = 0; j < g.nvy(); ++j) {
    if (g.y_walls() && (j == 0 || j == g.ny)) continue;
    for (int i = 0; i < g.nx; ++i) gv(i, j) = (p(i, j) - p(i, wrap(j - 1, g.ny))) / g.hy();
  }
}

void strain(const Grid& g, const Field2D& u, const Field2D& v, Field2D& dxx, Field2D& dyy, Field2D& dxy) {
  if (!dxx.same_shape(make_cell_field(g))) dxx = make_cell_field(g);
  if (!dyy.same_shape(make_cell_field(g))) dyy = make_cell_field(g);
  if (!dxy.same_shape(make_corner_field(g))) dxy = make_corner_field(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jn = g.y_walls() ? j + 1 : wrap(j + 1, g.ny);
    for (int i = 0; i < g.nx; ++i) {
      dxx(i, j) = (u(wrap(i + 1, g.nx), j) - u(i, j)) / g.hx();
      dyy(i, j) = (v(i, jn) - v(i, j)) / g.hy();
    }
  }
  for (int j = g.y_walls() ? 1 : 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      dxy(i, j) = 0.5 * ((u(i, j) - u(i, wrap(j - 1, g.ny))) / g.hy() + (v(i, j) - v(wrap(i - 1, g.nx), j)) / g.hx());
    }
  }
}

void viscous_apply(const Grid& g, const ViscousCoeffs& c, const Field2D& u, const Field2D& v, Field2D& ku,
                   Field2D& kv) {
  Field2D dxx;
  Field2D dyy;
  Field2D dxy;
  strain(g, u, v, dxx, dyy, dxy);
  Field2D sxx = make_cell_field(g);
  Field2D syy = make_cell_field(g);
  Field2D sxy = make_corner_field(g);
  for (std::size_t n = 0; n < sxx.size(); ++n) {
    sxx.a[n] = c.cell.a[n] * dxx.a[n];
    syy.a[n] = c.cell.a[n] * dyy.a[n];
  }
  for (std::size_t n = 0; n < sxy.size(); ++n) sxy.a[n] = c.corner.a[n] * dxy.a[n];
  if (g.y_walls()) {
    for (int i = 0; i < g.nx; ++i) {
      sxy(i, 0) = c.wall_lo[i] * u(i, 0);
      sxy(i, g.ny) = -c.wall_hi[i] * u(i, g.ny - 1);
    }
  }
  ku = make_u_field(g);
  kv = make_v_field(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jn = g.y_walls() ? j + 1 : wrap(j + 1, g.ny);
    for (int i = 0; i < g.nx; ++i) {
      ku(i, j) = -(sxx(i, j) - sxx(wrap(i - 1, g.nx), j)) / g.hx() - (sxy(i, jn) - sxy(i, j)) / g.hy();
    }
  }
  for (int j = 0; j < g.nvy(); ++j) {
    if (g.y_walls() && (j == 0 || j == g.ny)) continue;
    const int js = wrap(j - 1, g.ny);
    for (int i = 0; i < g.nx; ++i) {
      kv(i, j) = -(syy(i, j) - syy(i, js)) / g.hy() - (sxy(wrap(i + 1, g.nx), j) - sxy(i, j)) / g.hx();
    }
  }
}

void convection(const Grid& g, const Field2D& au, const Field2D& av, const Field2D& u, const Field2D& v,
                Field2D& cu, Field2D& cv) {
  const double hx = g.hx();
  const double hy = g.hy();
  const double inv2v = 1.0 / (2.0 * hx * hy);
  cu = make_u_field(g);
  cv = make_v_field(g);
  const bool walls = g.y_walls();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int ie = wrap(i + 1, g.nx);
      const int iw = wrap(i - 1, g.nx);
      double s = 0.0;
      s += hy * 0.5 * (au(i, j) + au(ie, j)) * u(ie, j);
      s -= hy * 0.5 * (au(iw, j) + au(i, j)) * u(iw, j);
      if (!walls || j + 1 < g.ny) {
        const int jn = wrap(j + 1, g.ny);
        const int jv = walls ? j + 1 : jn;
        s += hx * 0.5 * (av(iw, jv) + av(i, jv)) * u(i, jn);
      }
      if (!walls || j > 0) {
        const int js = wrap(j - 1, g.ny);
        s -= hx * 0.5 * (av(iw, j) + av(i, j)) * u(i, js);
      }
      cu(i, j) = s * inv2v;
    }
  }
  for (int j = 0; j < g.nvy(); ++j) {
    if (walls && (j == 0 || j == g.ny)) continue;
    const int js = wrap(j - 1, g.ny);
    const int jn = walls ? j + 1 : wrap(j + 1, g.ny);
    for (int i = 0; i < g.nx; ++i) {
      const int ie = wrap(i + 1, g.nx);
      const int iw = wrap(i - 1, g.nx);
      double s = 0.0;
      s += hx * 0.5 * (av(i, j) + av(i, jn)) * v(i, jn);
      s -= hx * 0.5 * (av(i, js) + av(i, j)) * v(i, js);
      s += hy * 0.5 * (au(ie, js) + au(ie, j)) * v(ie, j);
      s -= hy * 0.5 * (au(i, js) + au(i, j)) * v(iw, j);
      cv(i, j) = s * inv2v;
    }
  }
}

}  // namespace ref

// ---------------------------------------------------------------------------
// OpenMP versions. Rows are distributed over threads; neighbour indices are
// precomputed and stresses are formed on the fly.
// ---------------------------------------------------------------------------

namespace par {

namespace {

constexpr std::size_t kBlock = 2048;

struct Wrap {
  std::vector<int> east, west;
  explicit Wrap(int n) : east(n), west(n) {
    for (int i = 0; i < n; ++i) {
      east[i] = i + 1 == n ? 0 : i + 1;
      west[i] = i == 0 ? n - 1 : i - 1;
    }
  }
};

}  // namespace

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t blk = 0; blk < nb; ++blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[blk] = s;
  }
  double s = 0.0;
  for (double x : partial) s += x;
  return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void laplacian(const Grid& g, const Field2D& f, Field2D& out) {
  const double ax = 1.0 / (g.hx() * g.hx());
  const double ay = 1.0 / (g.hy() * g.hy());
  if (!out.same_shape(f)) out = make_cell_field(g);
  const Wrap wx(g.nx);
  const Wrap wy(g.ny);
  const bool walls = g.y_walls();
  const int nx = g.nx;
  const int ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double fc = f(i, j);
      double r = ax * (f(wx.east[i], j) - fc) - ax * (fc - f(wx.west[i], j));
      if (walls) {
        if (j + 1 < ny) r += ay * (f(i, j + 1) - fc);
        if (j > 0) r -= ay * (fc - f(i, j - 1));
      } else {
        r += ay * (f(i, wy.east[j]) - fc) - ay * (fc - f(i, wy.west[j]));
      }
      out(i, j) = r;
    }
  }
}

void divergence(const Grid& g, const Field2D& u, const Field2D& v, Field2D& out) {
  if (!out.same_shape(make_cell_field(g))) out = make_cell_field(g);
  const Wrap wx(g.nx);
  const double hx = g.hx();
  const double hy = g.hy();
  const bool walls = g.y_walls();
  const int nx = g.nx;
  const int ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jn = walls ? j + 1 : (j + 1 == ny ? 0 : j + 1);
    for (int i = 0; i < nx; ++i) {
      out(i, j) = (u(wx.east[i], j) - u(i, j)) / hx + (v(i, jn) - v(i, j)) / hy;
    }
  }
}

void gradient(const Grid& g, const Field2D& p, Field2D& gu, Field2D& gv) {
  if (!gu.same_shape(make_u_field(g))) gu = make_u_field(g);
  if (!gv.same_shape(make_v_field(g))) gv = make_v_field(g);
  const Wrap wx(g.nx);
  const double hx = g.hx();
  const double hy = g.hy();
  const bool walls = g.y_walls();
  const int nx = g.nx;
  const int ny = g.ny;
  const int nvy = g.nvy();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) gu(i, j) = (p(i, j) - p(wx.west[i], j)) / hx;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nvy; ++j) {
    if (walls && (j == 0 || j == ny)) {
      for (int i = 0; i < nx; ++i) gv(i, j) = 0.0;
      continue;
    }
    const int js = j == 0 ? ny - 1 : j - 1;
    for (int i = 0; i < nx; ++i) gv(i, j) = (p(i, j) - p(i, js)) / hy;
  }
}

void strain(const Grid& g, const Field2D& u, const Field2D& v, Field2D& dxx, Field2D& dyy, Field2D& dxy) {
  if (!dxx.same_shape(make_cell_field(g))) dxx = make_cell_field(g);
  if (!dyy.same_shape(make_cell_field(g))) dyy = make_cell_field(g);
  if (!dxy.same_shape(make_corner_field(g))) dxy = make_corner_field(g);
  const Wrap wx(g.nx);
  const double hx = g.hx();
  const double hy = g.hy();
  const bool walls = g.y_walls();
  const int nx = g.nx;
  const int ny = g.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jn = walls ? j + 1 : (j + 1 == ny ? 0 : j + 1);
    for (int i = 0; i < nx; ++i) {
      dxx(i, j) = (u(wx.east[i], j) - u(i, j)) / hx;
      dyy(i, j) = (v(i, jn) - v(i, j)) / hy;
    }
    if (walls && j == 0) continue;
    const int js = j == 0 ? ny - 1 : j - 1;
    for (int i = 0; i < nx; ++i) {
      dxy(i, j) = 0.5 * ((u(i, j) - u(i, js)) / hy + (v(i, j) - v(wx.west[i], j)) / hx);
    }
  }
}

void viscous_apply(const Grid& g, const ViscousCoeffs& c, const Field2D& u, const Field2D& v, Field2D& ku,
                   Field2D& kv) {
  if (!ku.same_shape(make_u_field(g))) ku = make_u_field(g);
  if (!kv.same_shape(make_v_field(g))) kv = make_v_field(g);
  const Wrap wx(g.nx);
  const double hx = g.hx();
  const double hy = g.hy();
  const bool walls = g.y_walls();
  const int nx = g.nx;
  const int ny = g.ny;
  const int nvy = g.nvy();
  const Field2D& lc = c.cell;
  const Field2D& lk = c.corner;

  auto sxx = [&](int i, int j) { return lc(i, j) * ((u(wx.east[i], j) - u(i, j)) / hx); };
  auto syy = [&](int i, int j) {
    const int jn = walls ? j + 1 : (j + 1 == ny ? 0 : j + 1);
    return lc(i, j) * ((v(i, jn) - v(i, j)) / hy);
  };
  auto sxy = [&](int i, int j) {
    if (walls && j == 0) return c.wall_lo[i] * u(i, 0);
    if (walls && j == ny) return -c.wall_hi[i] * u(i, ny - 1);
    const int js = j == 0 ? ny - 1 : j - 1;
    return lk(i, j) * (0.5 * ((u(i, j) - u(i, js)) / hy + (v(i, j) - v(wx.west[i], j)) / hx));
  };

#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jn = walls ? j + 1 : (j + 1 == ny ? 0 : j + 1);
    for (int i = 0; i < nx; ++i) {
      ku(i, j) = -(sxx(i, j) - sxx(wx.west[i], j)) / hx - (sxy(i, jn) - sxy(i, j)) / hy;
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nvy; ++j) {
    if (walls && (j == 0 || j == ny)) {
      for (int i = 0; i < nx; ++i) kv(i, j) = 0.0;
      continue;
    }
    const int js = j == 0 ? ny - 1 : j - 1;
    for (int i = 0; i < nx; ++i) {
      kv(i, j) = -(syy(i, j) - syy(i, js)) / hy - (sxy(wx.east[i], j) - sxy(i, j)) / hx;
    }
  }
}

void convection(const Grid& g, const Field2D& au, const Field2D& av, const Field2D& u, const Field2D& v,
                Field2D& cu, Field2D& cv) {
  if (!cu.same_shape(make_u_field(g))) cu = make_u_field(g);
  if (!cv.same_shape(make_v_field(g))) cv = make_v_field(g);
  const Wrap wx(g.nx);
  const double hx = g.hx();
  const double hy = g.hy();
  const double inv2v = 1.0 / (2.0 * hx * hy);
  const bool walls = g.y_walls();
  const int nx = g.nx;
  const int ny = g.ny;
  const int nvy = g.nvy();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    const int jn = j + 1 == ny ? 0 : j + 1;
    const int js = j == 0 ? ny - 1 : j - 1;
    const bool north = !walls || j + 1 < ny;
    const bool south = !walls || j > 0;
    const int jv = walls ? j + 1 : jn;
    for (int i = 0; i < nx; ++i) {
      const int ie = wx.east[i];
      const int iw = wx.west[i];
      double s = 0.0;
      s += hy * 0.5 * (au(i, j) + au(ie, j)) * u(ie, j);
      s -= hy * 0.5 * (au(iw, j) + au(i, j)) * u(iw, j);
      if (north) s += hx * 0.5 * (av(iw, jv) + av(i, jv)) * u(i, jn);
      if (south) s -= hx * 0.5 * (av(iw, j) + av(i, j)) * u(i, js);
      cu(i, j) = s * inv2v;
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nvy; ++j) {
    if (walls && (j == 0 || j == ny)) {
      for (int i = 0; i < nx; ++i) cv(i, j) = 0.0;
      continue;
    }
    const int js = j == 0 ? ny - 1 : j - 1;
    const int jn = walls ? j + 1 : (j + 1 == ny ? 0 : j + 1);
    for (int i = 0; i < nx; ++i) {
      const int ie = wx.east[i];
      const int iw = wx.west[i];
      double s = 0.0;
      s += hx * 0.5 * (av(i, j) + av(i, jn)) * v(i, jn);
      s -= hx * 0.5 * (av(i, js) + av(i, j)) * v(i, js);
      s += hy * 0.5 * (au(ie, js) + au(ie, j)) * v(ie, j);
      s -= hy * 0.5 * (au(i, js) + au(i, j)) * v(iw, j);
      cv(i, j) = s * inv2v;
    }
  }
}

}  // namespace par

}  // namespace actflow
