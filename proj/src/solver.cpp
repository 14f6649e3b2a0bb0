#include "actflow/solver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "actflow/diagnostics.hpp"
#include "actflow/graphs.hpp"
#include "actflow/linsolve.hpp"
#include "actflow/pressure.hpp"

namespace actflow {

double phi_k(double x, double k) {
  if (!(x >= 0.0)) throw std::invalid_argument("phi_k needs x >= 0");
  const double y = x / k;
  if (y <= 1.0) return 1.0;
  if (y >= 2.0) return 0.0;
  const double t = y - 1.0;
  return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

namespace {

struct WallLambda {
  std::vector<double> kw_lo, kw_hi;  // bulk lambda next to the wall
  std::vector<double> w_lo, w_hi;    // friction lambda
};

struct StepCoefficients {
  std::vector<CoefficientValues> cell;
  std::vector<CoefficientValues> wall_lo;
  std::vector<CoefficientValues> wall_hi;
};

StepCoefficients evaluate_step_coefficients(const Field2D& e, const CoefficientSet& cs, const Grid& g) {
  StepCoefficients sc;
  sc.cell.resize(e.size());
  for (std::size_t n = 0; n < e.size(); ++n) sc.cell[n] = cs.evaluate(e.a[n]);
  if (g.y_walls()) {
    sc.wall_lo.resize(g.nx);
    sc.wall_hi.resize(g.nx);
    for (int i = 0; i < g.nx; ++i) {
      const int iw = (i + g.nx - 1) % g.nx;
      sc.wall_lo[i] = cs.evaluate(0.5 * (e(iw, 0) + e(i, 0)));
      sc.wall_hi[i] = cs.evaluate(0.5 * (e(iw, g.ny - 1) + e(i, g.ny - 1)));
    }
  }
  return sc;
}

// Cell rate tensor from the strain kernel plus the wall corners, which use
// the hidden slip velocity: Dxy = (u - u_wall) / hy at the bottom.
TensorField cell_rate(const Grid& g, const Field2D& u, const Field2D& v, const std::vector<double>& slip_lo,
                      const std::vector<double>& slip_hi, Field2D* corner_dxy = nullptr) {
  TensorField t;
  Field2D dxy;
  par::strain(g, u, v, t.xx, t.yy, dxy);
  if (g.y_walls()) {
    for (int i = 0; i < g.nx; ++i) {
      dxy(i, 0) = (u(i, 0) - slip_lo[i]) / g.hy();
      dxy(i, g.ny) = (slip_hi[i] - u(i, g.ny - 1)) / g.hy();
    }
  }
  t.xy = make_cell_field(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jn = g.y_walls() ? j + 1 : (j + 1) % g.ny;
    for (int i = 0; i < g.nx; ++i) {
      const int ie = (i + 1) % g.nx;
      t.xy(i, j) = 0.25 * (dxy(i, j) + dxy(ie, j) + dxy(i, jn) + dxy(ie, jn));
    }
  }
  if (corner_dxy != nullptr) *corner_dxy = std::move(dxy);
  return t;
}

double rate_norm(const TensorField& t, std::size_t n) {
  return std::sqrt(t.xx.a[n] * t.xx.a[n] + t.yy.a[n] * t.yy.a[n] + 2.0 * t.xy.a[n] * t.xy.a[n]);
}

double effective_wall(double kw, double w, double hy) {
  if (kw <= 0.0 || w <= 0.0) return 0.0;
  return 1.0 / (hy / kw + 1.0 / w);
}

double hidden_slip(double u, double kw, double w, double hy) {
  const double den = kw + w * hy;
  if (den <= 0.0) return u;
  return kw * u / den;
}

void freeze_coefficients(const Grid& g, const TensorField& rate, const std::vector<double>& slip_lo,
                         const std::vector<double>& slip_hi, const StepCoefficients& sc, double k, double kw,
                         ViscousCoeffs& vc, WallLambda& wl) {
  vc = make_viscous_coeffs(g);
  for (std::size_t n = 0; n < vc.cell.size(); ++n) vc.cell.a[n] = bulk_factor(rate_norm(rate, n), sc.cell[n], k);
  const int nx = g.nx;
  const int ny = g.ny;
  for (int j = g.y_walls() ? 1 : 0; j < ny; ++j) {
    const int js = (j + ny - 1) % ny;
    for (int i = 0; i < nx; ++i) {
      const int iw = (i + nx - 1) % nx;
      vc.corner(i, j) = 0.25 * (vc.cell(iw, js) + vc.cell(i, js) + vc.cell(iw, j) + vc.cell(i, j));
    }
  }
  if (!g.y_walls()) return;
  wl.kw_lo.assign(nx, 0.0);
  wl.kw_hi.assign(nx, 0.0);
  wl.w_lo.assign(nx, 0.0);
  wl.w_hi.assign(nx, 0.0);
  const double hy = g.hy();
  for (int i = 0; i < nx; ++i) {
    const int iw = (i + nx - 1) % nx;
    wl.kw_lo[i] = 0.5 * (vc.cell(iw, 0) + vc.cell(i, 0));
    wl.kw_hi[i] = 0.5 * (vc.cell(iw, ny - 1) + vc.cell(i, ny - 1));
    wl.w_lo[i] = wall_factor(std::abs(slip_lo[i]), sc.wall_lo[i], kw);
    wl.w_hi[i] = wall_factor(std::abs(slip_hi[i]), sc.wall_hi[i], kw);
    vc.corner(i, 0) = wl.kw_lo[i];
    vc.corner(i, ny) = wl.kw_hi[i];
    vc.wall_lo[i] = effective_wall(wl.kw_lo[i], wl.w_lo[i], hy);
    vc.wall_hi[i] = effective_wall(wl.kw_hi[i], wl.w_hi[i], hy);
  }
}

void jacobi_diagonal(const Grid& g, const ViscousCoeffs& vc, double dt, Vector& diag) {
  const int nx = g.nx;
  const int ny = g.ny;
  const std::size_t nu = static_cast<std::size_t>(nx) * ny;
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  const double ihy2 = 1.0 / (g.hy() * g.hy());
  diag.assign(nu + static_cast<std::size_t>(nx) * g.nvy(), 1.0);
  const bool walls = g.y_walls();
  for (int j = 0; j < ny; ++j) {
    const int jn = walls ? j + 1 : (j + 1) % ny;
    for (int i = 0; i < nx; ++i) {
      const int iw = (i + nx - 1) % nx;
      double d = 1.0 / dt + (vc.cell(i, j) + vc.cell(iw, j)) * ihx2;
      if (walls && j == 0) {
        d += vc.wall_lo[i] / g.hy();
      } else {
        d += 0.5 * vc.corner(i, j) * ihy2;
      }
      if (walls && j == ny - 1) {
        d += vc.wall_hi[i] / g.hy();
      } else {
        d += 0.5 * vc.corner(i, jn) * ihy2;
      }
      diag[static_cast<std::size_t>(j) * nx + i] = d;
    }
  }
  for (int j = 0; j < g.nvy(); ++j) {
    if (walls && (j == 0 || j == ny)) continue;
    const int js = (j + ny - 1) % ny;
    for (int i = 0; i < nx; ++i) {
      const int ie = (i + 1) % nx;
      diag[nu + static_cast<std::size_t>(j) * nx + i] =
          1.0 / dt + (vc.cell(i, j) + vc.cell(i, js)) * ihy2 + 0.5 * (vc.corner(ie, j) + vc.corner(i, j)) * ihx2;
    }
  }
}

// Tridiagonal solves along y for every u and v column, the dominant coupling
// in channel flows, plus an additive coarse solve for the x-averaged u rows
// (the line blocks miss the cancellation of the x terms on those modes).
// Periodic wrap entries are dropped; all blocks stay diagonally dominant, so
// the preconditioner is SPD.
class LinePreconditioner {
 public:
  LinePreconditioner(const Grid& g, const ViscousCoeffs& vc, const Vector& diag)
      : nx_(g.nx), ny_(g.ny), nvy_(g.nvy()), walls_(g.y_walls()) {
    const std::size_t nu = static_cast<std::size_t>(nx_) * ny_;
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    up_.assign(diag.size(), 0.0);
    cp_.assign(diag.size(), 0.0);
    inv_.assign(diag.size(), 0.0);
    for (int j = 0; j + 1 < ny_; ++j) {
      for (int i = 0; i < nx_; ++i) up_[static_cast<std::size_t>(j) * nx_ + i] = -0.5 * vc.corner(i, j + 1) * ihy2;
    }
    for (int j = vlo(); j < vhi(); ++j) {
      for (int i = 0; i < nx_; ++i) up_[nu + static_cast<std::size_t>(j) * nx_ + i] = -vc.cell(i, j) * ihy2;
    }
    for (int i = 0; i < nx_; ++i) {
      factor(diag, i, 0, ny_ - 1, 0);
      factor(diag, i, vlo(), vhi(), nu);
    }
    // Galerkin product P^T A_uu P with P copying a row value along x
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    cd_.assign(ny_, 0.0);
    cu_.assign(ny_, 0.0);
    for (int j = 0; j < ny_; ++j) {
      for (int i = 0; i < nx_; ++i) {
        const int iw = (i + nx_ - 1) % nx_;
        const std::size_t n = static_cast<std::size_t>(j) * nx_ + i;
        cd_[j] += diag[n] - (vc.cell(i, j) + vc.cell(iw, j)) * ihx2;
        cu_[j] += up_[n];
      }
    }
    ccp_.assign(ny_, 0.0);
    cinv_.assign(ny_, 0.0);
    double prev_c = 0.0;
    for (int j = 0; j < ny_; ++j) {
      const double a = j > 0 ? cu_[j - 1] : 0.0;
      cinv_[j] = 1.0 / (cd_[j] - a * prev_c);
      ccp_[j] = j + 1 < ny_ ? cu_[j] * cinv_[j] : 0.0;
      prev_c = ccp_[j];
    }
  }

  void apply(const Vector& r, Vector& z) const {
    const std::size_t nu = static_cast<std::size_t>(nx_) * ny_;
    z.assign(r.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx_; ++i) {
      solve(r, z, i, 0, ny_ - 1, 0);
      solve(r, z, i, vlo(), vhi(), nu);
    }
    std::vector<double> c(ny_, 0.0);
    double prev = 0.0;
    for (int j = 0; j < ny_; ++j) {
      double sum = 0.0;
      for (int i = 0; i < nx_; ++i) sum += r[static_cast<std::size_t>(j) * nx_ + i];
      const double a = j > 0 ? cu_[j - 1] : 0.0;
      prev = (sum - a * prev) * cinv_[j];
      c[j] = prev;
    }
    for (int j = ny_ - 2; j >= 0; --j) c[j] -= ccp_[j] * c[j + 1];
    for (int j = 0; j < ny_; ++j) {
      for (int i = 0; i < nx_; ++i) z[static_cast<std::size_t>(j) * nx_ + i] += c[j];
    }
  }

 private:
  int vlo() const { return walls_ ? 1 : 0; }
  int vhi() const { return walls_ ? ny_ - 1 : nvy_ - 1; }
  std::size_t at(std::size_t base, int i, int j) const { return base + static_cast<std::size_t>(j) * nx_ + i; }

  void factor(const Vector& diag, int i, int j0, int j1, std::size_t base) {
    double prev_c = 0.0;
    for (int j = j0; j <= j1; ++j) {
      const std::size_t n = at(base, i, j);
      const double a = j > j0 ? up_[at(base, i, j - 1)] : 0.0;
      const double den = diag[n] - a * prev_c;
      inv_[n] = 1.0 / den;
      cp_[n] = j < j1 ? up_[n] * inv_[n] : 0.0;
      prev_c = cp_[n];
    }
  }

  void solve(const Vector& r, Vector& z, int i, int j0, int j1, std::size_t base) const {
    double prev = 0.0;
    for (int j = j0; j <= j1; ++j) {
      const std::size_t n = at(base, i, j);
      const double a = j > j0 ? up_[at(base, i, j - 1)] : 0.0;
      prev = (r[n] - a * prev) * inv_[n];
      z[n] = prev;
    }
    for (int j = j1 - 1; j >= j0; --j) {
      const std::size_t n = at(base, i, j);
      z[n] -= cp_[n] * z[at(base, i, j + 1)];
    }
  }

  int nx_, ny_, nvy_;
  bool walls_;
  Vector up_, cp_, inv_;
  Vector cd_, cu_, ccp_, cinv_;
};

// Transport field v Phi_k(|v|) on both face sets.
void transport_field(const Grid& g, const Field2D& u, const Field2D& v, double k, Field2D& au, Field2D& av) {
  au = make_u_field(g);
  av = make_v_field(g);
  const int nx = g.nx;
  const int ny = g.ny;
  const bool walls = g.y_walls();
  for (int j = 0; j < ny; ++j) {
    const int jn = walls ? j + 1 : (j + 1) % ny;
    for (int i = 0; i < nx; ++i) {
      const int iw = (i + nx - 1) % nx;
      const double vbar = 0.25 * (v(iw, j) + v(i, j) + v(iw, jn) + v(i, jn));
      au(i, j) = u(i, j) * phi_k(std::hypot(u(i, j), vbar), k);
    }
  }
  for (int j = 0; j < g.nvy(); ++j) {
    if (walls && (j == 0 || j == ny)) continue;
    const int js = (j + ny - 1) % ny;
    for (int i = 0; i < nx; ++i) {
      const int ie = (i + 1) % nx;
      const double ubar = 0.25 * (u(i, js) + u(ie, js) + u(i, j) + u(ie, j));
      av(i, j) = v(i, j) * phi_k(std::hypot(ubar, v(i, j)), k);
    }
  }
}

void split(const Vector& x, Field2D& u, Field2D& v) {
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(u.size()), u.a.begin());
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(u.size()), x.end(), v.a.begin());
}

void join(const Field2D& u, const Field2D& v, Vector& x) {
  x.resize(u.size() + v.size());
  std::copy(u.a.begin(), u.a.end(), x.begin());
  std::copy(v.a.begin(), v.a.end(), x.begin() + static_cast<std::ptrdiff_t>(u.size()));
}

}  // namespace

FlowState momentum_step(const FlowState& s, const SolverParams& params, const CoefficientSet& cs, const Grid& g,
                        MomentumInfo* info, SolverWorkspace* ws) {
  if (!(params.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(params.picard_tol > 0.0)) throw std::invalid_argument("picard_tol must be positive");
  if (!s.consistent_with(g)) throw std::invalid_argument("state does not match grid");
  const double dt = params.dt;
  const double k = params.k;
  const double kw = params.wall_k();
  const double eps = params.epsilon > 0.0 ? params.epsilon : default_epsilon(g);
  const double area = g.cell_area();
  const int nx = g.nx;
  const int ny = g.ny;
  const bool walls = g.y_walls();

  SolverWorkspace local;
  SolverWorkspace& w = ws != nullptr ? *ws : local;
  if (!w.initialized || static_cast<int>(w.slip_lo.size()) != nx) {
    w.slip_lo.assign(nx, 0.0);
    w.slip_hi.assign(nx, 0.0);
    if (walls) {
      for (int i = 0; i < nx; ++i) {
        w.slip_lo[i] = s.u(i, 0);
        w.slip_hi[i] = s.u(i, ny - 1);
      }
    }
    w.initialized = true;
  }

  const StepCoefficients sc = evaluate_step_coefficients(s.e, cs, g);

  // explicit part of the right-hand side
  Field2D au, av, cu, cv;
  transport_field(g, s.u, s.v, params.convection_k(), au, av);
  par::convection(g, au, av, s.u, s.v, cu, cv);
  Field2D ru = make_u_field(g);
  Field2D rv = make_v_field(g);
  for (std::size_t n = 0; n < ru.size(); ++n) {
    ru.a[n] = s.u.a[n] / dt - cu.a[n] + params.body_force[0];
  }
  for (int j = 0; j < g.nvy(); ++j) {
    if (walls && (j == 0 || j == ny)) continue;
    for (int i = 0; i < nx; ++i) rv(i, j) = s.v(i, j) / dt - cv(i, j) + params.body_force[1];
  }
  Vector rhs;
  join(ru, rv, rhs);

  std::vector<char> frozen(rhs.size(), 0);
  if (walls) {
    const std::size_t nu = ru.size();
    for (int i = 0; i < nx; ++i) {
      frozen[nu + i] = 1;
      frozen[nu + static_cast<std::size_t>(ny) * nx + i] = 1;
    }
  }

  Field2D u_it = s.u;
  Field2D v_it = s.v;
  Vector x;
  join(u_it, v_it, x);
  ViscousCoeffs vc;
  WallLambda wl;
  Field2D tu = make_u_field(g), tv = make_v_field(g), ku, kv;
  int picard = 0;
  int cg_total = 0;
  double change = 0.0;
  bool converged = false;
  // coefficients are frozen from a relaxed iterate; omega shrinks when the change grows
  Field2D u_fr = u_it, v_fr = v_it;
  std::vector<double> slo_fr = w.slip_lo, shi_fr = w.slip_hi;
  double omega = 1.0;
  double prev_change = std::numeric_limits<double>::infinity();

  for (picard = 1; picard <= params.picard_max; ++picard) {
    const TensorField rate = cell_rate(g, u_fr, v_fr, slo_fr, shi_fr);
    freeze_coefficients(g, rate, w.slip_lo, w.slip_hi, sc, k, kw, vc, wl);

    LinearOp A = [&](const Vector& in, Vector& out) {
      split(in, tu, tv);
      par::viscous_apply(g, vc, tu, tv, ku, kv);
      out.resize(in.size());
      const std::size_t nu = ku.size();
      for (std::size_t n = 0; n < nu; ++n) out[n] = in[n] / dt + ku.a[n];
      for (std::size_t n = 0; n < kv.size(); ++n) out[nu + n] = in[nu + n] / dt + kv.a[n];
    };
    KrylovOptions opt;
    opt.rel_tol = params.cg_tol;
    opt.max_iter = params.cg_max;
    opt.frozen = frozen;
    Vector diag;
    jacobi_diagonal(g, vc, dt, diag);
    const LinePreconditioner lines(g, vc, diag);
    opt.preconditioner = [&lines](const Vector& r, Vector& z) { lines.apply(r, z); };
    const KrylovResult kr = conjugate_gradient(A, rhs, x, opt);
    cg_total += kr.iterations;
    if (!kr.converged) {
      std::ostringstream os;
      os << "momentum solve did not converge (residual " << kr.residual << " after " << kr.iterations
         << " iterations)";
      throw LinearSolveFailure(os.str());
    }
    Field2D u_new = make_u_field(g);
    Field2D v_new = make_v_field(g);
    split(x, u_new, v_new);
    if (walls) {
      for (int i = 0; i < nx; ++i) {
        w.slip_lo[i] = hidden_slip(u_new(i, 0), wl.kw_lo[i], wl.w_lo[i], g.hy());
        w.slip_hi[i] = hidden_slip(u_new(i, ny - 1), wl.kw_hi[i], wl.w_hi[i], g.hy());
      }
    }
    Field2D du = u_new, dv = v_new;
    for (std::size_t n = 0; n < du.size(); ++n) du.a[n] -= u_it.a[n];
    for (std::size_t n = 0; n < dv.size(); ++n) dv.a[n] -= v_it.a[n];
    change = velocity_l2(du, dv, g);
    u_it = std::move(u_new);
    v_it = std::move(v_new);
    if (change < params.picard_tol) {
      converged = true;
      break;
    }
    if (change > prev_change) omega = std::max(0.05, 0.7 * omega);
    prev_change = change;
    auto relax = [omega](std::vector<double>& fr, const std::vector<double>& it) {
      for (std::size_t n = 0; n < fr.size(); ++n) fr[n] += omega * (it[n] - fr[n]);
    };
    relax(u_fr.a, u_it.a);
    relax(v_fr.a, v_it.a);
    relax(slo_fr, w.slip_lo);
    relax(shi_fr, w.slip_hi);
  }
  if (!converged) {
    std::ostringstream os;
    os << "Picard iteration did not converge in " << params.picard_max << " iterations (last change " << change
       << ")";
    throw PicardNoConvergence(os.str(), change);
  }

  // pressure relaxation: (eps + dt) Lap p = div v*, then v = v* - dt grad p
  PressureProblem prob;
  prob.epsilon = eps + dt;
  prob.rhs = divergence(u_it, v_it, g);
  prob.solver_tol = params.pressure_tol;
  PressureStats ps;
  Field2D p_new = solve_pressure(prob, g, &ps, &s.p);

  FlowState out = s;
  out.p = p_new;
  Field2D gdu, gdv;
  par::gradient(g, p_new, gdu, gdv);
  out.u = u_it;
  out.v = v_it;
  for (std::size_t n = 0; n < out.u.size(); ++n) out.u.a[n] -= dt * gdu.a[n];
  for (std::size_t n = 0; n < out.v.size(); ++n) out.v.a[n] -= dt * gdv.a[n];
  if (walls) {
    for (int i = 0; i < nx; ++i) out.v(i, 0) = out.v(i, ny) = 0.0;
  }

  if (info == nullptr) return out;

  // dissipation of v* under the frozen coefficients of the final solve
  MomentumInfo& mi = *info;
  mi.picard_iters = picard;
  mi.cg_iters = cg_total;
  mi.pressure_iters = ps.iterations;
  mi.picard_residual = change;
  mi.epsilon = eps;
  Field2D corner_dxy;
  mi.rate = cell_rate(g, u_it, v_it, w.slip_lo, w.slip_hi, &corner_dxy);
  mi.coeffs = vc;
  mi.dissipation = make_cell_field(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double dxx = mi.rate.xx(i, j);
      const double dyy = mi.rate.yy(i, j);
      mi.dissipation(i, j) = vc.cell(i, j) * (dxx * dxx + dyy * dyy);
    }
  }
  for (int j = 0; j < g.nvy(); ++j) {
    for (int i = 0; i < nx; ++i) {
      const int iw = (i + nx - 1) % nx;
      double share = 0.0;
      int jlo = (j + ny - 1) % ny;
      int jhi = j;
      if (walls && j == 0) {
        // half-cell shear layer between the first u row and the wall
        const double d = u_it(i, 0) - w.slip_lo[i];
        share = 0.5 * wl.kw_lo[i] * d * d / (g.hy() * g.hy());
        mi.dissipation(iw, 0) += share;
        mi.dissipation(i, 0) += share;
        continue;
      }
      if (walls && j == ny) {
        const double d = u_it(i, ny - 1) - w.slip_hi[i];
        share = 0.5 * wl.kw_hi[i] * d * d / (g.hy() * g.hy());
        mi.dissipation(iw, ny - 1) += share;
        mi.dissipation(i, ny - 1) += share;
        continue;
      }
      const double dxy = corner_dxy(i, j);
      share = 0.25 * 2.0 * vc.corner(i, j) * dxy * dxy;
      mi.dissipation(iw, jlo) += share;
      mi.dissipation(i, jlo) += share;
      mi.dissipation(iw, jhi) += share;
      mi.dissipation(i, jhi) += share;
    }
  }
  mi.bulk_dissipation = 0.0;
  for (double q : mi.dissipation.a) mi.bulk_dissipation += q * area;

  mi.slip_lo = w.slip_lo;
  mi.slip_hi = w.slip_hi;
  mi.traction_lo.assign(nx, 0.0);
  mi.traction_hi.assign(nx, 0.0);
  mi.wall_dissipation = 0.0;
  if (walls) {
    for (int i = 0; i < nx; ++i) {
      mi.traction_lo[i] = wl.w_lo[i] * w.slip_lo[i];
      mi.traction_hi[i] = wl.w_hi[i] * w.slip_hi[i];
      mi.wall_dissipation += g.hx() * (mi.traction_lo[i] * w.slip_lo[i] + mi.traction_hi[i] * w.slip_hi[i]);
    }
  }

  Field2D gpu1, gpv1;
  par::gradient(g, out.p, gpu1, gpv1);
  mi.eps_work = eps * (par::dot(gpu1.a, gpu1.a) + par::dot(gpv1.a, gpv1.a)) * area;
  double fw = 0.0;
  for (double x0 : u_it.a) fw += params.body_force[0] * x0;
  for (int j = 0; j < g.nvy(); ++j) {
    if (walls && (j == 0 || j == ny)) continue;
    for (int i = 0; i < nx; ++i) fw += params.body_force[1] * v_it(i, j);
  }
  mi.forcing_work = fw * area;
  Field2D div_new = divergence(out.u, out.v, g);
  Field2D lap_new = neumann_laplacian_apply(out.p, g);
  for (std::size_t n = 0; n < div_new.size(); ++n) div_new.a[n] -= eps * lap_new.a[n];
  mi.div_residual = l2_norm(div_new, g);
  mi.u_star = std::move(u_it);
  mi.v_star = std::move(v_it);
  return out;
}

FlowState energy_step(const FlowState& s, const Field2D& dissipation, const SolverParams& params,
                      const CoefficientSet& cs, const Grid& g, int* iterations) {
  const double dt = params.dt;
  const int nx = g.nx;
  const int ny = g.ny;
  const bool walls = g.y_walls();
  const double hx = g.hx();
  const double hy = g.hy();
  const double vol = g.cell_area();
  const std::size_t n_cells = g.cells();

  std::vector<double> kappa(n_cells);
  for (std::size_t n = 0; n < n_cells; ++n) kappa[n] = cs.kappa(s.e.a[n]);

  // five-point rows: off[0..3] = east, west, north, south couplings (<= 0)
  std::vector<double> diag(n_cells), off_e(n_cells), off_w(n_cells), off_n(n_cells), off_s(n_cells);
  std::vector<int> nb_e(n_cells), nb_w(n_cells), nb_n(n_cells), nb_s(n_cells);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t P = static_cast<std::size_t>(j) * nx + i;
      const int ie = (i + 1) % nx;
      const int iw = (i + nx - 1) % nx;
      nb_e[P] = j * nx + ie;
      nb_w[P] = j * nx + iw;
      const bool has_n = !walls || j + 1 < ny;
      const bool has_s = !walls || j > 0;
      nb_n[P] = has_n ? ((j + 1) % ny) * nx + i : -1;
      nb_s[P] = has_s ? ((j + ny - 1) % ny) * nx + i : -1;
      const int jv = walls ? j + 1 : (j + 1) % ny;
      // outward fluxes
      const double fe = s.u(ie, j) * hy;
      const double fw = -s.u(i, j) * hy;
      const double fn = s.v(i, jv) * hx;
      const double fs = -s.v(i, j) * hx;
      auto link = [&](double flux, int nb, double h2) {
        if (nb < 0) return 0.0;
        const double conv = std::min(flux, 0.0) / vol;
        const double diff = 0.5 * (kappa[P] + kappa[nb]) / h2;
        return conv - diff;
      };
      off_e[P] = link(fe, nb_e[P], hx * hx);
      off_w[P] = link(fw, nb_w[P], hx * hx);
      off_n[P] = link(fn, nb_n[P], hy * hy);
      off_s[P] = link(fs, nb_s[P], hy * hy);
      diag[P] = 1.0 / dt - off_e[P] - off_w[P] - off_n[P] - off_s[P];
    }
  }

  // L x: the transport-diffusion part of the row (row sums zero)
  auto apply_L = [&](const Vector& x, Vector& y) {
    y.resize(x.size());
#pragma omp parallel for schedule(static)
    for (std::size_t P = 0; P < n_cells; ++P) {
      double r = (diag[P] - 1.0 / dt) * x[P] + off_e[P] * x[nb_e[P]] + off_w[P] * x[nb_w[P]];
      if (nb_n[P] >= 0) r += off_n[P] * x[nb_n[P]];
      if (nb_s[P] >= 0) r += off_s[P] * x[nb_s[P]];
      y[P] = r;
    }
  };
  LinearOp A = [&](const Vector& x, Vector& y) {
    apply_L(x, y);
    for (std::size_t P = 0; P < n_cells; ++P) y[P] += x[P] / dt;
  };

  // solve for the increment so the tolerance acts on the change, not on e
  Vector Le;
  apply_L(s.e.a, Le);
  Vector rhs(n_cells);
  for (std::size_t P = 0; P < n_cells; ++P) rhs[P] = dissipation.a[P] - Le[P];
  Vector de(n_cells, 0.0);
  KrylovOptions opt;
  opt.rel_tol = params.energy_tol;
  opt.abs_tol = 1e-300;
  opt.max_iter = 10000;
  opt.diagonal = diag;
  const KrylovResult kr = bicgstab(A, rhs, de, opt);
  if (iterations != nullptr) *iterations = kr.iterations;
  if (!kr.converged) {
    std::ostringstream os;
    os << "energy solve did not converge (residual " << kr.residual << ", rhs " << kr.rhs_norm << ")";
    throw LinearSolveFailure(os.str());
  }
  FlowState out = s;
  for (std::size_t P = 0; P < n_cells; ++P) out.e.a[P] = s.e.a[P] + de[P];
  return out;
}

FlowState initial_state(const SimConfig& cfg) {
  const Grid& g = cfg.grid;
  const InitialCondition& ic = cfg.initial;
  FlowState s = FlowState::zeros(g, ic.e0);
  const double pi = std::numbers::pi;
  if (ic.velocity == "rest") {
  } else if (ic.velocity == "vortex") {
    Field2D psi = make_corner_field(g);
    for (int j = 0; j < g.nvy(); ++j) {
      const double y = j * g.hy();
      for (int i = 0; i < g.nx; ++i) {
        const double x = i * g.hx();
        const double sy = g.y_walls() ? std::pow(std::sin(pi * y / g.Ly), 2) : std::sin(2.0 * pi * y / g.Ly);
        psi(i, j) = ic.amplitude * g.Ly / (2.0 * pi) * std::sin(2.0 * pi * x / g.Lx) * sy;
      }
    }
    if (g.y_walls()) {
      for (int i = 0; i < g.nx; ++i) psi(i, 0) = psi(i, g.ny) = 0.0;
    }
    velocity_from_stream(psi, g, s.u, s.v);
  } else if (ic.velocity == "shear") {
    for (int j = 0; j < g.ny; ++j) {
      const double y = (j + 0.5) * g.hy();
      for (int i = 0; i < g.nx; ++i) s.u(i, j) = ic.amplitude * 4.0 * y * (g.Ly - y) / (g.Ly * g.Ly);
    }
  } else if (ic.velocity == "snapshot") {
    Grid sg;
    FlowState loaded = read_snapshot(ic.snapshot, sg);
    if (!(sg == g)) throw ConfigError("snapshot grid does not match the configured grid");
    s.u = loaded.u;
    s.v = loaded.v;
    s.p = loaded.p;
  } else {
    throw ConfigError("unknown initial velocity '" + ic.velocity + "'");
  }
  if (ic.e_spike != 0.0) {
    const double r0 = 0.1 * std::min(g.Lx, g.Ly);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double dx = (i + 0.5) * g.hx() - 0.5 * g.Lx;
        const double dy = (j + 0.5) * g.hy() - 0.5 * g.Ly;
        s.e(i, j) += ic.e_spike * std::exp(-(dx * dx + dy * dy) / (r0 * r0));
      }
    }
  }
  return s;
}

namespace {

void dump_failure(const SimConfig& cfg, const FlowState& s) {
  if (cfg.output.directory.empty()) return;
  try {
    std::filesystem::create_directories(cfg.output.directory);
    write_snapshot((std::filesystem::path(cfg.output.directory) / "abort_state.bin").string(), s, cfg.grid);
  } catch (...) {
  }
}

bool finite_state(const FlowState& s) {
  return all_finite(s.u) && all_finite(s.v) && all_finite(s.p) && all_finite(s.e);
}

}  // namespace

Trajectory run(const SimConfig& cfg) {
  validate_config(cfg);
  const Grid& g = cfg.grid;
  SolverParams params = cfg.solver;
  params.epsilon = effective_epsilon(cfg);

  Trajectory traj;
  traj.grid = g;
  traj.c3 = cfg.c3;
  traj.epsilon = params.epsilon;
  FlowState state = initial_state(cfg);
  double emin = state.e.a.front();
  for (double x : state.e.a) emin = std::min(emin, x);
  traj.initial_min_e = emin;
  traj.snapshots.push_back(state);
  traj.snapshot_steps.push_back(0);

  const int n_steps = std::min(cfg.max_steps, static_cast<int>(std::llround(cfg.t_final / params.dt)));
  SolverWorkspace ws;
  for (int step = 1; step <= n_steps; ++step) {
    MomentumInfo info;
    FlowState next;
    try {
      next = momentum_step(state, params, cfg.coefficients, g, &info, &ws);
      if (params.solve_energy) next = energy_step(next, info.dissipation, params, cfg.coefficients, g);
    } catch (const std::exception& e) {
      dump_failure(cfg, state);
      throw SolverAbort("step " + std::to_string(step) + " failed: " + e.what());
    }
    next.t = step * params.dt;
    if (!finite_state(next)) {
      dump_failure(cfg, state);
      throw SolverAbort("non-finite values at step " + std::to_string(step));
    }
    traj.budgets.push_back(make_budget_record(step, state, next, info, params, g));

    Field2D du = next.u, dv = next.v;
    for (std::size_t n = 0; n < du.size(); ++n) du.a[n] -= state.u.a[n];
    for (std::size_t n = 0; n < dv.size(); ++n) dv.a[n] -= state.v.a[n];
    const double rate = velocity_l2(du, dv, g) / params.dt;
    const double scale = std::max(1.0, velocity_l2(state.u, state.v, g));
    state = std::move(next);
    if (cfg.output.snapshot_every > 0 && step % cfg.output.snapshot_every == 0 && step != n_steps) {
      traj.snapshots.push_back(state);
      traj.snapshot_steps.push_back(step);
    }
    if (cfg.stop_at_steady && rate < cfg.steady_tol * scale) {
      traj.steady = true;
      break;
    }
  }
  traj.snapshots.push_back(state);
  traj.snapshot_steps.push_back(traj.budgets.empty() ? 0 : traj.budgets.back().step);

  if (!cfg.output.directory.empty()) write_run_outputs(cfg, traj);
  return traj;
}

}  // namespace actflow
