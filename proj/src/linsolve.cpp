#include "actflow/linsolve.hpp"

#include <cmath>

#include "actflow/kernels.hpp"

namespace actflow {

namespace {

void project(Vector& x, const KrylovOptions& opt) {
  if (!opt.frozen.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (opt.frozen[i]) x[i] = 0.0;
    }
  }
  if (opt.project_mean && !x.empty()) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    for (double& v : x) v -= m;
  }
}

void project_mean_only(Vector& x) {
  KrylovOptions o;
  o.project_mean = true;
  project(x, o);
}

void precondition(const Vector& r, Vector& z, const KrylovOptions& opt) {
  if (opt.preconditioner) {
    opt.preconditioner(r, z);
  } else if (opt.diagonal.empty()) {
    z = r;
  } else {
    const std::size_t n = r.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) z[i] = opt.diagonal[i] != 0.0 ? r[i] / opt.diagonal[i] : r[i];
  }
  project(z, opt);
}

double nrm(const Vector& x) { return std::sqrt(par::dot(x, x)); }

Vector residual(const LinearOp& A, const Vector& b, const Vector& x, const KrylovOptions& opt) {
  Vector r(b.size());
  A(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  project(r, opt);
  return r;
}

bool done(double rn, double bn, const KrylovOptions& opt) { return rn <= std::max(opt.rel_tol * bn, opt.abs_tol); }

}  // namespace

KrylovResult conjugate_gradient(const LinearOp& A, const Vector& b, Vector& x, const KrylovOptions& opt) {
  KrylovResult res;
  Vector bb = b;
  project(bb, opt);
  res.rhs_norm = nrm(bb);
  const double target = std::max(opt.rel_tol * res.rhs_norm, opt.abs_tol);
  if (opt.project_mean) project_mean_only(x);
  Vector z(b.size()), p(b.size()), q(b.size());
  // restarts from the true residual whenever the recursive one has drifted
  while (true) {
    Vector r = residual(A, bb, x, opt);
    res.residual = nrm(r);
    if (res.residual <= target) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= opt.max_iter) return res;
    precondition(r, z, opt);
    p = z;
    double rz = par::dot(r, z);
    bool stalled = true;
    while (res.iterations < opt.max_iter) {
      A(p, q);
      project(q, opt);
      const double pq = par::dot(p, q);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      par::axpy(alpha, p, x);
      par::axpy(-alpha, q, r);
      ++res.iterations;
      stalled = false;
      if (nrm(r) <= 0.5 * target) break;
      precondition(r, z, opt);
      const double rz_new = par::dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      const std::size_t n = p.size();
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (opt.project_mean) project_mean_only(x);
    if (stalled) {
      res.residual = nrm(residual(A, bb, x, opt));
      res.converged = res.residual <= target;
      return res;
    }
  }
}

KrylovResult bicgstab(const LinearOp& A, const Vector& b, Vector& x, const KrylovOptions& opt) {
  KrylovResult res;
  const std::size_t n = b.size();
  Vector bb = b;
  project(bb, opt);
  res.rhs_norm = nrm(bb);
  Vector r = residual(A, bb, x, opt);
  double rn = nrm(r);
  res.residual = rn;
  if (done(rn, res.rhs_norm, opt)) {
    res.converged = true;
    return res;
  }
  const Vector r0 = r;
  Vector p(n, 0.0), v(n, 0.0), s(n), t(n), y(n), z(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const double rho_new = par::dot(r0, r);
    if (rho_new == 0.0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precondition(p, y, opt);
    A(y, v);
    project(v, opt);
    const double r0v = par::dot(r0, v);
    if (r0v == 0.0) break;
    alpha = rho / r0v;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    res.iterations = it;
    if (done(nrm(s), res.rhs_norm, opt)) {
      par::axpy(alpha, y, x);
      break;
    }
    precondition(s, z, opt);
    A(z, t);
    project(t, opt);
    const double tt = par::dot(t, t);
    omega = tt > 0.0 ? par::dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    rn = nrm(r);
    if (done(rn, res.rhs_norm, opt) || omega == 0.0) break;
  }
  res.residual = nrm(residual(A, bb, x, opt));
  res.converged = res.residual <= 10.0 * std::max(opt.rel_tol * res.rhs_norm, opt.abs_tol);
  return res;
}

}  // namespace actflow
