#include "actflow/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace actflow {

namespace fs = std::filesystem;

double kinetic_energy(const FlowState& s, const Grid& g) {
  const double n = velocity_l2(s.u, s.v, g);
  return 0.5 * n * n;
}

double internal_energy(const FlowState& s, const Grid& g) { return integrate(s.e, g); }

double lr_norm(const Field2D& f, const Grid& g, double r) {
  double sum = 0.0;
  for (double x : f.a) sum += std::pow(std::abs(x), r);
  return std::pow(sum * g.cell_area(), 1.0 / r);
}

double w1r_norm(const Field2D& f, const Grid& g, double r) {
  Field2D gu, gv;
  gradient(f, g, gu, gv);
  double sum = 0.0;
  for (double x : gu.a) sum += std::pow(std::abs(x), r);
  for (double x : gv.a) sum += std::pow(std::abs(x), r);
  return lr_norm(f, g, r) + std::pow(sum * g.cell_area(), 1.0 / r);
}

double velocity_h1(const Field2D& u, const Field2D& v, const Grid& g, const std::vector<double>& slip_lo,
                   const std::vector<double>& slip_hi) {
  const int nx = g.nx;
  const int ny = g.ny;
  const bool walls = g.y_walls();
  const double hx = g.hx();
  const double hy = g.hy();
  double grad = 0.0;
  for (int j = 0; j < ny; ++j) {
    const int jn = walls ? j + 1 : (j + 1) % ny;
    for (int i = 0; i < nx; ++i) {
      const double ux = (u((i + 1) % nx, j) - u(i, j)) / hx;
      const double vy = (v(i, jn) - v(i, j)) / hy;
      grad += ux * ux + vy * vy;
    }
  }
  for (int j = 0; j < g.nvy(); ++j) {
    for (int i = 0; i < nx; ++i) {
      const int iw = (i + nx - 1) % nx;
      if (walls && (j == 0 || j == ny)) {
        const double uw = j == 0 ? (slip_lo.empty() ? 0.0 : slip_lo[i]) : (slip_hi.empty() ? 0.0 : slip_hi[i]);
        const double uy = j == 0 ? 2.0 * (u(i, 0) - uw) / hy : 2.0 * (uw - u(i, ny - 1)) / hy;
        grad += 0.5 * uy * uy;
        continue;
      }
      const int js = (j + ny - 1) % ny;
      const double uy = (u(i, j) - u(i, js)) / hy;
      const double vx = (v(i, j) - v(iw, j)) / hx;
      grad += uy * uy + vx * vx;
    }
  }
  const double l2 = velocity_l2(u, v, g);
  return std::sqrt(l2 * l2 + grad * g.cell_area());
}

BudgetRecord make_budget_record(int step, const FlowState& before, const FlowState& after, const MomentumInfo& info,
                                const SolverParams& params, const Grid& g) {
  BudgetRecord r;
  r.step = step;
  r.t = after.t;
  r.dt = params.dt;
  r.kinetic_energy = kinetic_energy(after, g);
  r.internal_energy = internal_energy(after, g);
  r.total_energy = r.kinetic_energy + r.internal_energy;
  r.wall_dissipation = info.wall_dissipation;
  r.bulk_dissipation = info.bulk_dissipation;
  r.eps_work = info.eps_work;
  r.forcing_work = info.forcing_work;
  r.div_residual = info.div_residual;
  r.div_norm = l2_norm(divergence(after.u, after.v, g), g);
  r.picard_iters = info.picard_iters;
  r.cg_iters = info.cg_iters;
  r.pressure_iters = info.pressure_iters;
  r.min_e = *std::min_element(after.e.a.begin(), after.e.a.end());
  r.max_v = std::max(max_abs(after.u), max_abs(after.v));
  const double before_total = kinetic_energy(before, g) + internal_energy(before, g);
  r.budget_residual =
      (r.total_energy - before_total) + params.dt * (r.wall_dissipation + r.eps_work - r.forcing_work);
  r.min_cell_dissipation = info.dissipation.a.empty()
                               ? 0.0
                               : *std::min_element(info.dissipation.a.begin(), info.dissipation.a.end());
  r.min_wall_dissipation = 0.0;
  for (std::size_t i = 0; i < info.traction_lo.size(); ++i) {
    r.min_wall_dissipation = std::min(r.min_wall_dissipation, info.traction_lo[i] * info.slip_lo[i]);
    r.min_wall_dissipation = std::min(r.min_wall_dissipation, info.traction_hi[i] * info.slip_hi[i]);
  }
  if (info.traction_lo.empty()) r.min_wall_dissipation = 0.0;

  r.v_l2 = velocity_l2(after.u, after.v, g);
  r.v_h1 = velocity_h1(after.u, after.v, g, info.slip_lo, info.slip_hi);
  double s2 = 0.0;
  const TensorField& d = info.rate;
  for (std::size_t n = 0; n < d.xx.size(); ++n) {
    const double lam = info.coeffs.cell.a[n];
    s2 += lam * lam * (d.xx.a[n] * d.xx.a[n] + d.yy.a[n] * d.yy.a[n] + 2.0 * d.xy.a[n] * d.xy.a[n]);
  }
  r.S_l2 = std::sqrt(s2 * g.cell_area());
  double w2 = 0.0;
  for (std::size_t i = 0; i < info.traction_lo.size(); ++i) {
    w2 += info.traction_lo[i] * info.traction_lo[i] + info.traction_hi[i] * info.traction_hi[i];
  }
  r.wall_traction_sq = w2 * g.hx();
  r.e_l1 = lr_norm(after.e, g, 1.0);
  r.e_w1_54 = w1r_norm(after.e, g, 1.25);
  r.p_l53 = lr_norm(after.p, g, 5.0 / 3.0);
  check_record(r);
  return r;
}

void check_record(const BudgetRecord& r) {
  const double vals[] = {r.kinetic_energy, r.internal_energy, r.wall_dissipation, r.bulk_dissipation, r.eps_work,
                         r.div_residual, r.min_e, r.budget_residual, r.v_h1, r.S_l2};
  for (double x : vals) {
    if (!std::isfinite(x)) throw std::logic_error("budget row " + std::to_string(r.step) + " has non-finite entries");
  }
  if (r.bulk_dissipation < 0.0 || r.wall_dissipation < 0.0 || r.min_cell_dissipation < 0.0 ||
      r.min_wall_dissipation < 0.0 || r.eps_work < 0.0) {
    throw std::logic_error("budget row " + std::to_string(r.step) + " has negative dissipation");
  }
}

std::string budgets_csv_header() {
  return "step,t,kinetic_energy,internal_energy,total_energy,wall_dissipation,bulk_dissipation,div_residual,"
         "picard_iters,cg_iters,min_e,max_|v|,dt,eps_work,forcing_work,div_norm,pressure_iters,budget_residual,"
         "min_cell_dissipation,min_wall_dissipation,v_l2,v_h1,S_l2,wall_traction_sq,e_l1,e_w1_54,p_l53";
}

void write_budgets_csv(std::ostream& os, const std::vector<BudgetRecord>& rows) {
  os << budgets_csv_header() << "\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const BudgetRecord& r : rows) {
    os << r.step << ',' << num(r.t) << ',' << num(r.kinetic_energy) << ',' << num(r.internal_energy) << ','
       << num(r.total_energy) << ',' << num(r.wall_dissipation) << ',' << num(r.bulk_dissipation) << ','
       << num(r.div_residual) << ',' << r.picard_iters << ',' << r.cg_iters << ',' << num(r.min_e) << ','
       << num(r.max_v) << ',' << num(r.dt) << ',' << num(r.eps_work) << ',' << num(r.forcing_work) << ','
       << num(r.div_norm) << ',' << r.pressure_iters << ',' << num(r.budget_residual) << ','
       << num(r.min_cell_dissipation) << ',' << num(r.min_wall_dissipation) << ',' << num(r.v_l2) << ','
       << num(r.v_h1) << ',' << num(r.S_l2) << ',' << num(r.wall_traction_sq) << ',' << num(r.e_l1) << ','
       << num(r.e_w1_54) << ',' << num(r.p_l53) << "\n";
  }
}

std::vector<BudgetRecord> read_budgets_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != budgets_csv_header()) {
    throw std::runtime_error("budgets CSV has an unexpected header");
  }
  std::vector<BudgetRecord> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 27) throw std::runtime_error("budgets CSV row has " + std::to_string(v.size()) + " columns");
    BudgetRecord r;
    std::size_t c = 0;
    r.step = static_cast<int>(v[c++]);
    r.t = v[c++];
    r.kinetic_energy = v[c++];
    r.internal_energy = v[c++];
    r.total_energy = v[c++];
    r.wall_dissipation = v[c++];
    r.bulk_dissipation = v[c++];
    r.div_residual = v[c++];
    r.picard_iters = static_cast<int>(v[c++]);
    r.cg_iters = static_cast<int>(v[c++]);
    r.min_e = v[c++];
    r.max_v = v[c++];
    r.dt = v[c++];
    r.eps_work = v[c++];
    r.forcing_work = v[c++];
    r.div_norm = v[c++];
    r.pressure_iters = static_cast<int>(v[c++]);
    r.budget_residual = v[c++];
    r.min_cell_dissipation = v[c++];
    r.min_wall_dissipation = v[c++];
    r.v_l2 = v[c++];
    r.v_h1 = v[c++];
    r.S_l2 = v[c++];
    r.wall_traction_sq = v[c++];
    r.e_l1 = v[c++];
    r.e_w1_54 = v[c++];
    r.p_l53 = v[c++];
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06d.bin", step);
  return buf;
}

}  // namespace

void write_run_outputs(const SimConfig& cfg, const Trajectory& traj) {
  const fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "config.json");
    out << dump_config(cfg);
  }
  {
    std::ofstream out(dir / "budgets.csv");
    write_budgets_csv(out, traj.budgets);
  }
  nlohmann::ordered_json meta;
  meta["c3"] = traj.c3;
  meta["initial_min_e"] = traj.initial_min_e;
  meta["epsilon"] = traj.epsilon;
  meta["steady"] = traj.steady;
  meta["status"] = traj.status;
  meta["seed"] = cfg.seed;
  meta["snapshot_steps"] = traj.snapshot_steps;
  {
    std::ofstream out(dir / "meta.json");
    out << meta.dump(2) << "\n";
  }
  for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
    write_snapshot((dir / snapshot_name(traj.snapshot_steps[n])).string(), traj.snapshots[n], traj.grid);
  }
  std::ofstream out(dir / "final_fields.csv");
  write_snapshot_csv(out, traj.final_state(), traj.grid);
}

Trajectory load_trajectory(const std::string& directory) {
  const fs::path dir(directory);
  Trajectory traj;
  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in) throw std::runtime_error("no meta.json in '" + directory + "'");
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  traj.c3 = meta.at("c3").get<double>();
  traj.initial_min_e = meta.at("initial_min_e").get<double>();
  traj.epsilon = meta.at("epsilon").get<double>();
  traj.steady = meta.at("steady").get<bool>();
  traj.status = meta.at("status").get<std::string>();
  std::ifstream csv(dir / "budgets.csv");
  if (!csv) throw std::runtime_error("no budgets.csv in '" + directory + "'");
  traj.budgets = read_budgets_csv(csv);
  for (int step : meta.at("snapshot_steps").get<std::vector<int>>()) {
    const fs::path p = dir / snapshot_name(step);
    if (!fs::exists(p)) continue;
    traj.snapshots.push_back(read_snapshot(p.string(), traj.grid));
    traj.snapshot_steps.push_back(step);
  }
  return traj;
}

bool AuditReport::passed() const {
  for (const AuditCheck& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const AuditCheck* AuditReport::find(const std::string& name) const {
  for (const AuditCheck& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string AuditReport::text() const {
  std::ostringstream os;
  os << "audit: " << (passed() ? "PASS" : "FAIL") << "\n";
  for (const AuditCheck& c : checks) {
    os << "  " << std::left << std::setw(22) << c.name << (c.passed ? "pass" : "FAIL") << "  worst "
       << std::setprecision(6) << c.worst << " at step " << c.worst_step << " (limit " << c.limit << ")\n";
  }
  return os.str();
}

std::string AuditReport::csv() const {
  std::ostringstream os;
  os << "check,passed,worst,worst_step,limit\n";
  os << std::setprecision(17);
  for (const AuditCheck& c : checks) {
    os << c.name << ',' << (c.passed ? 1 : 0) << ',' << c.worst << ',' << c.worst_step << ',' << c.limit << "\n";
  }
  return os.str();
}

AuditReport audit_trajectory(const Trajectory& traj, const AuditTolerances& tol) {
  AuditReport rep;
  AuditCheck diss{"dissipation_nonneg", true, 0.0, 0, -tol.dissipation};
  AuditCheck budget{"energy_budget", true, 0.0, 0, 0.0};
  AuditCheck minp{"minimum_principle", true, 0.0, 0, 0.0};
  AuditCheck div{"divergence_residual", true, 0.0, 0, tol.div_residual};
  AuditCheck mon{"monitors_bounded", true, 0.0, 0, tol.monitor_bound};
  const double floor = std::min(traj.c3, traj.initial_min_e) - tol.min_e;
  minp.limit = floor;
  minp.worst = std::numeric_limits<double>::infinity();
  double worst_budget_ratio = 0.0;
  for (const BudgetRecord& r : traj.budgets) {
    const double d = std::min({r.min_cell_dissipation, r.min_wall_dissipation, r.bulk_dissipation,
                               r.wall_dissipation, r.eps_work});
    if (d < diss.worst) {
      diss.worst = d;
      diss.worst_step = r.step;
    }
    const double lim = tol.budget_c * r.dt * r.dt + tol.budget_abs;
    const double ratio = std::abs(r.budget_residual) / lim;
    if (!(ratio <= worst_budget_ratio)) {
      worst_budget_ratio = ratio;
      budget.worst = std::abs(r.budget_residual);
      budget.worst_step = r.step;
      budget.limit = lim;
    }
    if (!(r.min_e >= minp.worst)) {
      minp.worst = r.min_e;
      minp.worst_step = r.step;
    }
    if (!(r.div_residual <= div.worst)) {
      div.worst = r.div_residual;
      div.worst_step = r.step;
    }
    const double m = std::max({r.v_l2, r.v_h1, r.S_l2, r.wall_traction_sq, r.e_l1, r.e_w1_54, r.p_l53});
    if (!(m <= mon.worst)) {
      mon.worst = m;
      mon.worst_step = r.step;
    }
  }
  if (traj.budgets.empty()) minp.worst = traj.initial_min_e;
  diss.passed = diss.worst >= -tol.dissipation;
  budget.passed = worst_budget_ratio <= 1.0;
  if (budget.limit == 0.0) budget.limit = tol.budget_abs;
  minp.passed = minp.worst >= floor;
  div.passed = div.worst <= tol.div_residual;
  mon.passed = std::isfinite(mon.worst) && mon.worst <= tol.monitor_bound;
  rep.checks = {diss, budget, minp, div, mon};

  if (!traj.snapshots.empty()) {
    AuditCheck imp{"impermeability", true, 0.0, 0, 0.0};
    AuditCheck pm{"pressure_mean", true, 0.0, 0, 1e-12};
    const Grid& g = traj.grid;
    for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
      const FlowState& s = traj.snapshots[n];
      if (g.y_walls()) {
        for (int i = 0; i < g.nx; ++i) {
          const double w = std::max(std::abs(s.v(i, 0)), std::abs(s.v(i, g.ny)));
          if (w > imp.worst) {
            imp.worst = w;
            imp.worst_step = traj.snapshot_steps[n];
          }
        }
      }
      const double m = std::abs(mean(s.p));
      if (m > pm.worst) {
        pm.worst = m;
        pm.worst_step = traj.snapshot_steps[n];
      }
    }
    imp.passed = imp.worst == 0.0;
    pm.passed = pm.worst <= pm.limit;
    rep.checks.push_back(imp);
    rep.checks.push_back(pm);
  }
  return rep;
}

double accumulated_budget_residual(const Trajectory& traj) {
  double sum = 0.0;
  for (const BudgetRecord& r : traj.budgets) sum += std::abs(r.budget_residual);
  return sum;
}

std::string KSweepTable::csv() const {
  std::ostringstream os;
  os << "k,sup_v_l2_sq,int_v_h1_sq,int_S_l2_sq,int_wall_sq,sup_e_l1,int_e_w1_54,int_p_l53,plug_creep\n";
  os << std::setprecision(12);
  for (const KSweepRow& r : rows) {
    os << r.k << ',' << r.sup_v_l2_sq << ',' << r.int_v_h1_sq << ',' << r.int_S_l2_sq << ',' << r.int_wall_sq << ','
       << r.sup_e_l1 << ',' << r.int_e_w1_54 << ',' << r.int_p_l53 << ',' << r.plug_creep << "\n";
  }
  return os.str();
}

KSweepRow k_sweep_row(int k, const Trajectory& traj, const std::vector<char>& plug_rows) {
  KSweepRow row;
  row.k = k;
  for (const BudgetRecord& r : traj.budgets) {
    row.sup_v_l2_sq = std::max(row.sup_v_l2_sq, r.v_l2 * r.v_l2);
    row.int_v_h1_sq += r.dt * r.v_h1 * r.v_h1;
    row.int_S_l2_sq += r.dt * r.S_l2 * r.S_l2;
    row.int_wall_sq += r.dt * r.wall_traction_sq;
    row.sup_e_l1 = std::max(row.sup_e_l1, r.e_l1);
    row.int_e_w1_54 += r.dt * r.e_w1_54;
    row.int_p_l53 += r.dt * r.p_l53;
  }
  if (!plug_rows.empty() && !traj.snapshots.empty()) {
    const FlowState& s = traj.final_state();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int j = 0; j < traj.grid.ny; ++j) {
      if (j >= static_cast<int>(plug_rows.size()) || !plug_rows[j]) continue;
      for (int i = 0; i < traj.grid.nx; ++i) {
        lo = std::min(lo, s.u(i, j));
        hi = std::max(hi, s.u(i, j));
      }
    }
    row.plug_creep = hi >= lo ? hi - lo : 0.0;
  }
  return row;
}

KSweepTable make_k_sweep_table(std::vector<KSweepRow> rows, double band) {
  KSweepTable t;
  t.rows = std::move(rows);
  t.band = band;
  t.monitor_names = {"sup_v_l2_sq", "int_v_h1_sq", "int_S_l2_sq", "int_wall_sq", "sup_e_l1", "int_e_w1_54",
                     "int_p_l53"};
  for (std::size_t m = 0; m < t.monitor_names.size(); ++m) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const KSweepRow& r : t.rows) {
      const double v[] = {r.sup_v_l2_sq, r.int_v_h1_sq, r.int_S_l2_sq, r.int_wall_sq,
                          r.sup_e_l1,    r.int_e_w1_54, r.int_p_l53};
      lo = std::min(lo, v[m]);
      hi = std::max(hi, v[m]);
    }
    double s = 0.0;
    if (hi > 0.0) s = lo > 0.0 ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
    // p and the wall traction vanish identically in some runs; tiny absolute levels are not growth
    if (hi <= 1e-12) s = 0.0;
    t.spread.push_back(s);
    if (s > band) t.violations.push_back(t.monitor_names[m]);
  }
  return t;
}

KSweepTable k_sweep_monitor(const SimConfig& base, const std::vector<int>& ks, const std::vector<char>& plug_rows,
                            double band) {
  std::vector<KSweepRow> rows;
  for (int k : ks) {
    SimConfig cfg = base;
    cfg.solver.k = k;
    cfg.solver.k_wall = 0;
    cfg.solver.k_convection = 0;
    if (!cfg.output.directory.empty()) cfg.output.directory += "/k" + std::to_string(k);
    const Trajectory traj = run(cfg);
    rows.push_back(k_sweep_row(k, traj, plug_rows));
  }
  return make_k_sweep_table(std::move(rows), band);
}

}  // namespace actflow
