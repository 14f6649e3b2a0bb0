#ifndef ACTFLOW_GRID_HPP_
#define ACTFLOW_GRID_HPP_

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace actflow {

enum class Boundary { kWall, kPeriodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Rectangular MAC grid on [0, Lx] x [0, Ly].
///
/// Layout (row-major, index j * nx + i):
///   cell (i, j)   center ((i+1/2) hx, (j+1/2) hy)     nx x ny
///   u    (i, j)   face   (i hx, (j+1/2) hy)            nx x ny
///   v    (i, j)   face   ((i+1/2) hx, j hy)            nx x nvy
///   corner (i, j) point  (i hx, j hy)                  nx x nvy
/// with nvy = ny + 1 for walls in y (rows 0 and ny lie on the walls) and
/// nvy = ny when y is periodic. x is always periodic.
struct Grid {
  double Lx = 1.0;
  double Ly = 1.0;
  int nx = 16;
  int ny = 16;
  Boundary x_boundary = Boundary::kPeriodic;
  Boundary y_boundary = Boundary::kWall;

  double hx() const { return Lx / nx; }
  double hy() const { return Ly / ny; }
  double cell_area() const { return hx() * hy(); }
  bool y_walls() const { return y_boundary == Boundary::kWall; }
  int nvy() const { return y_walls() ? ny + 1 : ny; }
  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }

  /// Throws std::invalid_argument on a malformed grid.
  void validate() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Scalar array on one of the staggered locations.
struct Field2D {
  int nx = 0;
  int ny = 0;
  std::vector<double> a;

  Field2D() = default;
  Field2D(int nx_, int ny_, double value = 0.0)
      : nx(nx_), ny(ny_), a(static_cast<std::size_t>(nx_) * ny_, value) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(j) * nx + i]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(j) * nx + i]; }
  std::size_t size() const { return a.size(); }
  void fill(double value) { std::fill(a.begin(), a.end(), value); }
  bool same_shape(const Field2D& o) const { return nx == o.nx && ny == o.ny; }

  friend bool operator==(const Field2D&, const Field2D&) = default;
};

Field2D make_cell_field(const Grid& g, double value = 0.0);
Field2D make_u_field(const Grid& g, double value = 0.0);
Field2D make_v_field(const Grid& g, double value = 0.0);
Field2D make_corner_field(const Grid& g, double value = 0.0);

/// Velocity, pressure and internal energy at one time level.
struct FlowState {
  Field2D u;
  Field2D v;
  Field2D p;
  Field2D e;
  double t = 0.0;

  static FlowState zeros(const Grid& g, double e0 = 0.0);
  bool consistent_with(const Grid& g) const;

  friend bool operator==(const FlowState&, const FlowState&) = default;
};

/// Symmetric 2x2 tensors at cell centers, stored by component.
struct TensorField {
  Field2D xx;
  Field2D yy;
  Field2D xy;
};

// Discrete operators. All use the OpenMP kernels.

TensorField sym_gradient(const FlowState& s, const Grid& g);
Field2D divergence(const FlowState& s, const Grid& g);
Field2D divergence(const Field2D& u, const Field2D& v, const Grid& g);
/// Face gradient of a cell field; zero on wall faces.
void gradient(const Field2D& p, const Grid& g, Field2D& gu, Field2D& gv);
Field2D neumann_laplacian_apply(const Field2D& f, const Grid& g);

/// Sum over cells weighted by the cell area.
double integrate(const Field2D& f, const Grid& g);
double mean(const Field2D& f);
void remove_mean(Field2D& f);
double l2_norm(const Field2D& f, const Grid& g);
/// sqrt(A * sum(u^2) + A * sum(v^2)), the discrete L2 norm of a face field.
double velocity_l2(const Field2D& u, const Field2D& v, const Grid& g);
double max_abs(const Field2D& f);
bool all_finite(const Field2D& f);

/// Velocity of a stream function given at corners: u = d psi/dy, v = -d psi/dx.
/// Discretely divergence free by construction; psi must be constant along
/// each wall for impermeability.
void velocity_from_stream(const Field2D& psi, const Grid& g, Field2D& u, Field2D& v);

// Snapshot IO. Binary layout: magic "AFSNAP01", int32 nx, ny, int32 y-walls flag,
// float64 Lx, Ly, t, then u, v, p, e as float64 row-major arrays.

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_snapshot(const std::string& path, const FlowState& s, const Grid& g);
FlowState read_snapshot(const std::string& path, Grid& g);
/// CSV dump: one row per cell with x, y, u, v (centered), p, e.
void write_snapshot_csv(std::ostream& os, const FlowState& s, const Grid& g);

}  // namespace actflow

#endif  // ACTFLOW_GRID_HPP_
