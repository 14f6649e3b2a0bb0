#ifndef ACTFLOW_KERNELS_HPP_
#define ACTFLOW_KERNELS_HPP_

#include <vector>

#include "actflow/grid.hpp"

namespace actflow {

/// Frozen coefficients of the linear viscous operator.
///   cell       lambda at cell centers (scales Dxx, Dyy)
///   corner     lambda at corners (scales Dxy); wall rows unused
///   wall_lo/hi effective wall coefficient per column, bottom and top
struct ViscousCoeffs {
  Field2D cell;
  Field2D corner;
  std::vector<double> wall_lo;
  std::vector<double> wall_hi;
};

ViscousCoeffs make_viscous_coeffs(const Grid& g, double value = 0.0);

// Two implementations of each stencil kernel. `ref` is the plain serial
// reference; `par` is the OpenMP version used by the solver. Both produce the
// same floating-point result for the stencils; dot() in `par` uses fixed
// blocks so its result does not depend on the thread count.

namespace ref {

double dot(const std::vector<double>& a, const std::vector<double>& b);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);
void laplacian(const Grid& g, const Field2D& f, Field2D& out);
void divergence(const Grid& g, const Field2D& u, const Field2D& v, Field2D& out);
void gradient(const Grid& g, const Field2D& p, Field2D& gu, Field2D& gv);
/// Cell Dxx, Dyy and corner Dxy. Wall corner rows are left untouched.
void strain(const Grid& g, const Field2D& u, const Field2D& v, Field2D& dxx, Field2D& dyy, Field2D& dxy);
void viscous_apply(const Grid& g, const ViscousCoeffs& c, const Field2D& u, const Field2D& v, Field2D& ku,
                   Field2D& kv);
/// Skew-symmetric convection of (u, v) by the transport field (au, av).
void convection(const Grid& g, const Field2D& au, const Field2D& av, const Field2D& u, const Field2D& v,
                Field2D& cu, Field2D& cv);

}  // namespace ref

namespace par {

double dot(const std::vector<double>& a, const std::vector<double>& b);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);
void laplacian(const Grid& g, const Field2D& f, Field2D& out);
void divergence(const Grid& g, const Field2D& u, const Field2D& v, Field2D& out);
void gradient(const Grid& g, const Field2D& p, Field2D& gu, Field2D& gv);
void strain(const Grid& g, const Field2D& u, const Field2D& v, Field2D& dxx, Field2D& dyy, Field2D& dxy);
void viscous_apply(const Grid& g, const ViscousCoeffs& c, const Field2D& u, const Field2D& v, Field2D& ku,
                   Field2D& kv);
void convection(const Grid& g, const Field2D& au, const Field2D& av, const Field2D& u, const Field2D& v,
                Field2D& cu, Field2D& cv);

}  // namespace par

}  // namespace actflow

#endif  // ACTFLOW_KERNELS_HPP_
