#ifndef ACTFLOW_TENSOR_HPP_
#define ACTFLOW_TENSOR_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace actflow {

template <int Dim>
using Vec = std::array<double, Dim>;

/// Symmetric Dim x Dim tensor stored by its upper triangle.
///
/// Component order is the diagonal first (xx, yy[, zz]) followed by the
/// off-diagonal entries (xy[, xz, yz]). The Frobenius inner product counts
/// every off-diagonal entry twice.
template <int Dim>
class SymTensor {
  static_assert(Dim == 2 || Dim == 3, "planar or spatial tensors only");

 public:
  static constexpr int kSize = Dim * (Dim + 1) / 2;

  SymTensor() { c_.fill(0.0); }

  static SymTensor from_components(const std::array<double, kSize>& c) {
    SymTensor t;
    t.c_ = c;
    return t;
  }

  double operator()(int i, int j) const { return c_[index(i, j)]; }
  double& operator()(int i, int j) { return c_[index(i, j)]; }

  const std::array<double, kSize>& components() const { return c_; }

  double trace() const {
    double tr = 0.0;
    for (int i = 0; i < Dim; ++i) tr += c_[i];
    return tr;
  }

  SymTensor deviatoric() const {
    SymTensor out = *this;
    const double m = trace() / Dim;
    for (int i = 0; i < Dim; ++i) out.c_[i] -= m;
    return out;
  }

  SymTensor& operator+=(const SymTensor& o) {
    for (int i = 0; i < kSize; ++i) c_[i] += o.c_[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (int i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  SymTensor& operator*=(double a) {
    for (double& x : c_) x *= a;
    return *this;
  }

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }
  friend SymTensor operator*(SymTensor a, double s) { return a *= s; }

  friend double inner(const SymTensor& a, const SymTensor& b) {
    double s = 0.0;
    for (int i = 0; i < Dim; ++i) s += a.c_[i] * b.c_[i];
    for (int i = Dim; i < kSize; ++i) s += 2.0 * a.c_[i] * b.c_[i];
    return s;
  }

  friend double norm(const SymTensor& a) { return std::sqrt(inner(a, a)); }

 private:
  static int index(int i, int j) {
    if (i == j) return i;
    if (i > j) std::swap(i, j);
    if constexpr (Dim == 2) {
      return 2;
    } else {
      // (0,1) -> 3, (0,2) -> 4, (1,2) -> 5
      return 3 + i + j - 1;
    }
  }

  std::array<double, kSize> c_;
};

template <std::size_t N>
double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
double norm(const std::array<double, N>& a) {
  return std::sqrt(dot<N>(a, a));
}

template <std::size_t N>
std::array<double, N> scaled(const std::array<double, N>& a, double s) {
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = s * a[i];
  return out;
}

template <std::size_t N>
std::array<double, N> operator-(const std::array<double, N>& a, const std::array<double, N>& b) {
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i] - b[i];
  return out;
}

using Tensor2 = SymTensor<2>;
using Tensor3 = SymTensor<3>;
using Vec2 = Vec<2>;

}  // namespace actflow

#endif  // ACTFLOW_TENSOR_HPP_
