#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracpf/errors.hpp"

namespace fracpf {

/// Rectangle [x0, x1) x [y0, y1) with periodic identification.
struct Domain {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double lx() const { return x1 - x0; }
  double ly() const { return y1 - y0; }
  double area() const { return lx() * ly(); }

  friend bool operator==(const Domain&, const Domain&) = default;
};

/// Real periodic grid function on an M x M uniform grid. Storage is row-major
/// in y: value(i, j) sits at x_i = x0 + i h_x, y_j = y0 + j h_y.
class Field2D {
 public:
  Field2D() = default;

  Field2D(std::size_t M, Domain domain, double value = 0.0) : M_(M), domain_(domain), data_(M * M, value) {
    if (M < 4 || M % 2 != 0) throw std::invalid_argument("Field2D: grid size must be even and >= 4");
    if (!(domain.lx() > 0.0) || !(domain.ly() > 0.0)) throw std::invalid_argument("Field2D: empty domain");
  }

  std::size_t size() const { return M_; }
  std::size_t points() const { return data_.size(); }
  const Domain& domain() const { return domain_; }

  double x(std::size_t i) const { return domain_.x0 + domain_.lx() * static_cast<double>(i) / M_; }
  double y(std::size_t j) const { return domain_.y0 + domain_.ly() * static_cast<double>(j) / M_; }
  double cell_area() const { return domain_.area() / static_cast<double>(data_.size()); }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * M_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * M_ + i]; }
  double& operator[](std::size_t p) { return data_[p]; }
  double operator[](std::size_t p) const { return data_[p]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_grid(const Field2D& o) const { return M_ == o.M_ && domain_ == o.domain_; }

  template <class F>
  static Field2D sample(std::size_t M, Domain domain, F&& f) {
    Field2D out(M, domain);
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t i = 0; i < M; ++i) out(i, j) = f(out.x(i), out.y(j));
    return out;
  }

  Field2D& operator+=(const Field2D& o) {
    check(o);
    for (std::size_t p = 0; p < data_.size(); ++p) data_[p] += o.data_[p];
    return *this;
  }
  Field2D& operator-=(const Field2D& o) {
    check(o);
    for (std::size_t p = 0; p < data_.size(); ++p) data_[p] -= o.data_[p];
    return *this;
  }
  Field2D& operator*=(double a) {
    for (double& v : data_) v *= a;
    return *this;
  }
  Field2D& operator+=(double a) {
    for (double& v : data_) v += a;
    return *this;
  }

  friend Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
  friend Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
  friend Field2D operator*(double s, Field2D a) { return a *= s; }

  /// Pointwise product.
  friend Field2D hadamard(Field2D a, const Field2D& b) {
    a.check(b);
    for (std::size_t p = 0; p < a.data_.size(); ++p) a.data_[p] *= b.data_[p];
    return a;
  }

  friend bool operator==(const Field2D&, const Field2D&) = default;

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  bool finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  void check(const Field2D& o) const { detail::require(same_grid(o), "Field2D: grid mismatch"); }

 private:
  std::size_t M_ = 0;
  Domain domain_{};
  std::vector<double> data_;
};

// y += a x
inline void axpy(Field2D& y, double a, const Field2D& x) {
  y.check(x);
  auto yv = y.values();
  auto xv = x.values();
  for (std::size_t p = 0; p < yv.size(); ++p) yv[p] += a * xv[p];
}

// y = a y + b x
inline void scale_add(Field2D& y, double a, double b, const Field2D& x) {
  y.check(x);
  auto yv = y.values();
  auto xv = x.values();
  for (std::size_t p = 0; p < yv.size(); ++p) yv[p] = a * yv[p] + b * xv[p];
}

inline Field2D zero_like(const Field2D& f) { return Field2D(f.size(), f.domain()); }

/// Grid average (1/|Omega|) int f.
inline double mean(const Field2D& f) {
  auto v = f.values();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// L2 inner product by uniform-grid quadrature.
inline double inner(const Field2D& f, const Field2D& g) {
  f.check(g);
  auto a = f.values();
  auto b = g.values();
  double s = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * b[p];
  return s * f.cell_area();
}

inline double integral(const Field2D& f) { return mean(f) * f.domain().area(); }

inline double max_abs_diff(const Field2D& a, const Field2D& b) {
  a.check(b);
  double m = 0.0;
  for (std::size_t p = 0; p < a.points(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

// Scalar overloads so history code can be shared between fields and scalars.
inline void axpy(double& y, double a, double x) { y += a * x; }
inline void scale_add(double& y, double a, double b, double x) { y = a * y + b * x; }
inline double zero_like(double) { return 0.0; }

}  // namespace fracpf
