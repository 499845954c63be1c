#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace rieszcap {

// Largest ambient dimension supported by the fixed-capacity point type.
inline constexpr int kMaxDim = 16;

// Point/vector in R^d with inline storage. The walkers take millions of
// steps per run, so points never touch the heap.
class Vec {
 public:
  Vec() = default;

  explicit Vec(int dim) : dim_(dim) {
    if (dim < 0 || dim > kMaxDim) {
      throw std::invalid_argument("dimension must be in [0, " + std::to_string(kMaxDim) +
                                  "], got " + std::to_string(dim));
    }
  }

  Vec(std::initializer_list<double> coords) : Vec(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  explicit Vec(std::span<const double> coords) : Vec(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  static Vec zeros(int dim) { return Vec(dim); }

  static Vec axis(int dim, int k, double length = 1.0) {
    Vec v(dim);
    v[k] = length;
    return v;
  }

  int dim() const { return dim_; }
  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }

  std::span<double> coords() { return {c_.data(), static_cast<std::size_t>(dim_)}; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }
  Vec& operator/=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] /= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator/(Vec a, double s) { return a /= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i) {
      if (a.c_[i] != b.c_[i]) return false;
    }
    return true;
  }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double distance2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline double distance(const Vec& a, const Vec& b) { return std::sqrt(distance2(a, b)); }

inline void require_same_dim(const Vec& a, int dim, const char* what) {
  if (a.dim() != dim) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(dim) + ", got " + std::to_string(a.dim()) + ")");
  }
}

}  // namespace rieszcap
