#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rieszcap/rng.hpp"
#include "rieszcap/vec.hpp"

namespace rieszcap {

/// Parameters of one isotropic alpha-stable step with characteristic
/// function exp(-gamma^alpha |u|^alpha).
struct StableStepParams {
  double alpha = 2.0;
  double gamma = 1.0;
  int dim = 3;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
      throw std::invalid_argument("alpha must lie in (0, 2], got " + std::to_string(alpha));
    }
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (dim < 2 || dim > kMaxDim) {
      throw std::invalid_argument("dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
    }
  }
};

inline Vec sample_uniform_sphere(int dim, RngStream& rng) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("invalid dimension " + std::to_string(dim) + " for sphere sampling");
  }
  Vec z(dim);
  double n2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) z[i] = rng.normal();
    n2 = z.norm2();
  } while (n2 == 0.0);
  return z / std::sqrt(n2);
}

/// A Beta draw together with its complement, both computed without
/// cancellation. Shapes below one push mass against 0 or 1, where forming
/// 1 - value would lose every significant digit.
struct BetaVariate {
  double value;
  double complement;
};

namespace detail {

// log of a Gamma(shape, 1) variate; shapes < 1 use the U^{1/a} boost so the
// result stays finite even when the variate itself would underflow.
inline double log_gamma_variate(double shape, RngStream& rng) {
  if (shape >= 1.0) return std::log(rng.gamma(shape));
  return std::log(rng.gamma(shape + 1.0)) + std::log(rng.uniform_open()) / shape;
}

}  // namespace detail

inline BetaVariate sample_beta_pair(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("Beta parameters must be positive");
  }
  const double lx = detail::log_gamma_variate(a, rng);
  const double ly = detail::log_gamma_variate(b, rng);
  return {1.0 / (1.0 + std::exp(ly - lx)), 1.0 / (1.0 + std::exp(lx - ly))};
}

inline double sample_beta(double a, double b, RngStream& rng) { return sample_beta_pair(a, b, rng).value; }

/// Totally skewed positive stable variate via Chambers-Mallows-Stuck.
///
/// Parameterised so that E exp(-lambda S) = exp(-(scale lambda)^index / cos(pi index / 2)),
/// i.e. S ~ S_index(scale, 1, 0) in the Samorodnitsky-Taqqu convention.
inline double sample_positive_stable(double index, double scale, RngStream& rng) {
  if (!(index > 0.0 && index < 1.0)) {
    throw std::invalid_argument("positive stable index must lie in (0, 1)");
  }
  if (!(scale > 0.0)) throw std::invalid_argument("positive stable scale must be positive");
  constexpr double half_pi = std::numbers::pi / 2.0;
  const double theta = (rng.uniform_open() - 0.5) * std::numbers::pi;
  const double w = rng.exponential();
  const double shifted = index * (theta + half_pi);
  const double lead = std::pow(std::cos(half_pi * index), -1.0 / index);
  const double x = lead * std::sin(shifted) / std::pow(std::cos(theta), 1.0 / index) *
                   std::pow(std::cos(theta - shifted) / w, (1.0 - index) / index);
  return scale * x;
}

/// Isotropic stable step: sub-Gaussian construction sqrt(S) * Z with S a
/// positive (alpha/2)-stable subordinator. The subordinator scale
/// 2 gamma^2 cos(pi alpha / 4)^{2/alpha} is what makes the characteristic
/// function come out as exp(-gamma^alpha |u|^alpha) under the CMS convention above.
inline Vec sample_isotropic_stable_step(const StableStepParams& p, RngStream& rng) {
  p.validate();
  Vec z(p.dim);
  for (int i = 0; i < p.dim; ++i) z[i] = rng.normal();
  if (p.alpha == 2.0) return z * (std::numbers::sqrt2 * p.gamma);
  const double index = p.alpha / 2.0;
  const double scale =
      2.0 * p.gamma * p.gamma * std::pow(std::cos(std::numbers::pi * p.alpha / 4.0), 2.0 / p.alpha);
  return z * std::sqrt(sample_positive_stable(index, scale, rng));
}

/// Point from the alpha-equilibrium measure of the unit ball. For alpha < 2
/// the radius satisfies |Y|^2 ~ Beta(d/2, 1 - alpha/2); for alpha = 2 the
/// measure is uniform on the sphere.
inline Vec sample_equilibrium_ball(double alpha, int dim, RngStream& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
  if (dim < 2) throw std::invalid_argument("equilibrium ball sampling needs d >= 2");
  const Vec dir = sample_uniform_sphere(dim, rng);
  if (alpha == 2.0) return dir;
  const BetaVariate b = sample_beta_pair(dim / 2.0, 1.0 - alpha / 2.0, rng);
  // Keep the point in the open ball even when 1 - B underflows.
  const double r = std::min(std::sqrt(b.value), std::nextafter(1.0, 0.0));
  return dir * r;
}

}  // namespace rieszcap
