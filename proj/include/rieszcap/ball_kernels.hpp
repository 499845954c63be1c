#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rieszcap/errors.hpp"
#include "rieszcap/rng.hpp"
#include "rieszcap/stable_sampling.hpp"
#include "rieszcap/vec.hpp"

namespace rieszcap {

// Proposal cap for every rejection sampler in this header.
inline constexpr long kMaxRejectionProposals = 1'000'000;

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_u(a, b).
inline double incomplete_beta_cf(double u, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double tol = 1e-15;
  constexpr int max_iter = 10000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * u / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * u / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * u / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < tol) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta function I_u(a, b), i.e. the Beta(a, b) CDF.
inline double regularized_incomplete_beta(double u, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a and b must be positive");
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("incomplete beta: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(u) + b * std::log1p(-u);
  if (u < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * detail::incomplete_beta_cf(u, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * detail::incomplete_beta_cf(1.0 - u, b, a) / b;
}

inline bool is_transient(double alpha, int dim) { return dim > alpha; }

/// Closed-form alpha-capacity of a ball of radius r in R^d.
inline double ball_capacity(double alpha, int dim, double radius = 1.0) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!is_transient(alpha, dim)) {
    throw std::domain_error("capacity undefined in recurrent case (d <= alpha)");
  }
  const double log_unit = std::lgamma(dim / 2.0) - std::lgamma(alpha / 2.0) -
                          std::lgamma((dim - alpha + 2.0) / 2.0);
  return std::pow(radius, dim - alpha) * std::exp(log_unit);
}

// ---------------------------------------------------------------------------
// Hitting probabilities
// ---------------------------------------------------------------------------

/// P(path started at |x| = rho hits the unit ball).
inline double hit_ball_probability(double alpha, int dim, double rho) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
  if (!(rho >= 1.0)) throw std::invalid_argument("hit_ball_probability: start point lies inside the ball");
  if (!is_transient(alpha, dim) || rho == 1.0) return 1.0;
  return regularized_incomplete_beta(1.0 / (rho * rho), (dim - alpha) / 2.0, alpha / 2.0);
}

/// Truncated power series for the same probability. Every coefficient is
/// positive for alpha < 2, so partial sums increase towards the Beta CDF.
inline double hit_ball_probability_series(double alpha, int dim, double rho, int n_terms) {
  if (!is_transient(alpha, dim)) throw std::invalid_argument("series needs the transient case d > alpha");
  if (!(rho > 1.0)) throw std::invalid_argument("series needs rho > 1");
  if (n_terms < 1) throw std::invalid_argument("series needs at least one term");
  const double gap = dim - alpha;
  double log_c = std::lgamma(dim / 2.0) - std::lgamma((gap + 2.0) / 2.0) - std::lgamma(alpha / 2.0);
  const double log_rho = std::log(rho);
  double sum = 0.0;
  for (int j = 0; j < n_terms; ++j) {
    if (j > 0) {
      const double ratio = (2.0 * j - alpha) * (gap + 2.0 * (j - 1)) / (2.0 * j * (gap + 2.0 * j));
      if (ratio <= 0.0) break;  // alpha = 2: c_j = 0 for j >= 1
      log_c += std::log(ratio);
    }
    const double term = std::exp(log_c - (gap + 2.0 * j) * log_rho);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Givens rotations
// ---------------------------------------------------------------------------

struct GivensRotation {
  int i;
  int j;
  double c;
  double s;
};

/// Rotation taking a vector x onto (|x|, 0, ..., 0), stored as a sequence of
/// plane rotations so both directions cost O(d).
class RotationPlan {
 public:
  RotationPlan() = default;
  explicit RotationPlan(std::vector<GivensRotation> steps) : steps_(std::move(steps)) {}

  Vec apply(Vec v) const {
    for (const auto& g : steps_) {
      const double a = v[g.i];
      const double b = v[g.j];
      v[g.i] = g.c * a + g.s * b;
      v[g.j] = -g.s * a + g.c * b;
    }
    return v;
  }

  Vec apply_inverse(Vec v) const {
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
      const double a = v[it->i];
      const double b = v[it->j];
      v[it->i] = it->c * a - it->s * b;
      v[it->j] = it->s * a + it->c * b;
    }
    return v;
  }

  const std::vector<GivensRotation>& steps() const { return steps_; }
  bool is_identity() const { return steps_.empty(); }

 private:
  std::vector<GivensRotation> steps_;
};

inline RotationPlan make_rotation_to_axis(const Vec& x) {
  if (x.norm2() == 0.0) throw std::invalid_argument("cannot rotate the zero vector onto an axis");
  std::vector<GivensRotation> steps;
  Vec v = x;
  // Zero the trailing components, last one first.
  for (int k = v.dim() - 1; k >= 1; --k) {
    const double a = v[k - 1];
    const double b = v[k];
    if (b == 0.0) continue;
    const double r = std::hypot(a, b);
    steps.push_back({k - 1, k, a / r, b / r});
    v[k - 1] = r;
    v[k] = 0.0;
  }
  if (v[0] < 0.0) {
    if (v.dim() < 2) throw std::invalid_argument("cannot rotate a negative vector in one dimension");
    steps.push_back({0, 1, -1.0, 0.0});
  }
  return RotationPlan(std::move(steps));
}

// ---------------------------------------------------------------------------
// Exact samplers for the unit ball
// ---------------------------------------------------------------------------

namespace detail {

inline void check_acceptance(double q, const char* sampler) {
  if (q > 1.0 + 1e-12 || !(q >= 0.0)) {
    throw std::logic_error(std::string(sampler) + ": acceptance probability " + std::to_string(q) +
                           " outside [0, 1]");
  }
}

[[noreturn]] inline void rejection_cap(const char* sampler, double radius) {
  throw SimulationError(std::string(sampler) + ": no acceptance after " +
                        std::to_string(kMaxRejectionProposals) + " proposals (|start| = " +
                        std::to_string(radius) + ")");
}

}  // namespace detail

/// First landing point inside the unit ball of an alpha-stable path started
/// at |start| > 1, conditioned on hitting. Rejection from the
/// equilibrium-shaped proposal (1 - |y|^2)^{-alpha/2}, accepting with
/// ((|x| - 1) / |x - y|)^d, in the frame where start lies on the first axis.
inline Vec sample_hit_location_in_ball(double alpha, int dim, const Vec& start, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("hit-location sampler needs 0 < alpha < 2; use the Poisson kernel for alpha = 2");
  }
  require_same_dim(start, dim, "sample_hit_location_in_ball");
  const double rho = start.norm();
  if (!(rho > 1.0)) throw std::invalid_argument("sample_hit_location_in_ball: start must lie outside the ball");
  const RotationPlan plan = make_rotation_to_axis(start);
  const Vec axis_start = Vec::axis(dim, 0, rho);
  const double gap = rho - 1.0;
  for (long k = 0; k < kMaxRejectionProposals; ++k) {
    const Vec y = sample_equilibrium_ball(alpha, dim, rng);
    const double q = std::pow(gap / distance(axis_start, y), dim);
    detail::check_acceptance(q, "sample_hit_location_in_ball");
    if (rng.uniform() < q) return plan.apply_inverse(y);
  }
  detail::rejection_cap("sample_hit_location_in_ball", rho);
}

/// First exit point from the unit ball of an alpha-stable path started at
/// |start| < 1. Centre start: Z / sqrt(B), B ~ Beta(alpha/2, 1 - alpha/2).
/// Off-centre start: the centre law is used as proposal for the exit density
/// (|y|^2 - 1)^{-alpha/2} |x - y|^{-d}, accepting with ((1 - |x|) |y| / |x - y|)^d.
/// Under spherical inversion this is the hitting kernel seen from x / |x|^2
/// reweighted by |y|^{d - alpha}.
inline Vec sample_exit_location_from_ball(double alpha, int dim, const Vec& start, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("exit sampler needs 0 < alpha < 2");
  require_same_dim(start, dim, "sample_exit_location_from_ball");
  const double r0 = start.norm();
  if (!(r0 < 1.0)) throw std::invalid_argument("sample_exit_location_from_ball: start must lie inside the ball");
  auto centre_draw = [&]() {
    const Vec dir = sample_uniform_sphere(dim, rng);
    const double b = sample_beta(alpha / 2.0, 1.0 - alpha / 2.0, rng);
    return dir * std::max(1.0 / std::sqrt(b), std::nextafter(1.0, 2.0));
  };
  if (r0 == 0.0) return centre_draw();
  const double gap = 1.0 - r0;
  for (long k = 0; k < kMaxRejectionProposals; ++k) {
    const Vec y = centre_draw();
    const double q = std::pow(gap * y.norm() / distance(start, y), dim);
    detail::check_acceptance(q, "sample_exit_location_from_ball");
    if (rng.uniform() < q) return y;
  }
  detail::rejection_cap("sample_exit_location_from_ball", r0);
}

/// Brownian re-entry point on the unit sphere from |start| > 1: density
/// proportional to the exterior Poisson kernel (|x|^2 - 1) / |x - y|^d.
inline Vec sample_brownian_reentry_sphere(int dim, const Vec& start, RngStream& rng) {
  if (dim < 2) throw std::invalid_argument("Poisson-kernel sampler needs d >= 2");
  require_same_dim(start, dim, "sample_brownian_reentry_sphere");
  const double rho = start.norm();
  if (!(rho > 1.0)) throw std::invalid_argument("sample_brownian_reentry_sphere: start must lie outside the ball");
  const double gap = rho - 1.0;
  for (long k = 0; k < kMaxRejectionProposals; ++k) {
    const Vec y = sample_uniform_sphere(dim, rng);
    const double q = std::pow(gap / distance(start, y), dim);
    detail::check_acceptance(q, "sample_brownian_reentry_sphere");
    if (rng.uniform() < q) return y;
  }
  detail::rejection_cap("sample_brownian_reentry_sphere", rho);
}

// ---------------------------------------------------------------------------
// Arbitrary balls: shift and scale to the unit ball and back
// ---------------------------------------------------------------------------

struct BallGeometry {
  Vec center;
  double radius = 1.0;

  BallGeometry() = default;
  BallGeometry(Vec c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  }

  int dim() const { return center.dim(); }
  Vec to_unit(const Vec& x) const { return (x - center) / radius; }
  Vec from_unit(const Vec& y) const { return center + y * radius; }
};

inline double hit_probability(const BallGeometry& ball, double alpha, const Vec& x) {
  return hit_ball_probability(alpha, ball.dim(), ball.to_unit(x).norm());
}

inline Vec sample_hit_location(const BallGeometry& ball, double alpha, const Vec& x, RngStream& rng) {
  return ball.from_unit(sample_hit_location_in_ball(alpha, ball.dim(), ball.to_unit(x), rng));
}

inline Vec sample_exit_location(const BallGeometry& ball, double alpha, const Vec& x, RngStream& rng) {
  return ball.from_unit(sample_exit_location_from_ball(alpha, ball.dim(), ball.to_unit(x), rng));
}

inline Vec sample_brownian_reentry(const BallGeometry& ball, const Vec& x, RngStream& rng) {
  return ball.from_unit(sample_brownian_reentry_sphere(ball.dim(), ball.to_unit(x), rng));
}

}  // namespace rieszcap
