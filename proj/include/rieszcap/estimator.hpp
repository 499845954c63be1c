#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rieszcap/stats.hpp"
#include "rieszcap/vec.hpp"

namespace rieszcap {

struct EstimatorConfig {
  long n1 = 0;  // group-1 size; 0 means n/2
  double p_tau = 0.995;
  double delta = 0.05;
  // Use the v1 expression with squared row means, for comparison only.
  bool literal_v1 = false;
  // Tail pairs (i, j) are only taken from the band 0 < j - i <= tail_band.
  // 0 picks the band so each point has about 0.4 candidate exceedances;
  // -1 scans all pairs.
  long tail_band = 0;

  long resolved_n1(long n) const { return n1 > 0 ? n1 : n / 2; }

  long resolved_tail_band() const {
    if (tail_band > 0) return tail_band;
    if (tail_band < 0) return std::numeric_limits<long>::max();
    return std::max(1L, std::lround(0.2 / (1.0 - p_tau)));
  }

  void validate(long n) const {
    if (n < 4) throw std::invalid_argument("insufficient sample: need at least 4 hit points, got " + std::to_string(n));
    const long m = resolved_n1(n);
    if (m < 2 || m >= n) throw std::invalid_argument("n1 must satisfy 2 <= n1 < n");
    if (!(p_tau > 0.0 && p_tau < 1.0)) throw std::invalid_argument("p_tau must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  }
};

/// Kernel |x - y|^{alpha - d} from the squared distance. Zero distance gives +inf.
inline double kernel_from_d2(double d2, double alpha, int d) {
  const double e = 0.5 * (alpha - d);
  if (e == 0.0) return 1.0;
  if (d2 == 0.0) return std::numeric_limits<double>::infinity();
  if (e == -0.5) return 1.0 / std::sqrt(d2);
  if (e == -1.0) return 1.0 / d2;
  return std::pow(d2, e);
}

namespace detail {

inline void check_points(std::span<const Vec> points, double alpha, int d) {
  if (points.size() < 2) throw std::invalid_argument("need at least 2 points");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
  if (alpha > d) throw std::invalid_argument("kernel requires alpha <= d");
  for (const auto& p : points) require_same_dim(p, d, "hit point");
}

}  // namespace detail

/// Dense symmetric kernel matrix for small samples and reference checks.
class KernelMatrix {
 public:
  KernelMatrix() = default;
  explicit KernelMatrix(long n) : n_(n), w_(static_cast<std::size_t>(n * n), std::numeric_limits<double>::quiet_NaN()) {}

  long size() const { return n_; }
  double operator()(long i, long j) const { return w_[static_cast<std::size_t>(i * n_ + j)]; }
  void set(long i, long j, double v) {
    w_[static_cast<std::size_t>(i * n_ + j)] = v;
    w_[static_cast<std::size_t>(j * n_ + i)] = v;
  }
  /// Principal submatrix on indices [first, first + count).
  KernelMatrix block(long first, long count) const {
    KernelMatrix b(count);
    for (long i = 0; i < count; ++i)
      for (long j = i + 1; j < count; ++j) b.set(i, j, (*this)(first + i, first + j));
    return b;
  }
  /// Off-diagonal upper-triangle values in lexicographic pair order.
  std::vector<double> upper_values() const {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n_ * (n_ - 1) / 2));
    for (long i = 0; i < n_; ++i)
      for (long j = i + 1; j < n_; ++j) v.push_back((*this)(i, j));
    return v;
  }
  long coincident_pairs() const {
    long c = 0;
    for (long i = 0; i < n_; ++i)
      for (long j = i + 1; j < n_; ++j) c += std::isinf((*this)(i, j)) ? 1 : 0;
    return c;
  }

 private:
  long n_ = 0;
  std::vector<double> w_;
};

inline KernelMatrix pairwise_kernel(std::span<const Vec> points, double alpha, int d) {
  detail::check_points(points, alpha, d);
  const long n = static_cast<long>(points.size());
  KernelMatrix m(n);
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) m.set(i, j, kernel_from_d2(distance2(points[i], points[j]), alpha, d));
  return m;
}

struct Threshold {
  double tau = 0.0;
  bool degenerate = false;  // every value equal
  long excluded = 0;        // infinite (coincident) values dropped
};

namespace detail {

// Type-7 quantile: linear interpolation between order statistics
// floor(h) and floor(h)+1 (0-based), h = (N - 1) p.
inline std::pair<std::size_t, double> type7_position(std::size_t count, double p) {
  const double h = static_cast<double>(count - 1) * p;
  const double lo = std::floor(h);
  return {static_cast<std::size_t>(lo), h - lo};
}

}  // namespace detail

/// Empirical p_tau quantile (type-7, linear interpolation) of the group-1
/// off-diagonal kernel values. Infinite values are dropped and counted.
inline Threshold choose_threshold(std::vector<double> values, double p_tau) {
  if (!(p_tau > 0.0 && p_tau < 1.0)) throw std::invalid_argument("p_tau must lie in (0, 1)");
  Threshold t;
  const auto finite_end = std::partition(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  t.excluded = static_cast<long>(values.end() - finite_end);
  values.erase(finite_end, values.end());
  if (values.size() < 10) {
    throw std::invalid_argument("threshold needs at least 10 finite group-1 pair values, got " +
                                std::to_string(values.size()));
  }
  const auto [k, frac] = detail::type7_position(values.size(), p_tau);
  std::nth_element(values.begin(), values.begin() + static_cast<long>(k), values.end());
  const double lo = values[k];
  double hi = lo;
  if (frac > 0.0 && k + 1 < values.size()) hi = *std::min_element(values.begin() + static_cast<long>(k) + 1, values.end());
  t.tau = lo + frac * (hi - lo);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  t.degenerate = (*mn == *mx);
  return t;
}

struct I1Result {
  double I1 = 0.0;
  double v1 = 0.0;
  double sigma1_sq = 0.0;
};

namespace detail {

inline I1Result i1_from_row_means(const std::vector<double>& row_mean, bool literal_v1) {
  I1Result r;
  const auto m = static_cast<double>(row_mean.size());
  if (row_mean.empty()) return r;
  double s = 0.0;
  for (double x : row_mean) s += x;
  r.I1 = s / m;
  if (row_mean.size() < 2) return r;
  double ss = 0.0;
  for (double x : row_mean) {
    const double dev = literal_v1 ? x * x - r.I1 : x - r.I1;
    ss += dev * dev;
  }
  r.v1 = ss / (m - 1.0);
  r.sigma1_sq = 4.0 * r.v1 / m;
  return r;
}

}  // namespace detail

/// Truncated U-statistic on group 1 and the Sen variance of its row means.
/// Infinite (coincident) entries are left out of the row means.
inline I1Result estimate_I1(const KernelMatrix& group1, double tau, bool literal_v1 = false) {
  if (group1.size() < 2) throw std::invalid_argument("estimate_I1 needs n1 >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const long n = group1.size();
  std::vector<double> row_mean;
  row_mean.reserve(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j) {
    double s = 0.0;
    long c = 0;
    for (long i = 0; i < n; ++i) {
      if (i == j) continue;
      const double w = group1(i, j);
      if (std::isinf(w)) continue;
      s += std::min(w, tau);
      ++c;
    }
    if (c > 0) row_mean.push_back(s / static_cast<double>(c));
  }
  return detail::i1_from_row_means(row_mean, literal_v1);
}

struct TailSample {
  std::vector<double> z;
  std::vector<std::pair<long, long>> pairs;  // indices local to group 2
};

/// Greedy lexicographic scan of group-2 pairs: take w_ij > tau when neither
/// index has been used before, so the selected values are index-disjoint.
/// `band` limits the scan to pairs with j - i <= band.
///
/// When most points have many exceedances the unrestricted scan is biased:
/// which pairs get matched depends on the values, and the Hill index comes
/// out low. A narrow band keeps the exceedance graph sparse so that the choice is
/// rarely forced; EstimatorConfig picks such a band by default.
inline TailSample select_tail_sample(const KernelMatrix& group2, double tau,
                                     long band = std::numeric_limits<long>::max()) {
  if (band < 1) throw std::invalid_argument("select_tail_sample: band must be positive");
  TailSample t;
  const long n = group2.size();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (long i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    const long end = band >= n - i ? n : i + band + 1;
    for (long j = i + 1; j < end; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double w = group2(i, j);
      if (w > tau && std::isfinite(w)) {
        t.z.push_back(w);
        t.pairs.emplace_back(i, j);
        used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = 1;
        break;
      }
    }
  }
  return t;
}

/// Hill tail index estimate nu = (mean log z - log tau)^{-1}.
inline double hill_estimator(std::span<const double> z, double tau) {
  if (z.empty()) throw std::invalid_argument("hill_estimator: empty tail sample");
  if (!(tau > 0.0)) throw std::invalid_argument("hill_estimator: tau must be positive");
  double s = 0.0;
  for (double v : z) {
    if (!(v > tau)) throw std::invalid_argument("hill_estimator: tail values must exceed tau");
    s += std::log(v / tau);
  }
  return static_cast<double>(z.size()) / s;
}

struct I2Result {
  double I2 = 0.0;
  double sigma2_sq = 0.0;  // NaN when I2 is infinite
};

/// Tail contribution (1 - p_tau) tau / (nu - 1), infinite for nu <= 1, with
/// the delta-method variance g'(nu)^2 nu^2 / n3.
inline I2Result estimate_I2(double nu_hat, double tau, double p_tau, long n3) {
  if (!(tau > 0.0)) throw std::invalid_argument("estimate_I2: tau must be positive");
  if (n3 < 1) throw std::invalid_argument("estimate_I2: n3 must be positive");
  I2Result r;
  if (!(nu_hat > 1.0)) {
    r.I2 = std::numeric_limits<double>::infinity();
    r.sigma2_sq = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double a = (1.0 - p_tau) * tau;
  r.I2 = a / (nu_hat - 1.0);
  const double g1 = -a / ((nu_hat - 1.0) * (nu_hat - 1.0));
  r.sigma2_sq = g1 * g1 * nu_hat * nu_hat / static_cast<double>(n3);
  return r;
}

struct EnergyEstimate {
  long n = 0;
  long n1 = 0;
  double p_tau = 0.0;
  double I1_hat = 0.0;
  double v1 = 0.0;
  double sigma1_sq = 0.0;
  double tau = 0.0;
  double nu_hat = std::numeric_limits<double>::quiet_NaN();  // NaN when n3 = 0
  long n3 = 0;
  double I2_hat = 0.0;
  double sigma2_sq = 0.0;
  double I_hat = 0.0;
  double sigma_I_sq = 0.0;  // +inf when I_hat is infinite
  long coincident_pairs = 0;  // group-1 pairs at distance 0
  bool tau_degenerate = false;
  std::vector<std::string> warnings;

  bool infinite() const { return std::isinf(I_hat); }
};

struct CapacityEstimate {
  double value = 0.0;
  double sigma_cap = 0.0;
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  bool ci_defined = false;

  bool covers(double x) const { return ci_defined && ci_low <= x && x <= ci_high; }
};

/// Capacity 1/I with the delta-method interval 1/I +- z sigma_I / I^2.
/// Infinite energy gives capacity 0 and no interval.
inline CapacityEstimate capacity_with_ci(const EnergyEstimate& e, double delta) {
  CapacityEstimate c;
  if (e.infinite()) return c;
  if (!(e.I_hat > 0.0)) throw std::invalid_argument("capacity_with_ci: energy must be positive");
  const double sigma_I = std::sqrt(e.sigma_I_sq);
  c.value = 1.0 / e.I_hat;
  c.sigma_cap = sigma_I / (e.I_hat * e.I_hat);
  const double half = z_critical(delta) * c.sigma_cap;
  c.ci_low = c.value - half;
  c.ci_high = c.value + half;
  c.ci_defined = true;
  return c;
}

/// Plain U-statistic mean of w_ij over all pairs; +inf on coincident points.
inline double naive_energy_estimate(std::span<const Vec> points, double alpha, int d) {
  detail::check_points(points, alpha, d);
  const std::size_t n = points.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += kernel_from_d2(distance2(points[i], points[j]), alpha, d);
  return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

namespace detail {

inline void finish_energy(EnergyEstimate& e, const TailSample& tail) {
  e.n3 = static_cast<long>(tail.z.size());
  if (e.n3 == 0) {
    e.I2_hat = 0.0;
    e.sigma2_sq = 0.0;
    e.warnings.push_back("no group-2 pair exceeds tau; tail term set to 0");
  } else {
    e.nu_hat = hill_estimator(tail.z, e.tau);
    const I2Result r = estimate_I2(e.nu_hat, e.tau, e.p_tau, e.n3);
    e.I2_hat = r.I2;
    e.sigma2_sq = r.sigma2_sq;
  }
  if (std::isinf(e.I2_hat)) {
    e.I_hat = e.I2_hat;
    e.sigma_I_sq = std::numeric_limits<double>::infinity();
  } else {
    e.I_hat = e.I1_hat + e.I2_hat;
    e.sigma_I_sq = e.sigma1_sq + e.sigma2_sq;
  }
  if (e.coincident_pairs > 0) {
    e.warnings.push_back(std::to_string(e.coincident_pairs) + " coincident group-1 point pairs excluded");
  }
  if (e.tau_degenerate) e.warnings.push_back("all group-1 kernel values are equal; tau set to that value");
}

}  // namespace detail

/// Split estimator built from explicit kernel matrices. Quadratic memory;
/// meant for small samples and as the reference for estimate_energy.
inline EnergyEstimate estimate_energy_matrix(std::span<const Vec> points, double alpha, int d,
                                             const EstimatorConfig& cfg = {}) {
  const long n = static_cast<long>(points.size());
  cfg.validate(n);
  const KernelMatrix w = pairwise_kernel(points, alpha, d);
  EnergyEstimate e;
  e.n = n;
  e.n1 = cfg.resolved_n1(n);
  e.p_tau = cfg.p_tau;
  const KernelMatrix g1 = w.block(0, e.n1);
  const KernelMatrix g2 = w.block(e.n1, n - e.n1);
  const Threshold t = choose_threshold(g1.upper_values(), cfg.p_tau);
  e.tau = t.tau;
  e.tau_degenerate = t.degenerate;
  e.coincident_pairs = g1.coincident_pairs();
  const I1Result r1 = estimate_I1(g1, e.tau, cfg.literal_v1);
  e.I1_hat = r1.I1;
  e.v1 = r1.v1;
  e.sigma1_sq = r1.sigma1_sq;
  detail::finish_energy(e, select_tail_sample(g2, e.tau, cfg.resolved_tail_band()));
  return e;
}

/// Same estimator without storing kernel matrices: distances are recomputed
/// on the fly and tau is found by selection on squared distances (the kernel
/// is monotone in distance), so only the two order statistics go through pow.
inline EnergyEstimate estimate_energy(std::span<const Vec> points, double alpha, int d,
                                      const EstimatorConfig& cfg = {}) {
  const long n = static_cast<long>(points.size());
  cfg.validate(n);
  detail::check_points(points, alpha, d);
  EnergyEstimate e;
  e.n = n;
  e.n1 = cfg.resolved_n1(n);
  e.p_tau = cfg.p_tau;
  const long n1 = e.n1;
  const auto pt = [&](long i) -> const Vec& { return points[static_cast<std::size_t>(i)]; };
  const auto w_of = [&](double d2) { return kernel_from_d2(d2, alpha, d); };

  // Threshold from group-1 squared distances. Larger kernel values are
  // smaller distances, so the k-th smallest w is the (N-1-k)-th smallest d2.
  {
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(n1 * (n1 - 1) / 2));
    for (long i = 0; i < n1; ++i)
      for (long j = i + 1; j < n1; ++j) {
        const double v = distance2(pt(i), pt(j));
        if (v == 0.0) {
          ++e.coincident_pairs;
        } else {
          d2.push_back(v);
        }
      }
    if (d2.size() < 10) {
      throw std::invalid_argument("threshold needs at least 10 finite group-1 pair values, got " +
                                  std::to_string(d2.size()));
    }
    const std::size_t count = d2.size();
    const auto [k, frac] = detail::type7_position(count, cfg.p_tau);
    const std::size_t lo_pos = count - 1 - k;
    std::nth_element(d2.begin(), d2.begin() + static_cast<long>(lo_pos), d2.end());
    const double w_lo = w_of(d2[lo_pos]);
    double w_hi = w_lo;
    if (frac > 0.0 && lo_pos > 0) w_hi = w_of(*std::max_element(d2.begin(), d2.begin() + static_cast<long>(lo_pos)));
    e.tau = w_lo + frac * (w_hi - w_lo);
    const auto [mn, mx] = std::minmax_element(d2.begin(), d2.end());
    e.tau_degenerate = (w_of(*mn) == w_of(*mx));
  }

  // Truncated row means over group 1.
  {
    std::vector<double> row_sum(static_cast<std::size_t>(n1), 0.0);
    std::vector<long> row_count(static_cast<std::size_t>(n1), 0);
    for (long i = 0; i < n1; ++i) {
      const Vec& xi = pt(i);
      double si = 0.0;
      long ci = 0;
      for (long j = i + 1; j < n1; ++j) {
        const double v = distance2(xi, pt(j));
        if (v == 0.0) continue;
        const double w = std::min(w_of(v), e.tau);
        si += w;
        ++ci;
        row_sum[static_cast<std::size_t>(j)] += w;
        ++row_count[static_cast<std::size_t>(j)];
      }
      row_sum[static_cast<std::size_t>(i)] += si;
      row_count[static_cast<std::size_t>(i)] += ci;
    }
    std::vector<double> row_mean;
    row_mean.reserve(static_cast<std::size_t>(n1));
    for (long j = 0; j < n1; ++j) {
      if (row_count[static_cast<std::size_t>(j)] > 0) {
        row_mean.push_back(row_sum[static_cast<std::size_t>(j)] / static_cast<double>(row_count[static_cast<std::size_t>(j)]));
      }
    }
    const I1Result r1 = detail::i1_from_row_means(row_mean, cfg.literal_v1);
    e.I1_hat = r1.I1;
    e.v1 = r1.v1;
    e.sigma1_sq = r1.sigma1_sq;
  }

  // Greedy banded tail selection over group 2; only short pairs can exceed tau.
  TailSample tail;
  {
    const double expo = 0.5 * (alpha - d);
    const long m = n - n1;
    if (expo != 0.0 && m >= 2) {
      const double d2_cut = std::pow(e.tau, 1.0 / expo) * (1.0 + 1e-9);
      const long band = cfg.resolved_tail_band();
      std::vector<char> used(static_cast<std::size_t>(m), 0);
      for (long i = 0; i < m; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        const Vec& xi = pt(n1 + i);
        const long end = band >= m - i ? m : i + band + 1;
        for (long j = i + 1; j < end; ++j) {
          if (used[static_cast<std::size_t>(j)]) continue;
          const double v = distance2(xi, pt(n1 + j));
          if (v > d2_cut) continue;
          if (v == 0.0) continue;
          const double w = w_of(v);
          if (w > e.tau) {
            tail.z.push_back(w);
            tail.pairs.emplace_back(i, j);
            used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = 1;
            break;
          }
        }
      }
    }
  }
  detail::finish_energy(e, tail);
  return e;
}

struct CapacityReport {
  EnergyEstimate energy;
  CapacityEstimate capacity;
};

inline CapacityReport estimate_capacity(std::span<const Vec> points, double alpha, int d,
                                        const EstimatorConfig& cfg = {}) {
  CapacityReport r;
  r.energy = estimate_energy(points, alpha, d, cfg);
  r.capacity = capacity_with_ci(r.energy, cfg.delta);
  return r;
}

}  // namespace rieszcap
