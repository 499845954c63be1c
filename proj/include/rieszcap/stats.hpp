#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace rieszcap {

/// Two-sided normal critical value z_{delta/2} for a (1 - delta) interval.
inline double z_critical(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("confidence level delta must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - delta / 2.0);
}

/// Empirical CDF of a sample, evaluated on a grid.
inline std::vector<double> empirical_cdf(std::vector<double> sample, const std::vector<double>& grid) {
  std::sort(sample.begin(), sample.end());
  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) {
    const auto k = std::upper_bound(sample.begin(), sample.end(), g) - sample.begin();
    out.push_back(sample.empty() ? 0.0 : static_cast<double>(k) / static_cast<double>(sample.size()));
  }
  return out;
}

/// Kolmogorov-Smirnov distance sup |F_n - F| against a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov distance sup |F_n - G_m|.
inline double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace rieszcap
