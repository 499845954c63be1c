#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rieszcap/ball_kernels.hpp"
#include "rieszcap/estimator.hpp"
#include "rieszcap/geometry.hpp"
#include "rieszcap/stats.hpp"
#include "rieszcap/walkers.hpp"

// Drivers for the studies the command-line tool exposes. Each one is a pure
// function of its arguments, seeds included.

namespace rieszcap {

/// Seed of replication / sweep entry k derived from a base seed.
inline std::uint64_t derived_seed(std::uint64_t base, std::uint64_t k) {
  std::uint64_t s = base ^ (0x5851f42d4c957f2dULL * (k + 1));
  return detail::splitmix64(s);
}

struct CapacityRun {
  HitSet hits;
  CapacityReport report;
  std::vector<std::string> warnings;
  double walk_seconds = 0.0;
  double estimate_seconds = 0.0;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Hits then the split energy estimate.
inline CapacityRun run_capacity(const Shape& shape, const WalkConfig& walk, Walker walker, long n,
                                const EstimatorConfig& est, const CollectOptions& opts = {}) {
  est.validate(n);
  CapacityRun run;
  run.warnings = walk.validate(shape);
  auto t0 = std::chrono::steady_clock::now();
  run.hits = collect_hits(walk, shape, n, walker, opts);
  run.walk_seconds = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  run.report = estimate_capacity(run.hits.hits, walk.alpha, walk.dim, est);
  run.estimate_seconds = seconds_since(t0);
  for (const auto& w : run.report.energy.warnings) run.warnings.push_back(w);
  return run;
}

/// Exact capacity when the shape is a single ball, otherwise nullopt.
inline std::optional<double> exact_capacity(const Shape& shape, double alpha) {
  const auto* b = std::get_if<BallPrimitive>(&shape.node());
  if (!b || !is_transient(alpha, shape.dim())) return std::nullopt;
  return ball_capacity(alpha, shape.dim(), b->radius);
}

/// Capacity of the equal-volume ball; NaN where undefined.
inline double equal_volume_ball_capacity(const Shape& shape, double alpha) {
  if (!is_transient(alpha, shape.dim())) return std::numeric_limits<double>::quiet_NaN();
  const BallGeometry b = ball_same_volume(shape, shape.dim());
  return ball_capacity(alpha, shape.dim(), b.radius);
}

struct SweepRow {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double capacity = 0.0;
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  bool infinite_energy = false;
  double relative_capacity = std::numeric_limits<double>::quiet_NaN();
};

/// One estimate per alpha on a shared shape. `base` supplies radii, epsilon,
/// step caps and the base seed; alpha k runs on derived_seed(base.seed, k).
inline std::vector<SweepRow> sweep(const Shape& shape, const std::vector<double>& alphas, const WalkConfig& base,
                                   long n, const EstimatorConfig& est, const CollectOptions& opts = {},
                                   bool relative = false) {
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    WalkConfig cfg = base;
    cfg.alpha = alphas[k];
    cfg.seed = derived_seed(base.seed, k);
    const CapacityRun run = run_capacity(shape, cfg, default_walker(cfg.alpha), n, est, opts);
    SweepRow r;
    r.alpha = cfg.alpha;
    r.seed = cfg.seed;
    r.capacity = run.report.capacity.value;
    r.infinite_energy = run.report.energy.infinite();
    if (run.report.capacity.ci_defined) {
      r.ci_low = run.report.capacity.ci_low;
      r.ci_high = run.report.capacity.ci_high;
    }
    if (relative) r.relative_capacity = r.capacity / equal_volume_ball_capacity(shape, cfg.alpha);
    rows.push_back(r);
  }
  return rows;
}

struct CoverageReport {
  double alpha = 0.0;
  int dim = 0;
  long replications = 0;
  long n = 0;
  double exact = 0.0;
  long covered = 0;
  long infinite = 0;
  double coverage = 0.0;
  double mean_estimate = 0.0;
  double mean_ci_width = 0.0;
};

/// Fraction of replicated confidence intervals containing the exact ball
/// capacity. Replication k runs on derived_seed(base.seed, k).
inline CoverageReport coverage(const Shape& shape, const WalkConfig& base, long replications, long n,
                               const EstimatorConfig& est, const CollectOptions& opts = {}) {
  const auto exact = exact_capacity(shape, base.alpha);
  if (!exact) throw std::invalid_argument("coverage needs a ball in the transient regime (closed-form capacity)");
  if (replications < 1) throw std::invalid_argument("coverage needs at least one replication");
  CoverageReport rep;
  rep.alpha = base.alpha;
  rep.dim = shape.dim();
  rep.replications = replications;
  rep.n = n;
  rep.exact = *exact;
  double width_sum = 0.0;
  long width_count = 0;
  for (long k = 0; k < replications; ++k) {
    WalkConfig cfg = base;
    cfg.seed = derived_seed(base.seed, static_cast<std::uint64_t>(k));
    const CapacityRun run = run_capacity(shape, cfg, default_walker(cfg.alpha), n, est, opts);
    const CapacityEstimate& c = run.report.capacity;
    rep.mean_estimate += c.value;
    if (run.report.energy.infinite()) ++rep.infinite;
    if (c.covers(*exact)) ++rep.covered;
    if (c.ci_defined) {
      width_sum += c.ci_high - c.ci_low;
      ++width_count;
    }
  }
  rep.mean_estimate /= static_cast<double>(replications);
  rep.coverage = static_cast<double>(rep.covered) / static_cast<double>(replications);
  rep.mean_ci_width = width_count > 0 ? width_sum / static_cast<double>(width_count) : 0.0;
  return rep;
}

/// Radial CDF 1 - sqrt(1 - r^2) of the hitting law of a unit disk, shared by
/// Brownian motion in R^3 and the alpha = 1 process in R^2.
inline double disk_radius_cdf(double r) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  return 1.0 - std::sqrt(1.0 - r * r);
}

struct SubordinationResult {
  std::vector<double> grid;
  std::vector<double> cdf_wos_disk3;   // Brownian hits on a thin coin in R^3
  std::vector<double> cdf_wiob_disk2;  // alpha = 1 hits on the unit disk in R^2
  std::vector<double> cdf_exact;
  double ks_wos_exact = 0.0;
  double ks_wiob_exact = 0.0;
  double ks_wos_wiob = 0.0;
  double max_ks() const { return std::max({ks_wos_exact, ks_wiob_exact, ks_wos_wiob}); }
};

/// Compares the radial hitting laws of (i) Brownian motion on a thin coin in
/// R^3 and (ii) the alpha = 1 process on the unit disk in R^2 with (iii) the
/// exact curve.
inline SubordinationResult subordination(long n, std::uint64_t seed, int grid_points = 101,
                                         double half_thickness = 1e-4, const CollectOptions& opts = {}) {
  if (grid_points < 2) throw std::invalid_argument("subordination needs at least 2 grid points");
  const Shape coin = shapes::coin(3, half_thickness);
  WalkConfig wos;
  wos.alpha = 2.0;
  wos.dim = 3;
  wos.r_launch = 5.0;
  wos.r_escape = 8.0;
  wos.seed = derived_seed(seed, 0);
  const HitSet h3 = collect_hits(wos, coin, n, Walker::Wos, opts);

  const Shape disk = shapes::centered_ball(2);
  WalkConfig wiob = WalkConfig::for_shape(disk, 1.0, derived_seed(seed, 1));
  wiob.r_launch = 2.0;
  wiob.r_escape = 4.0;
  const HitSet h2 = collect_hits(wiob, disk, n, Walker::Wiob, opts);

  std::vector<double> r3, r2;
  r3.reserve(h3.hits.size());
  r2.reserve(h2.hits.size());
  for (const auto& p : h3.hits) r3.push_back(std::min(1.0, std::hypot(p[1], p[2])));
  for (const auto& p : h2.hits) r2.push_back(std::min(1.0, p.norm()));

  SubordinationResult s;
  for (int k = 0; k < grid_points; ++k) s.grid.push_back(static_cast<double>(k) / (grid_points - 1));
  s.cdf_wos_disk3 = empirical_cdf(r3, s.grid);
  s.cdf_wiob_disk2 = empirical_cdf(r2, s.grid);
  for (double r : s.grid) s.cdf_exact.push_back(disk_radius_cdf(r));
  s.ks_wos_exact = ks_distance(r3, disk_radius_cdf);
  s.ks_wiob_exact = ks_distance(r2, disk_radius_cdf);
  s.ks_wos_wiob = ks_distance_two_sample(r3, r2);
  return s;
}

}  // namespace rieszcap
