#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rieszcap/ball_kernels.hpp"
#include "rieszcap/errors.hpp"
#include "rieszcap/geometry.hpp"
#include "rieszcap/rng.hpp"
#include "rieszcap/stable_sampling.hpp"
#include "rieszcap/stats.hpp"
#include "rieszcap/vec.hpp"

namespace rieszcap {

enum class Walker { Simple, Wos, Wiob };

inline std::string to_string(Walker w) {
  switch (w) {
    case Walker::Simple: return "simple";
    case Walker::Wos: return "wos";
    case Walker::Wiob: return "wiob";
  }
  return "unknown";
}

inline Walker parse_walker(const std::string& name) {
  if (name == "simple") return Walker::Simple;
  if (name == "wos") return Walker::Wos;
  if (name == "wiob") return Walker::Wiob;
  throw std::invalid_argument("unknown walker '" + name + "' (expected simple, wos or wiob)");
}

/// WOS for Brownian motion, WIOB otherwise.
inline Walker default_walker(double alpha) { return alpha == 2.0 ? Walker::Wos : Walker::Wiob; }

/// Simulation parameters shared by all walkers.
struct WalkConfig {
  double alpha = 2.0;
  int dim = 3;
  double gamma = 0.05;    // step scale of the simple walk
  double epsilon = 1e-6;  // hit tolerance
  double r_launch = 2.0;
  double r_escape = 4.0;
  long max_steps = 1'000'000;
  std::uint64_t seed = 1;
  bool record_paths = false;

  /// Launch radius 1.2 x the bounding radius, escape radius twice that.
  static WalkConfig for_shape(const Shape& shape, double alpha, std::uint64_t seed = 1) {
    WalkConfig c;
    c.alpha = alpha;
    c.dim = shape.dim();
    c.r_launch = 1.2 * shape.bounding_radius();
    c.r_escape = 2.0 * c.r_launch;
    c.seed = seed;
    return c;
  }

  /// Throws on invalid parameters; returns advisory warnings.
  std::vector<std::string> validate(const Shape& shape) const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("dimension must lie in [2, 16]");
    if (shape.dim() != dim) throw std::invalid_argument("shape dimension does not match the walk dimension");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
    if (!(r_launch > 0.0 && r_launch < r_escape)) {
      throw std::invalid_argument("radii must satisfy 0 < r_launch < r_escape");
    }
    if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
    const double br = shape.bounding_radius();
    if (br > r_launch * (1.0 + 1e-12)) {
      throw std::invalid_argument("shape (bounding radius " + std::to_string(br) +
                                  ") is not contained in the launch ball (radius " + std::to_string(r_launch) + ")");
    }
    std::vector<std::string> warnings;
    if (!is_transient(alpha, dim)) {
      warnings.push_back("recurrent regime (d <= alpha): paths never escape and always re-enter the launch ball");
    }
    if (!(epsilon < gamma && gamma < r_launch)) {
      warnings.push_back("recommended scale ordering epsilon << gamma << r_launch does not hold");
    }
    return warnings;
  }

  StableStepParams step_params() const { return {alpha, gamma, dim}; }
};

struct WalkOutcome {
  enum class Kind { Hit, Escaped, StepCapExceeded };
  Kind kind = Kind::Escaped;
  Vec location;  // meaningful for Hit only
  long steps = 0;
  std::vector<Vec> path;  // filled when record_paths is set
};

/// Hitting locations from a batch of paths plus escape bookkeeping.
struct HitSet {
  int dim = 0;
  std::vector<Vec> hits;
  long paths_run = 0;
  long escapes = 0;
  long step_cap_exceeded = 0;
  long total_steps = 0;
  long max_path_steps = 0;
  // Recorded paths in path order, when requested.
  std::vector<std::vector<Vec>> paths;

  double hit_fraction() const {
    return paths_run > 0 ? static_cast<double>(hits.size()) / static_cast<double>(paths_run) : 0.0;
  }
  double mean_steps() const {
    return paths_run > 0 ? static_cast<double>(total_steps) / static_cast<double>(paths_run) : 0.0;
  }
};

/// Starting point: the law of the first entry into the launch ball from infinity.
inline Vec launch_point(const WalkConfig& cfg, RngStream& rng) {
  if (cfg.alpha == 2.0) return sample_uniform_sphere(cfg.dim, rng) * cfg.r_launch;
  return sample_equilibrium_ball(cfg.alpha, cfg.dim, rng) * cfg.r_launch;
}

/// Beyond the escape sphere: either the path escapes for good (returns
/// nullopt) or it is re-inserted where it would first land in the launch ball.
inline std::optional<Vec> escape_or_reenter(const WalkConfig& cfg, const Vec& x, RngStream& rng) {
  const double r = x.norm();
  if (!(r > cfg.r_escape)) throw std::invalid_argument("escape_or_reenter: point is inside the escape sphere");
  const double p = hit_ball_probability(cfg.alpha, cfg.dim, r / cfg.r_launch);
  if (rng.uniform() >= p) return std::nullopt;
  const Vec unit = x / cfg.r_launch;
  if (cfg.alpha == 2.0) return sample_brownian_reentry_sphere(cfg.dim, unit, rng) * cfg.r_launch;
  return sample_hit_location_in_ball(cfg.alpha, cfg.dim, unit, rng) * cfg.r_launch;
}

namespace detail {

// Shared path bookkeeping for the three walkers.
class PathState {
 public:
  PathState(const WalkConfig& cfg, WalkOutcome& out) : cfg_(cfg), out_(out) {}

  void visit(const Vec& x) {
    if (cfg_.record_paths) out_.path.push_back(x);
  }
  WalkOutcome& hit(const Vec& x) {
    out_.kind = WalkOutcome::Kind::Hit;
    out_.location = x;
    return out_;
  }
  WalkOutcome& escaped() {
    out_.kind = WalkOutcome::Kind::Escaped;
    return out_;
  }
  WalkOutcome& capped() {
    out_.kind = WalkOutcome::Kind::StepCapExceeded;
    return out_;
  }
  bool step() { return ++out_.steps <= cfg_.max_steps; }

 private:
  const WalkConfig& cfg_;
  WalkOutcome& out_;
};

}  // namespace detail

/// Simple stable random walk: launch, add isotropic stable steps of scale
/// gamma, escape/re-enter beyond the escape sphere, stop within epsilon of K.
inline WalkOutcome run_simple_stable_walk(const WalkConfig& cfg, const Shape& shape, RngStream& rng) {
  WalkOutcome out;
  detail::PathState st(cfg, out);
  const StableStepParams params = cfg.step_params();
  params.validate();
  Vec x = launch_point(cfg, rng);
  st.visit(x);
  if (shape.distance_unchecked(x) <= cfg.epsilon) return st.hit(x);
  while (st.step()) {
    x += sample_isotropic_stable_step(params, rng);
    if (x.norm2() > cfg.r_escape * cfg.r_escape) {
      auto back = escape_or_reenter(cfg, x, rng);
      if (!back) return st.escaped();
      x = *back;
    }
    st.visit(x);
    if (shape.distance_unchecked(x) <= cfg.epsilon) return st.hit(x);
  }
  return st.capped();
}

/// Walk-On-Spheres (alpha = 2): jump to a uniform point on the largest
/// sphere around x that avoids K.
inline WalkOutcome run_wos(const WalkConfig& cfg, const Shape& shape, RngStream& rng) {
  if (cfg.alpha != 2.0) throw std::invalid_argument("Walk-On-Spheres requires alpha = 2; use wiob for alpha < 2");
  WalkOutcome out;
  detail::PathState st(cfg, out);
  Vec x = launch_point(cfg, rng);
  st.visit(x);
  double r = shape.distance_unchecked(x);
  if (r <= cfg.epsilon) return st.hit(x);
  while (st.step()) {
    x += sample_uniform_sphere(cfg.dim, rng) * r;
    st.visit(x);
    r = shape.distance_unchecked(x);
    if (r <= cfg.epsilon) return st.hit(x);
    if (x.norm2() > cfg.r_escape * cfg.r_escape) {
      auto back = escape_or_reenter(cfg, x, rng);
      if (!back) return st.escaped();
      x = *back;
      st.visit(x);
      r = shape.distance_unchecked(x);
      if (r <= cfg.epsilon) return st.hit(x);
    }
  }
  return st.capped();
}

/// Walk-In-and-Out-of-Balls (0 < alpha < 2): jump to the exit point of the
/// largest ball around x that avoids K. Exits land strictly outside that
/// ball, possibly deep inside K.
inline WalkOutcome run_wiob(const WalkConfig& cfg, const Shape& shape, RngStream& rng) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) {
    throw std::invalid_argument("Walk-In-and-Out-of-Balls requires 0 < alpha < 2; use wos for alpha = 2");
  }
  WalkOutcome out;
  detail::PathState st(cfg, out);
  const Vec centre = Vec::zeros(cfg.dim);
  Vec x = launch_point(cfg, rng);
  st.visit(x);
  double r = shape.distance_unchecked(x);
  if (r <= cfg.epsilon) return st.hit(x);
  while (st.step()) {
    x += sample_exit_location_from_ball(cfg.alpha, cfg.dim, centre, rng) * r;
    st.visit(x);
    r = shape.distance_unchecked(x);
    if (r <= cfg.epsilon) return st.hit(x);
    if (x.norm2() > cfg.r_escape * cfg.r_escape) {
      auto back = escape_or_reenter(cfg, x, rng);
      if (!back) return st.escaped();
      x = *back;
      st.visit(x);
      r = shape.distance_unchecked(x);
      if (r <= cfg.epsilon) return st.hit(x);
    }
  }
  return st.capped();
}

inline WalkOutcome run_path(Walker walker, const WalkConfig& cfg, const Shape& shape, RngStream& rng) {
  switch (walker) {
    case Walker::Simple: return run_simple_stable_walk(cfg, shape, rng);
    case Walker::Wos: return run_wos(cfg, shape, rng);
    case Walker::Wiob: return run_wiob(cfg, shape, rng);
  }
  throw std::invalid_argument("unknown walker");
}

struct CollectOptions {
  int workers = 1;
  long batch_size = 2048;
  // Abort when this many consecutive paths miss and the hit fraction so far
  // is below min_hit_fraction.
  long max_consecutive_misses = 100'000;
  double min_hit_fraction = 1e-6;
};

/// Runs paths 0, 1, 2, ... (path i draws from stream (seed, i)) until
/// `target_hits` hits are recorded. The result depends only on the seed, never
/// on the worker count.
inline HitSet collect_hits(const WalkConfig& cfg, const Shape& shape, long target_hits, Walker walker,
                           const CollectOptions& opts = {}) {
  if (target_hits < 2) throw std::invalid_argument("collect_hits needs at least 2 target hits");
  cfg.validate(shape);
  if (walker == Walker::Wos && cfg.alpha != 2.0) {
    throw std::invalid_argument("Walk-On-Spheres requires alpha = 2; use wiob for alpha < 2");
  }
  if (walker == Walker::Wiob && cfg.alpha == 2.0) {
    throw std::invalid_argument("Walk-In-and-Out-of-Balls requires alpha < 2; use wos for alpha = 2");
  }
  const int workers = std::max(1, opts.workers);
  HitSet out;
  out.dim = cfg.dim;
  out.hits.reserve(static_cast<std::size_t>(target_hits));
  long consecutive_misses = 0;
  std::vector<WalkOutcome> batch;
  for (long first = 0;; first += opts.batch_size) {
    batch.assign(static_cast<std::size_t>(opts.batch_size), WalkOutcome{});
    auto work = [&](int w) {
      for (long k = w; k < opts.batch_size; k += workers) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(first + k));
        batch[static_cast<std::size_t>(k)] = run_path(walker, cfg, shape, rng);
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& o : batch) {
      ++out.paths_run;
      out.total_steps += o.steps;
      out.max_path_steps = std::max(out.max_path_steps, o.steps);
      switch (o.kind) {
        case WalkOutcome::Kind::Hit:
          out.hits.push_back(o.location);
          consecutive_misses = 0;
          break;
        case WalkOutcome::Kind::Escaped:
          ++out.escapes;
          ++consecutive_misses;
          break;
        case WalkOutcome::Kind::StepCapExceeded:
          ++out.step_cap_exceeded;
          ++consecutive_misses;
          break;
      }
      if (cfg.record_paths) out.paths.push_back(std::move(o.path));
      if (static_cast<long>(out.hits.size()) == target_hits) return out;
      if (consecutive_misses >= opts.max_consecutive_misses && out.hit_fraction() < opts.min_hit_fraction) {
        throw SimulationError("aborting: " + std::to_string(consecutive_misses) +
                              " consecutive paths missed the target (hit fraction " +
                              std::to_string(out.hit_fraction()) + " after " + std::to_string(out.paths_run) +
                              " paths)");
      }
    }
  }
}

/// Capacity from the hit fraction (alpha = 2 only): Cap_2(K) = r_launch^{d-2} P(hit).
struct HitFractionEstimate {
  double value = 0.0;
  double sigma = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double hit_fraction = 0.0;
  long paths = 0;
};

inline HitFractionEstimate capacity_from_hit_fraction(const HitSet& hs, const WalkConfig& cfg, double delta = 0.05,
                                                      bool exclude_capped = true) {
  if (cfg.alpha != 2.0) throw std::invalid_argument("hit-fraction capacity requires alpha = 2");
  HitFractionEstimate e;
  e.paths = hs.paths_run - (exclude_capped ? hs.step_cap_exceeded : 0);
  if (e.paths <= 0) throw std::invalid_argument("hit-fraction capacity: no completed paths");
  const double p = static_cast<double>(hs.hits.size()) / static_cast<double>(e.paths);
  const double scale = std::pow(cfg.r_launch, cfg.dim - 2);
  e.hit_fraction = p;
  e.value = scale * p;
  e.sigma = scale * std::sqrt(p * (1.0 - p) / static_cast<double>(e.paths));
  const double z = z_critical(delta);
  e.ci_low = e.value - z * e.sigma;
  e.ci_high = e.value + z * e.sigma;
  return e;
}

}  // namespace rieszcap
