// rieszcap: command-line front end for hit generation, capacity estimates
// and the replication studies.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rieszcap/ball_kernels.hpp"
#include "rieszcap/estimator.hpp"
#include "rieszcap/experiments.hpp"
#include "rieszcap/geometry.hpp"
#include "rieszcap/io.hpp"
#include "rieszcap/shape_io.hpp"
#include "rieszcap/version.hpp"
#include "rieszcap/walkers.hpp"

using nlohmann::json;
using namespace rieszcap;

namespace {

struct Common {
  std::uint64_t seed = 1;
  int workers = std::max(1u, std::thread::hardware_concurrency());
  bool print_config = false;
  std::string manifest;
};

struct WalkFlags {
  std::string shape;
  double alpha = 2.0;
  std::string walker;  // empty: wos for alpha = 2, wiob otherwise
  std::optional<double> r_launch;
  std::optional<double> r_escape;
  double epsilon = 1e-6;
  double gamma = 0.05;
  long max_steps = 1'000'000;
  long n = 10'000;
};

struct EstFlags {
  long n1 = 0;
  double p_tau = 0.995;
  double delta = 0.05;
  bool literal_v1 = false;
  long tail_band = 0;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

WalkConfig make_walk(const Shape& shape, const WalkFlags& f, const Common& c) {
  WalkConfig w = WalkConfig::for_shape(shape, f.alpha, c.seed);
  if (f.r_launch) {
    w.r_launch = *f.r_launch;
    if (!f.r_escape) w.r_escape = 2.0 * w.r_launch;
  }
  if (f.r_escape) w.r_escape = *f.r_escape;
  w.epsilon = f.epsilon;
  w.gamma = f.gamma;
  w.max_steps = f.max_steps;
  return w;
}

Walker walker_for(const WalkFlags& f) { return f.walker.empty() ? default_walker(f.alpha) : parse_walker(f.walker); }

EstimatorConfig make_estimator(const EstFlags& f) {
  EstimatorConfig e;
  e.n1 = f.n1;
  e.p_tau = f.p_tau;
  e.delta = f.delta;
  e.literal_v1 = f.literal_v1;
  e.tail_band = f.tail_band;
  return e;
}

CollectOptions make_collect(const Common& c) {
  CollectOptions o;
  o.workers = c.workers;
  return o;
}

json walk_json(const WalkConfig& w, Walker walker) {
  return {{"alpha", w.alpha},       {"dim", w.dim},           {"walker", to_string(walker)},
          {"gamma", w.gamma},       {"epsilon", w.epsilon},   {"r_launch", w.r_launch},
          {"r_escape", w.r_escape}, {"max_steps", w.max_steps}, {"seed", w.seed},
          {"record_paths", w.record_paths}};
}

json estimator_json(const EstimatorConfig& e, long n) {
  return {{"n", n}, {"n1", e.resolved_n1(n)}, {"p_tau", e.p_tau}, {"delta", e.delta}, {"literal_v1", e.literal_v1},
          {"tail_band", e.resolved_tail_band() == std::numeric_limits<long>::max() ? json(nullptr) : json(e.resolved_tail_band())}};
}

json capacity_json(const CapacityReport& r, double alpha, int d) {
  const EnergyEstimate& e = r.energy;
  return {{"alpha", alpha},
          {"d", d},
          {"n", e.n},
          {"n1", e.n1},
          {"p_tau", e.p_tau},
          {"tau", e.tau},
          {"nu_hat", number_or_null(e.nu_hat)},
          {"n3", e.n3},
          {"I1", e.I1_hat},
          {"I2", number_or_null(e.I2_hat)},
          {"I", number_or_null(e.I_hat)},
          {"capacity", r.capacity.value},
          {"ci_low", r.capacity.ci_defined ? json(r.capacity.ci_low) : json(nullptr)},
          {"ci_high", r.capacity.ci_defined ? json(r.capacity.ci_high) : json(nullptr)},
          {"infinite_energy", e.infinite()}};
}

json hitset_json(const HitSet& h) {
  return {{"hits", h.hits.size()},
          {"paths_run", h.paths_run},
          {"escapes", h.escapes},
          {"step_cap_exceeded", h.step_cap_exceeded},
          {"hit_fraction", h.hit_fraction()},
          {"total_steps", h.total_steps},
          {"mean_steps", h.mean_steps()},
          {"max_path_steps", h.max_path_steps}};
}

// Run record written next to the outputs.
class Manifest {
 public:
  Manifest(const std::string& command, const Common& c) : start_(std::chrono::steady_clock::now()) {
    doc_ = {{"tool", "rieszcap"},  {"version", kVersion}, {"command", command},
            {"seed", c.seed},      {"workers", c.workers}, {"config", json::object()},
            {"timings", json::object()}, {"outputs", json::array()}, {"warnings", json::array()}};
  }
  json& config() { return doc_["config"]; }
  void timing(const std::string& phase, double seconds) { doc_["timings"][phase] = seconds; }
  void output(const std::string& path) { doc_["outputs"].push_back(path); }
  void warn(const std::vector<std::string>& ws) {
    for (const auto& w : ws) {
      doc_["warnings"].push_back(w);
      std::cerr << "warning: " << w << '\n';
    }
  }
  json& extra() { return doc_; }

  // Dry run: the resolved configuration, nothing executed.
  bool print_if_requested(const Common& c) const {
    if (!c.print_config) return false;
    std::cout << doc_.dump(2) << '\n';
    return true;
  }

  void write(const Common& c, const std::string& primary_output) {
    std::string path = c.manifest;
    if (path.empty() && !primary_output.empty() && primary_output != "-") path = primary_output + ".manifest.json";
    if (path.empty()) return;
    doc_["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
    out << doc_.dump(2) << '\n';
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

// Writes text to a file, or stdout for "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void add_walk_options(CLI::App* cmd, WalkFlags& f, bool need_shape) {
  auto* shape = cmd->add_option("--shape", f.shape, "Shape description file (JSON)");
  if (need_shape) shape->required()->check(CLI::ExistingFile);
  cmd->add_option("--walker", f.walker, "simple, wos or wiob (default: wos for alpha=2, else wiob)")
      ->check(CLI::IsMember({"simple", "wos", "wiob"}));
  cmd->add_option("--r-launch", f.r_launch, "Launch radius (default 1.2 x bounding radius)");
  cmd->add_option("--r-escape", f.r_escape, "Escape radius (default 2 x launch radius)");
  cmd->add_option("--epsilon", f.epsilon, "Hit tolerance")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Step scale of the simple walk")->capture_default_str();
  cmd->add_option("--max-steps", f.max_steps, "Step cap per path")->capture_default_str();
}

void add_estimator_options(CLI::App* cmd, EstFlags& f) {
  cmd->add_option("--n1", f.n1, "Group-1 size (default n/2)");
  cmd->add_option("--p-tau", f.p_tau, "Quantile level of the truncation threshold")->capture_default_str();
  cmd->add_option("--delta", f.delta, "Confidence intervals have level 1 - delta")->capture_default_str();
  cmd->add_flag("--literal-v1", f.literal_v1, "Use the squared-row-mean variant of v1 (comparison only)");
  cmd->add_option("--tail-band", f.tail_band,
                  "Tail pairs (i,j) need j - i <= band; 0 picks the default, negative disables the limit")
      ->capture_default_str();
}

std::vector<std::string> warnings_of(const CapacityRun& run) { return run.warnings; }

int cmd_hits(const Common& c, const WalkFlags& f, const std::string& out, const std::string& stats_out,
             const std::string& paths_out) {
  const Shape shape = load_shape_file(f.shape);
  WalkConfig w = make_walk(shape, f, c);
  w.record_paths = !paths_out.empty();
  const Walker walker = walker_for(f);
  Manifest m("hits", c);
  m.config() = {{"shape_file", f.shape}, {"shape", shape_to_json(shape)}, {"walk", walk_json(w, walker)}, {"n", f.n}};
  if (m.print_if_requested(c)) return 0;
  m.warn(w.validate(shape));
  const auto t0 = std::chrono::steady_clock::now();
  const HitSet hs = collect_hits(w, shape, f.n, walker, make_collect(c));
  m.timing("walk", seconds_since(t0));

  std::ostringstream csv;
  write_hits_csv(csv, hs.hits, w.dim);
  emit(out, csv.str());
  m.output(out);

  json stats = hitset_json(hs);
  if (w.alpha == 2.0) {
    const auto hf = capacity_from_hit_fraction(hs, w);
    stats["hit_fraction_capacity"] = {
        {"value", hf.value}, {"ci_low", hf.ci_low}, {"ci_high", hf.ci_high}, {"paths", hf.paths}};
  }
  const std::string stats_path = !stats_out.empty() ? stats_out : (out == "-" ? "" : out + ".stats.json");
  if (!stats_path.empty()) {
    emit(stats_path, stats.dump(2) + "\n");
    m.output(stats_path);
  } else {
    std::cerr << stats.dump(2) << '\n';
  }
  if (!paths_out.empty()) {
    std::ofstream p(paths_out);
    if (!p) throw std::runtime_error("cannot write '" + paths_out + "'");
    write_path_dump(p, hs.paths, w.dim);
    m.output(paths_out);
  }
  m.write(c, out);
  return 0;
}

int cmd_capacity(const Common& c, const WalkFlags& f, const EstFlags& ef, const std::string& hits_in,
                 const std::string& out) {
  const EstimatorConfig est = make_estimator(ef);
  Manifest m("capacity", c);
  if (!hits_in.empty() == !f.shape.empty()) throw CLI::ValidationError("capacity", "give exactly one of --hits or --shape");
  if (!hits_in.empty()) {
    int dim = 0;
    const std::vector<Vec> pts = read_hits_csv(hits_in, &dim);
    m.config() = {{"hits_file", hits_in}, {"alpha", f.alpha}, {"d", dim},
                  {"estimator", estimator_json(est, static_cast<long>(pts.size()))}};
    if (m.print_if_requested(c)) return 0;
    const auto t0 = std::chrono::steady_clock::now();
    const CapacityReport r = estimate_capacity(pts, f.alpha, dim, est);
    m.timing("estimate", seconds_since(t0));
    m.warn(r.energy.warnings);
    emit(out, capacity_json(r, f.alpha, dim).dump(2) + "\n");
  } else {
    const Shape shape = load_shape_file(f.shape);
    const WalkConfig w = make_walk(shape, f, c);
    const Walker walker = walker_for(f);
    m.config() = {{"shape_file", f.shape}, {"shape", shape_to_json(shape)}, {"walk", walk_json(w, walker)},
                  {"estimator", estimator_json(est, f.n)}};
    if (m.print_if_requested(c)) return 0;
    const CapacityRun run = run_capacity(shape, w, walker, f.n, est, make_collect(c));
    m.timing("walk", run.walk_seconds);
    m.timing("estimate", run.estimate_seconds);
    m.warn(warnings_of(run));
    m.extra()["hit_statistics"] = hitset_json(run.hits);
    emit(out, capacity_json(run.report, w.alpha, w.dim).dump(2) + "\n");
  }
  m.output(out);
  m.write(c, out);
  return 0;
}

std::string csv_number(double v) { return std::isfinite(v) ? detail::format_double(v) : ""; }

int cmd_sweep(const Common& c, const WalkFlags& f, const EstFlags& ef, const std::vector<double>& alphas,
              bool relative, const std::string& out) {
  const Shape shape = load_shape_file(f.shape);
  if (!f.walker.empty()) std::cerr << "warning: --walker is ignored by sweep (chosen per alpha)\n";
  WalkFlags base_flags = f;
  base_flags.alpha = alphas.front();
  const WalkConfig base = make_walk(shape, base_flags, c);
  const EstimatorConfig est = make_estimator(ef);
  Manifest m("sweep", c);
  m.config() = {{"shape_file", f.shape}, {"shape", shape_to_json(shape)}, {"alphas", alphas},
                {"walk", walk_json(base, default_walker(base.alpha))}, {"estimator", estimator_json(est, f.n)},
                {"relative", relative}};
  if (m.print_if_requested(c)) return 0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = sweep(shape, alphas, base, f.n, est, make_collect(c), relative);
  m.timing("sweep", seconds_since(t0));
  std::ostringstream csv;
  csv << "alpha,capacity,ci_low,ci_high,infinite_energy,seed";
  if (relative) csv << ",relative_capacity";
  csv << '\n';
  for (const auto& r : rows) {
    csv << detail::format_double(r.alpha) << ',' << detail::format_double(r.capacity) << ',' << csv_number(r.ci_low)
        << ',' << csv_number(r.ci_high) << ',' << (r.infinite_energy ? 1 : 0) << ',' << r.seed;
    if (relative) csv << ',' << csv_number(r.relative_capacity);
    csv << '\n';
  }
  emit(out, csv.str());
  m.output(out);
  m.write(c, out);
  return 0;
}

int cmd_coverage(const Common& c, const WalkFlags& f, const EstFlags& ef, long replications, const std::string& out) {
  const Shape shape = load_shape_file(f.shape);
  const WalkConfig base = make_walk(shape, f, c);
  const EstimatorConfig est = make_estimator(ef);
  if (!exact_capacity(shape, f.alpha)) {
    throw std::invalid_argument("coverage needs a shape with closed-form capacity (a single ball, d > alpha)");
  }
  Manifest m("coverage", c);
  m.config() = {{"shape_file", f.shape}, {"shape", shape_to_json(shape)}, {"replications", replications},
                {"walk", walk_json(base, default_walker(base.alpha))}, {"estimator", estimator_json(est, f.n)}};
  if (m.print_if_requested(c)) return 0;
  const auto t0 = std::chrono::steady_clock::now();
  const CoverageReport r = coverage(shape, base, replications, f.n, est, make_collect(c));
  m.timing("coverage", seconds_since(t0));
  const json doc = {{"alpha", r.alpha},
                    {"d", r.dim},
                    {"replications", r.replications},
                    {"n", r.n},
                    {"exact", r.exact},
                    {"covered", r.covered},
                    {"coverage", r.coverage},
                    {"nominal", 1.0 - est.delta},
                    {"infinite_energy_count", r.infinite},
                    {"mean_estimate", r.mean_estimate},
                    {"mean_ci_width", r.mean_ci_width}};
  emit(out, doc.dump(2) + "\n");
  m.output(out);
  m.write(c, out);
  return 0;
}

int cmd_subordination(const Common& c, long n, int grid, double half_thickness, const std::string& out) {
  Manifest m("subordination", c);
  m.config() = {{"n", n}, {"grid_points", grid}, {"coin_half_thickness", half_thickness},
                {"wos", {{"alpha", 2.0}, {"d", 3}, {"r_launch", 5.0}, {"r_escape", 8.0}}},
                {"wiob", {{"alpha", 1.0}, {"d", 2}, {"r_launch", 2.0}, {"r_escape", 4.0}}}};
  if (m.print_if_requested(c)) return 0;
  const auto t0 = std::chrono::steady_clock::now();
  const SubordinationResult s = subordination(n, c.seed, grid, half_thickness, make_collect(c));
  m.timing("subordination", seconds_since(t0));
  m.extra()["ks"] = {{"wos_vs_exact", s.ks_wos_exact}, {"wiob_vs_exact", s.ks_wiob_exact}, {"wos_vs_wiob", s.ks_wos_wiob}};
  std::ostringstream csv;
  csv << "r,wos_disk_d3,wiob_disk_d2,exact\n";
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    csv << detail::format_double(s.grid[k]) << ',' << detail::format_double(s.cdf_wos_disk3[k]) << ','
        << detail::format_double(s.cdf_wiob_disk2[k]) << ',' << detail::format_double(s.cdf_exact[k]) << '\n';
  }
  emit(out, csv.str());
  std::cerr << "max pairwise KS distance: " << s.max_ks() << '\n';
  m.output(out);
  m.write(c, out);
  return 0;
}

int cmd_ball_exact(double alpha, int d, double r) {
  const double v = ball_capacity(alpha, d, r);
  std::cout << json{{"alpha", alpha}, {"d", d}, {"r", r}, {"capacity", v}}.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo estimation of Riesz alpha-capacities with stable random walks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Configuration file (TOML/INI); command-line flags take precedence");
  app.require_subcommand(1);

  Common common;
  app.add_option("--seed", common.seed, "Base random seed")->envname("RIESZCAP_SEED")->capture_default_str();
  app.add_option("--workers", common.workers, "Worker threads (results do not depend on this)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--print-config", common.print_config, "Print the resolved run configuration and exit");
  app.add_option("--manifest", common.manifest, "Manifest path (default: <output>.manifest.json)");

  WalkFlags wf;
  EstFlags ef;
  std::string out = "-";

  auto* hits = app.add_subcommand("hits", "Simulate hitting locations and write them as CSV");
  std::string stats_out, paths_out;
  add_walk_options(hits, wf, true);
  hits->add_option("--alpha", wf.alpha, "Stability index in (0, 2]")->capture_default_str();
  hits->add_option("-n,--n", wf.n, "Number of hits")->capture_default_str();
  hits->add_option("-o,--out", out, "Hit CSV ('-' for stdout)")->capture_default_str();
  hits->add_option("--stats", stats_out, "Escape statistics JSON (default: <out>.stats.json)");
  hits->add_option("--paths", paths_out, "Also dump every path position to this CSV");

  auto* capacity = app.add_subcommand("capacity", "Estimate the alpha-capacity from hits or a shape");
  std::string hits_in;
  capacity->add_option("--hits", hits_in, "Hit CSV to estimate from")->check(CLI::ExistingFile);
  add_walk_options(capacity, wf, false);
  add_estimator_options(capacity, ef);
  capacity->add_option("--alpha", wf.alpha, "Stability index in (0, 2]")->capture_default_str();
  capacity->add_option("-n,--n", wf.n, "Number of hits to simulate (with --shape)")->capture_default_str();
  capacity->add_option("-o,--out", out, "Capacity JSON ('-' for stdout)")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "Capacity estimates over a list of alpha values");
  std::vector<double> alphas;
  bool relative = false;
  add_walk_options(sweep_cmd, wf, true);
  add_estimator_options(sweep_cmd, ef);
  sweep_cmd->add_option("--alphas", alphas, "Alpha values")->required()->delimiter(',');
  sweep_cmd->add_option("-n,--n", wf.n, "Hits per estimate")->capture_default_str();
  sweep_cmd->add_flag("--relative", relative, "Add capacity / capacity of the equal-volume ball");
  sweep_cmd->add_option("-o,--out", out, "Sweep CSV ('-' for stdout)")->capture_default_str();

  auto* cov = app.add_subcommand("coverage", "Confidence-interval coverage on a ball");
  long replications = 100;
  add_walk_options(cov, wf, true);
  add_estimator_options(cov, ef);
  cov->add_option("--alpha", wf.alpha, "Stability index in (0, 2]")->capture_default_str();
  cov->add_option("-M,--replications", replications, "Number of replications")->capture_default_str();
  cov->add_option("-n,--n", wf.n, "Hits per estimate")->capture_default_str();
  cov->add_option("-o,--out", out, "Coverage JSON ('-' for stdout)")->capture_default_str();

  auto* sub = app.add_subcommand("subordination", "Radial hitting CDFs: coin in 3D (WOS), disk in 2D (alpha=1), exact");
  long sub_n = 10'000;
  int grid = 101;
  double half_thickness = 1e-4;
  sub->add_option("-n,--n", sub_n, "Hits per sample")->capture_default_str();
  sub->add_option("--grid", grid, "Radius grid points")->capture_default_str();
  sub->add_option("--half-thickness", half_thickness, "Coin half-thickness")->capture_default_str();
  sub->add_option("-o,--out", out, "CDF CSV ('-' for stdout)")->capture_default_str();

  auto* ball = app.add_subcommand("ball-exact", "Closed-form alpha-capacity of a ball");
  double b_alpha = 2.0, b_r = 1.0;
  int b_d = 3;
  ball->add_option("--alpha", b_alpha, "Stability index in (0, 2]")->required();
  ball->add_option("-d,--dim", b_d, "Dimension")->required();
  ball->add_option("-r,--radius", b_r, "Radius")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hits) return cmd_hits(common, wf, out, stats_out, paths_out);
    if (*capacity) return cmd_capacity(common, wf, ef, hits_in, out);
    if (*sweep_cmd) return cmd_sweep(common, wf, ef, alphas, relative, out);
    if (*cov) return cmd_coverage(common, wf, ef, replications, out);
    if (*sub) return cmd_subordination(common, sub_n, grid, half_thickness, out);
    if (*ball) return cmd_ball_exact(b_alpha, b_d, b_r);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
