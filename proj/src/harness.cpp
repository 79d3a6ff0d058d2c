#include "morph/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <thread>

#include "morph/svg.hpp"

namespace fs = std::filesystem;

namespace morph::harness {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

const std::vector<std::string> kCircleMethodOrder = {"analytic", "sweep", "pso",  "bo",
                                                     "cmaes",    "sac",   "ddpg", "ppo"};
const std::vector<std::string> kPathMethodOrder = {"sac", "ddpg", "ppo", "equal-dex",
                                                   "band-match"};
const std::vector<std::string> kRlAlgos = {"sac", "ddpg", "ppo"};

std::string display_name(const std::string& method) {
  if (method == "analytic") return "Analytic";
  if (method == "sweep") return "Sweep";
  if (method == "pso") return "PSO";
  if (method == "bo") return "BO";
  if (method == "cmaes") return "CMA-ES";
  if (method == "sac") return "SAC";
  if (method == "ddpg") return "DDPG";
  if (method == "ppo") return "PPO";
  return method;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for n < 2
};

Stats mean_std(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return s;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return s;
}

// Independent accumulation route used only to cross-check mean_std before
// anything is written.
Stats mean_std_welford(const std::vector<double>& v) {
  Stats s;
  long n = 0;
  double mean = 0.0, m2 = 0.0;
  for (double x : v) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  s.mean = n > 0 ? mean : 0.0;
  s.stddev = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  return s;
}

void integrity_check(double written, double recomputed, const std::string& what) {
  if (!(std::abs(written - recomputed) <= 1e-12)) {
    throw std::logic_error("integrity check failed for " + what);
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  for (std::size_t pos = 0; pos <= content.size();) {
    const std::size_t nl = content.find('\n', pos);
    line = content.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (!line.empty()) {
      std::vector<std::string> fields;
      std::size_t start = 0;
      for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos
                                                                       : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      rows.push_back(std::move(fields));
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return rows;
}

// ---------------------------------------------------------------------------
// RL execution

struct RlJob {
  std::string algo;
  std::uint64_t seed = 0;
};

std::vector<rl::TrainRecord> run_rl_jobs(const std::vector<RlJob>& jobs,
                                         const ExperimentConfig& c, const rl::Context& ctx,
                                         const rl::ActionSpec& spec, const rl::RewardFn& fn) {
  std::vector<rl::TrainRecord> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> cursor{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const RlJob& job = jobs[i];
        if (job.algo == "sac") {
          results[i] = rl::train_sac(fn, ctx, spec, job.seed, c.rl);
        } else if (job.algo == "ddpg") {
          results[i] = rl::train_ddpg(fn, ctx, spec, job.seed, c.rl);
        } else {
          results[i] = rl::train_ppo(fn, ctx, spec, job.seed, c.rl);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  unsigned n_workers = c.workers > 0 ? static_cast<unsigned>(c.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(std::max<std::size_t>(
                                                jobs.size(), 1)));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string curves_csv(const rl::TrainRecord& rec) {
  std::string out = "episode,reward,reward_ma100\n";
  double window_sum = 0.0;
  for (std::size_t i = 0; i < rec.episodes.size(); ++i) {
    window_sum += rec.episodes[i].reward;
    if (i >= 100) window_sum -= rec.episodes[i - 100].reward;
    const double ma = window_sum / static_cast<double>(std::min<std::size_t>(i + 1, 100));
    out += std::to_string(i + 1) + "," + format_fixed(rec.episodes[i].reward) + "," +
           format_fixed(ma) + "\n";
  }
  return out;
}

nlohmann::json action_json(const rl::PhysicalAction& a, double reward) {
  nlohmann::json j;
  j["reward"] = reward;
  j["l1"] = a.morph.l1;
  j["l2"] = a.morph.l2;
  j["theta2_cmd"] = a.morph.theta2_cmd;
  if (a.mode == rl::ActionMode::CirclePhi) j["phi_deg"] = a.phi * kRadToDeg;
  return j;
}

// ---------------------------------------------------------------------------
// SVG charts for report()

std::string svg_circle_endpoints(
    const std::vector<std::pair<double, double>>& curve,
    const std::vector<std::tuple<std::string, double, double>>& endpoints) {
  SvgCanvas svg(520, 340);
  const LinearScale sx(0.0, 90.0, 50.0, 500.0);
  const LinearScale sy(0.0, 1.05, 310.0, 20.0);
  svg.line(50, 310, 500, 310, "#333");
  svg.line(50, 310, 50, 20, "#333");
  std::vector<std::pair<double, double>> px;
  px.reserve(curve.size());
  for (const auto& [deg, w] : curve) px.emplace_back(sx(deg), sy(w));
  svg.polyline(px, "#888");
  svg.line(sx(45.0), 310, sx(45.0), 20, "#bbb", 0.8);
  double ty = 30.0;
  for (const auto& [label, deg, w] : endpoints) {
    svg.circle(sx(deg), sy(w), 3.5, "#c33");
    svg.text(sx(deg) + 5, ty, label, 10);
    ty += 12.0;
  }
  svg.text(275, 332, "phi [deg]", 11, "middle");
  svg.text(12, 165, "w", 11, "middle");
  return svg.str();
}

std::string svg_deviation_bars(
    const std::vector<std::tuple<std::string, std::uint64_t, std::string, double>>& rows) {
  SvgCanvas svg(640, 300);
  double max_dev = 1e-9;
  for (const auto& r : rows) max_dev = std::max(max_dev, std::get<3>(r));
  const LinearScale sy(0.0, max_dev * 1.1, 270.0, 20.0);
  svg.line(40, 270, 620, 270, "#333");
  const double bar_w = 560.0 / static_cast<double>(std::max<std::size_t>(rows.size(), 1));
  double x = 45.0;
  for (const auto& [algo, seed, kind, dev] : rows) {
    const std::string color = kind == "BEST" ? "#36c" : "#c93";
    svg.rect(x, sy(dev), bar_w * 0.8, 270.0 - sy(dev), color, 0.85);
    svg.text(x, 284, algo + std::to_string(seed), 8);
    x += bar_w;
  }
  svg.text(320, 298, "abs deviation from 45 deg (blue BEST, orange GREEDY)", 10, "middle");
  return svg.str();
}

std::string svg_annulus(
    const std::vector<std::tuple<std::string, double, double>>& algo_rminmax, double band_b,
    double band_a) {
  SvgCanvas svg(420, 320);
  double r_top = band_a;
  for (const auto& r : algo_rminmax) r_top = std::max(r_top, std::get<2>(r));
  const LinearScale sy(0.0, r_top * 1.1, 290.0, 20.0);
  svg.rect(40, sy(band_a), 360, sy(band_b) - sy(band_a), "#9c6", 0.3);
  svg.line(40, 290, 400, 290, "#333");
  double x = 80.0;
  for (const auto& [algo, rmin, rmax] : algo_rminmax) {
    svg.line(x, sy(rmin), x, sy(rmax), "#36c", 6.0);
    svg.text(x, 308, algo, 10, "middle");
    x += 100.0;
  }
  svg.text(210, 14, "learned annulus vs target band (shaded)", 10, "middle");
  return svg.str();
}

std::string svg_morphology(
    const std::vector<std::tuple<std::string, double, double>>& algo_l1l2) {
  SvgCanvas svg(380, 380);
  const LinearScale sx(0.0, 0.7, 40.0, 360.0);
  const LinearScale sy(0.0, 0.7, 340.0, 20.0);
  svg.line(40, 340, 360, 340, "#333");
  svg.line(40, 340, 40, 20, "#333");
  svg.line(sx(0.0), sy(0.0), sx(0.7), sy(0.7), "#bbb", 0.8);
  for (const auto& [algo, l1, l2] : algo_l1l2) {
    svg.circle(sx(l1), sy(l2), 4.0, "#c33");
    svg.text(sx(l1) + 6, sy(l2), algo, 10);
  }
  svg.text(200, 365, "L1 [m]", 11, "middle");
  svg.text(12, 180, "L2 [m]", 11, "middle");
  return svg.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Small utilities

std::string task_name(const TaskPath& t) {
  switch (t.kind) {
    case PathKind::Circle:
      return "circle";
    case PathKind::Ellipse:
      return "ellipse";
    case PathKind::Rectangle:
      return "rectangle";
  }
  return "unknown";
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

TaskPath task_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "circle");
  const int n = j.value("n_samples", 720);
  TaskPath t;
  if (kind == "circle") {
    t = TaskPath::circle(j.value("radius", 0.40), n);
  } else if (kind == "ellipse") {
    t = TaskPath::ellipse(j.value("semi_x", 0.40), j.value("semi_y", 0.25), n);
  } else if (kind == "rectangle" || kind == "rect") {
    t = TaskPath::rectangle(j.value("width", 0.70), j.value("height", 0.40), n);
  } else {
    throw ConfigError("unknown task kind: " + kind);
  }
  const std::string sampling = j.value("sampling", "parameter");
  if (sampling == "arclength") {
    t.ellipse_sampling = EllipseSampling::UniformArcLength;
  } else if (sampling != "parameter") {
    throw ConfigError("unknown ellipse sampling mode: " + sampling);
  }
  return t;
}

nlohmann::json task_to_json(const TaskPath& t) {
  nlohmann::json j;
  j["kind"] = task_name(t);
  j["n_samples"] = t.n_samples;
  switch (t.kind) {
    case PathKind::Circle:
      j["radius"] = t.size1;
      break;
    case PathKind::Ellipse:
      j["semi_x"] = t.size1;
      j["semi_y"] = t.size2;
      j["sampling"] =
          t.ellipse_sampling == EllipseSampling::UniformArcLength ? "arclength" : "parameter";
      break;
    case PathKind::Rectangle:
      j["width"] = t.size1;
      j["height"] = t.size2;
      break;
  }
  return j;
}

RewardVariant variant_from_string(const std::string& s) {
  if (s == "raw") return RewardVariant::Raw;
  if (s == "norm") return RewardVariant::Norm;
  if (s == "band") return RewardVariant::Band;
  if (s == "hyb" || s == "hybrid") return RewardVariant::Hybrid;
  throw ConfigError("unknown reward variant: " + s);
}

std::string variant_to_string(RewardVariant v) {
  switch (v) {
    case RewardVariant::Raw:
      return "raw";
    case RewardVariant::Norm:
      return "norm";
    case RewardVariant::Band:
      return "band";
    case RewardVariant::Hybrid:
      return "hyb";
  }
  return "hyb";
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("task")) c.task = task_from_json(j.at("task"));
  if (j.contains("variant")) {
    c.variant = variant_from_string(j.at("variant").get<std::string>());
    if (c.task.kind == PathKind::Circle) {
      throw ConfigError("circle experiments always use the analytic objective; "
                        "remove the variant field");
    }
    if (c.variant != RewardVariant::Hybrid) {
      throw ConfigError("path experiments use the hybrid reward; remove or set variant=hyb");
    }
  }
  if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.episodes = j.value("episodes", c.episodes);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.sweep_grid = j.value("sweep_grid", c.sweep_grid);
  c.heuristic_seed = j.value("heuristic_seed", c.heuristic_seed);
  c.workers = j.value("workers", c.workers);

  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    c.weights.w_unr = w.value("w_unr", c.weights.w_unr);
    c.weights.w_in = w.value("w_in", c.weights.w_in);
    c.weights.w_out = w.value("w_out", c.weights.w_out);
    c.weights.w_len = w.value("w_len", c.weights.w_len);
  }
  if (j.contains("rl")) {
    const auto& r = j.at("rl");
    c.rl.batch = r.value("batch", c.rl.batch);
    c.rl.warmup = r.value("warmup", c.rl.warmup);
    c.rl.replay_capacity = r.value("replay_capacity", c.rl.replay_capacity);
    c.rl.gamma = r.value("gamma", c.rl.gamma);
    c.rl.tau = r.value("tau", c.rl.tau);
    if (r.contains("hidden")) c.rl.hidden = r.at("hidden").get<std::vector<int>>();
    if (r.contains("critic_hidden")) {
      c.rl.critic_hidden = r.at("critic_hidden").get<std::vector<int>>();
    }
    c.rl.final_layer_scale = r.value("final_layer_scale", c.rl.final_layer_scale);
    c.rl.sac_lr = r.value("sac_lr", c.rl.sac_lr);
    c.rl.sac_alpha = r.value("sac_alpha", c.rl.sac_alpha);
    c.rl.ddpg_lr = r.value("ddpg_lr", c.rl.ddpg_lr);
    c.rl.ddpg_noise_start = r.value("ddpg_noise_start", c.rl.ddpg_noise_start);
    c.rl.ddpg_noise_end = r.value("ddpg_noise_end", c.rl.ddpg_noise_end);
    c.rl.ppo_batch = r.value("ppo_batch", c.rl.ppo_batch);
    c.rl.ppo_epochs = r.value("ppo_epochs", c.rl.ppo_epochs);
    c.rl.ppo_minibatch = r.value("ppo_minibatch", c.rl.ppo_minibatch);
    c.rl.ppo_lr = r.value("ppo_lr", c.rl.ppo_lr);
    c.rl.ppo_clip = r.value("ppo_clip", c.rl.ppo_clip);
  }
  if (j.contains("pso")) {
    const auto& p = j.at("pso");
    c.pso.particles = p.value("particles", c.pso.particles);
    c.pso.iterations = p.value("iterations", c.pso.iterations);
    c.pso.inertia = p.value("inertia", c.pso.inertia);
    c.pso.c1 = p.value("c1", c.pso.c1);
    c.pso.c2 = p.value("c2", c.pso.c2);
    c.pso.v_init = p.value("v_init", c.pso.v_init);
  }
  if (j.contains("bo")) {
    const auto& b = j.at("bo");
    c.bo.init_points = b.value("init_points", c.bo.init_points);
    c.bo.iterations = b.value("iterations", c.bo.iterations);
    c.bo.grid_points = b.value("grid_points", c.bo.grid_points);
    c.bo.lengthscale = b.value("lengthscale", c.bo.lengthscale);
    c.bo.signal_variance = b.value("signal_variance", c.bo.signal_variance);
    c.bo.noise = b.value("noise", c.bo.noise);
    c.bo.xi = b.value("xi", c.bo.xi);
  }
  if (j.contains("cmaes")) {
    const auto& m = j.at("cmaes");
    c.cmaes.lambda = m.value("lambda", c.cmaes.lambda);
    c.cmaes.mu = m.value("mu", c.cmaes.mu);
    c.cmaes.iterations = m.value("iterations", c.cmaes.iterations);
    c.cmaes.sigma0_frac = m.value("sigma0_frac", c.cmaes.sigma0_frac);
    c.cmaes.c_mu = m.value("c_mu", c.cmaes.c_mu);
    c.cmaes.sigma_min = m.value("sigma_min", c.cmaes.sigma_min);
    c.cmaes.sigma_max_frac = m.value("sigma_max_frac", c.cmaes.sigma_max_frac);
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["task"] = task_to_json(c.task);
  if (c.task.kind != PathKind::Circle) j["variant"] = variant_to_string(c.variant);
  j["methods"] = c.methods;
  j["seeds"] = c.seeds;
  j["episodes"] = c.episodes;
  j["out_dir"] = c.out_dir;
  j["sweep_grid"] = c.sweep_grid;
  j["heuristic_seed"] = c.heuristic_seed;
  j["workers"] = c.workers;
  j["weights"] = {{"w_unr", c.weights.w_unr},
                  {"w_in", c.weights.w_in},
                  {"w_out", c.weights.w_out},
                  {"w_len", c.weights.w_len}};
  j["rl"] = {{"batch", c.rl.batch},
             {"warmup", c.rl.warmup},
             {"replay_capacity", c.rl.replay_capacity},
             {"gamma", c.rl.gamma},
             {"tau", c.rl.tau},
             {"hidden", c.rl.hidden},
             {"critic_hidden", c.rl.critic_hidden},
             {"final_layer_scale", c.rl.final_layer_scale},
             {"sac_lr", c.rl.sac_lr},
             {"sac_alpha", c.rl.sac_alpha},
             {"ddpg_lr", c.rl.ddpg_lr},
             {"ddpg_noise_start", c.rl.ddpg_noise_start},
             {"ddpg_noise_end", c.rl.ddpg_noise_end},
             {"ppo_batch", c.rl.ppo_batch},
             {"ppo_epochs", c.rl.ppo_epochs},
             {"ppo_minibatch", c.rl.ppo_minibatch},
             {"ppo_lr", c.rl.ppo_lr},
             {"ppo_clip", c.rl.ppo_clip}};
  j["pso"] = {{"particles", c.pso.particles}, {"iterations", c.pso.iterations},
              {"inertia", c.pso.inertia},     {"c1", c.pso.c1},
              {"c2", c.pso.c2},               {"v_init", c.pso.v_init}};
  j["bo"] = {{"init_points", c.bo.init_points},
             {"iterations", c.bo.iterations},
             {"grid_points", c.bo.grid_points},
             {"lengthscale", c.bo.lengthscale},
             {"signal_variance", c.bo.signal_variance},
             {"noise", c.bo.noise},
             {"xi", c.bo.xi}};
  j["cmaes"] = {{"lambda", c.cmaes.lambda},
                {"mu", c.cmaes.mu},
                {"iterations", c.cmaes.iterations},
                {"sigma0_frac", c.cmaes.sigma0_frac},
                {"c_mu", c.cmaes.c_mu},
                {"sigma_min", c.cmaes.sigma_min},
                {"sigma_max_frac", c.cmaes.sigma_max_frac}};
  return j;
}

void normalize_and_validate(ExperimentConfig& c) {
  if (c.task.size1 <= 0.0 || (c.task.kind != PathKind::Circle && c.task.size2 <= 0.0)) {
    throw ConfigError("task sizes must be strictly positive");
  }
  if (c.task.n_samples <= 0) throw ConfigError("n_samples must be positive");
  if (c.episodes <= 0) throw ConfigError("episodes must be positive");
  if (c.seeds.empty()) throw ConfigError("at least one seed is required");

  const bool circle = c.task.kind == PathKind::Circle;
  if (c.methods.empty()) {
    c.methods = circle ? kCircleMethodOrder : kPathMethodOrder;
  }
  const auto& allowed = circle ? kCircleMethodOrder : kPathMethodOrder;
  for (const auto& m : c.methods) {
    if (!contains(allowed, m)) {
      if (contains(kCircleMethodOrder, m) || contains(kPathMethodOrder, m)) {
        throw ConfigError("method '" + m + "' is not available for task '" +
                          task_name(c.task) + "' (heuristics and the sweep are circle-only; "
                          "equal-dex/band-match are path-only)");
      }
      throw ConfigError("unknown method: " + m);
    }
  }
  if (!circle) c.variant = RewardVariant::Hybrid;

  c.rl.episodes = c.episodes;
  const bool has_rl = contains(c.methods, "sac") || contains(c.methods, "ddpg") ||
                      contains(c.methods, "ppo");
  if (has_rl) {
    if (c.rl.batch <= 0 || c.rl.warmup < 0) throw ConfigError("invalid rl batch/warmup");
    if (contains(c.methods, "ppo")) {
      if (c.rl.ppo_batch <= 0 || c.rl.ppo_minibatch <= 0 ||
          c.rl.ppo_minibatch > c.rl.ppo_batch) {
        throw ConfigError("invalid ppo batch/minibatch");
      }
      if (c.episodes < c.rl.ppo_batch) {
        throw ConfigError("episodes must be at least one ppo batch");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// run()

namespace {

struct StagedOutputs {
  std::string dir;
  std::vector<std::pair<std::string, std::string>> files;  // (name, content)

  void add(const std::string& name, std::string content) {
    files.emplace_back(name, std::move(content));
  }

  std::vector<std::string> commit() {
    fs::create_directories(dir);
    std::vector<std::string> written;
    written.reserve(files.size());
    for (const auto& [name, content] : files) {
      const std::string path = join_path(dir, name);
      write_file(path, content);
      written.push_back(path);
    }
    return written;
  }
};

struct CircleRow {
  std::string method;
  double phi_deg = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double w_norm = 0.0;
};

std::string circle_summary_csv(const std::vector<CircleRow>& rows) {
  std::string out = "Method,phi_deg,L1_m,L2_m,w_norm\n";
  for (const auto& r : rows) {
    out += r.method + "," + format_fixed(r.phi_deg) + "," + format_fixed(r.l1) + "," +
           format_fixed(r.l2) + "," + format_fixed(r.w_norm) + "\n";
  }
  return out;
}

// Per-method endpoint on the circle task. RL rows aggregate the best
// observed phi across seeds; the reported lengths and w_norm are re-derived
// from that mean angle so each row is internally consistent.
CircleRow circle_rl_row(const std::string& algo, const std::vector<double>& best_phi_deg,
                        double radius, bool welford) {
  const Stats s = welford ? mean_std_welford(best_phi_deg) : mean_std(best_phi_deg);
  CircleRow row;
  row.method = display_name(algo);
  row.phi_deg = s.mean;
  const double phi = s.mean * kDegToRad;
  row.l1 = radius * std::cos(phi);
  row.l2 = radius * std::sin(phi);
  row.w_norm = std::sin(2.0 * phi);
  return row;
}

void run_circle(const ExperimentConfig& c, StagedOutputs& staged, nlohmann::json& records) {
  const double radius = c.task.size1;
  std::vector<CircleRow> rows;
  records["heuristics"] = nlohmann::json::array();

  const Objective1D objective = [](double phi) {
    return circle_analytic_reward(PhiParam{phi});
  };
  const SearchSpace1D space;

  for (const auto& method : kCircleMethodOrder) {
    if (!contains(c.methods, method)) continue;
    if (method == "analytic") {
      const BaselineResult br = analytic_circle_optimum(radius);
      rows.push_back(CircleRow{"Analytic", 45.0, br.morphology.l1, br.morphology.l2, 1.0});
      records["analytic"] = {{"l1", br.morphology.l1},
                             {"l2", br.morphology.l2},
                             {"theta2_deg", 90.0},
                             {"w_max", br.objective}};
    } else if (method == "sweep") {
      const BaselineResult br = phi_sweep(radius, c.sweep_grid);
      const double phi = std::atan2(br.morphology.l2, br.morphology.l1);
      rows.push_back(CircleRow{"Sweep", phi * kRadToDeg, br.morphology.l1, br.morphology.l2,
                               br.objective});
      records["sweep"] = {{"phi_deg", phi * kRadToDeg},
                          {"w_norm", br.objective},
                          {"n_grid", c.sweep_grid}};
    } else if (method == "pso" || method == "bo" || method == "cmaes") {
      RngStream rng(c.heuristic_seed);
      OptimizerResult res;
      if (method == "pso") {
        res = pso_optimize(objective, space, rng, c.pso);
      } else if (method == "bo") {
        res = bo_optimize(objective, space, rng, c.bo);
      } else {
        res = cmaes_optimize(objective, space, rng, c.cmaes);
      }
      const auto [l1, l2] = phi_to_lengths(PhiParam{res.best_x}, radius);
      rows.push_back(
          CircleRow{display_name(method), res.best_x * kRadToDeg, l1, l2, res.best_f});
      records["heuristics"].push_back({{"method", method},
                                       {"phi_deg", res.best_x * kRadToDeg},
                                       {"w_norm", res.best_f},
                                       {"eval_count", res.eval_count},
                                       {"seed", c.heuristic_seed}});
    }
  }

  // RL methods across seeds
  std::vector<std::string> rl_methods;
  for (const auto& algo : kRlAlgos) {
    if (contains(c.methods, algo)) rl_methods.push_back(algo);
  }
  records["rl"] = nlohmann::json::array();
  if (!rl_methods.empty()) {
    const rl::Context ctx = rl::Context::for_task(c.task);
    const rl::ActionSpec spec{rl::ActionMode::CirclePhi, radius, 0.05, 0.60};
    const rl::RewardFn fn = [](const rl::PhysicalAction& a) {
      return circle_analytic_reward(PhiParam{a.phi});
    };
    std::vector<RlJob> jobs;
    for (const auto& algo : rl_methods) {
      for (const auto seed : c.seeds) jobs.push_back(RlJob{algo, seed});
    }
    const auto results = run_rl_jobs(jobs, c, ctx, spec, fn);

    std::size_t k = 0;
    for (const auto& algo : rl_methods) {
      std::vector<double> best_phi_deg;
      for (std::size_t s = 0; s < c.seeds.size(); ++s, ++k) {
        const rl::TrainRecord& rec = results[k];
        best_phi_deg.push_back(rec.best_action.phi * kRadToDeg);
        nlohmann::json entry;
        entry["algo"] = rec.algorithm;
        entry["seed"] = rec.seed;
        entry["best"] = action_json(rec.best_action, rec.best_reward);
        entry["greedy"] = action_json(rec.greedy_action, rec.greedy_reward);
        entry["updates"] = rec.updates;
        entry["n_episodes"] = rec.episodes.size();
        entry["params_finite"] = rec.params_finite;
        records["rl"].push_back(std::move(entry));
        staged.add("curves_" + rec.algorithm + "_" + std::to_string(rec.seed) + ".csv",
                   curves_csv(rec));
      }
      const CircleRow row = circle_rl_row(algo, best_phi_deg, radius, false);
      const CircleRow check = circle_rl_row(algo, best_phi_deg, radius, true);
      integrity_check(row.phi_deg, check.phi_deg, "circle " + algo + " phi");
      integrity_check(row.w_norm, check.w_norm, "circle " + algo + " w_norm");
      rows.push_back(row);
    }
  }

  staged.add("circle_summary_methods.csv", circle_summary_csv(rows));
}

void run_path_task(const ExperimentConfig& c, StagedOutputs& staged, nlohmann::json& records) {
  const std::string tname = task_name(c.task);
  const SampledPath path = sample_path(c.task);
  const Band band = band_for(c.task);

  records["band"] = {{"b", band.inner}, {"a", band.outer}};
  records["baselines"] = nlohmann::json::array();

  // Constructive baselines
  std::string baseline_csv = "name,L1_m,L2_m,rmin_m,rmax_m,r_hyb\n";
  bool wrote_baseline = false;
  for (const std::string name : {"equal-dex", "band-match"}) {
    if (!contains(c.methods, name)) continue;
    const BaselineResult br = name == std::string("equal-dex")
                                  ? equal_dex_baseline(c.task, c.weights)
                                  : band_match_baseline(band);
    const Annulus ann = annulus_of(br.morphology);
    const RewardBreakdown rb = evaluate_reward(br.morphology, path, band, c.weights);
    baseline_csv += std::string(name) + "," + format_fixed(br.morphology.l1) + "," +
                    format_fixed(br.morphology.l2) + "," + format_fixed(ann.r_min) + "," +
                    format_fixed(ann.r_max) + "," + format_fixed(rb.r_hyb) + "\n";
    records["baselines"].push_back({{"name", name},
                                    {"l1", br.morphology.l1},
                                    {"l2", br.morphology.l2},
                                    {"r_min", ann.r_min},
                                    {"r_max", ann.r_max},
                                    {"r_hyb", rb.r_hyb},
                                    {"coverage", rb.coverage}});
    wrote_baseline = true;
  }
  if (wrote_baseline) staged.add("baselines_" + tname + ".csv", baseline_csv);

  std::vector<std::string> rl_methods;
  for (const auto& algo : kRlAlgos) {
    if (contains(c.methods, algo)) rl_methods.push_back(algo);
  }
  records["rl"] = nlohmann::json::array();
  if (rl_methods.empty()) return;

  const rl::Context ctx = rl::Context::for_task(c.task);
  const rl::ActionSpec spec{rl::ActionMode::FullMorphology, c.task.size1, 0.05, 0.60};
  const RewardVariant variant = c.variant;
  const RewardWeights weights = c.weights;
  const rl::RewardFn fn = [path, band, weights, variant](const rl::PhysicalAction& a) {
    return evaluate_reward(a.morph, path, band, weights).value(variant);
  };

  std::vector<RlJob> jobs;
  for (const auto& algo : rl_methods) {
    for (const auto seed : c.seeds) jobs.push_back(RlJob{algo, seed});
  }
  const auto results = run_rl_jobs(jobs, c, ctx, spec, fn);

  struct AlgoStats {
    Stats l1, l2, reward, rmin, rmax;
  };
  std::map<std::string, AlgoStats> per_algo;

  std::size_t k = 0;
  for (const auto& algo : rl_methods) {
    std::vector<double> l1s, l2s, rewards, rmins, rmaxs;
    for (std::size_t s = 0; s < c.seeds.size(); ++s, ++k) {
      const rl::TrainRecord& rec = results[k];
      const Morphology& gm = rec.greedy_action.morph;
      l1s.push_back(gm.l1);
      l2s.push_back(gm.l2);
      rewards.push_back(rec.greedy_reward);
      const Annulus ann = annulus_of(gm);
      rmins.push_back(ann.r_min);
      rmaxs.push_back(ann.r_max);

      nlohmann::json entry;
      entry["algo"] = rec.algorithm;
      entry["seed"] = rec.seed;
      entry["best"] = action_json(rec.best_action, rec.best_reward);
      entry["greedy"] = action_json(rec.greedy_action, rec.greedy_reward);
      entry["updates"] = rec.updates;
      entry["n_episodes"] = rec.episodes.size();
      entry["params_finite"] = rec.params_finite;
      records["rl"].push_back(std::move(entry));
      staged.add("curves_" + rec.algorithm + "_" + std::to_string(rec.seed) + ".csv",
                 curves_csv(rec));
    }
    AlgoStats st;
    st.l1 = mean_std(l1s);
    st.l2 = mean_std(l2s);
    st.reward = mean_std(rewards);
    st.rmin = mean_std(rmins);
    st.rmax = mean_std(rmaxs);
    const AlgoStats verify{mean_std_welford(l1s), mean_std_welford(l2s),
                           mean_std_welford(rewards), mean_std_welford(rmins),
                           mean_std_welford(rmaxs)};
    integrity_check(st.l1.mean, verify.l1.mean, tname + " " + algo + " L1 mean");
    integrity_check(st.l1.stddev, verify.l1.stddev, tname + " " + algo + " L1 std");
    integrity_check(st.reward.mean, verify.reward.mean, tname + " " + algo + " reward mean");
    integrity_check(st.rmax.stddev, verify.rmax.stddev, tname + " " + algo + " rmax std");
    per_algo[algo] = st;
  }

  // Row order SAC, DDPG, PPO is a stable part of this file's format; the
  // combined summary is only written when all three are present.
  if (per_algo.size() == kRlAlgos.size()) {
    std::string csv = "algo,L1_mean,L1_std,L2_mean,L2_std,R_mean,R_std\n";
    for (const auto& algo : kRlAlgos) {
      const AlgoStats& st = per_algo.at(algo);
      csv += display_name(algo) + "," + format_fixed(st.l1.mean) + "," +
             format_fixed(st.l1.stddev) + "," + format_fixed(st.l2.mean) + "," +
             format_fixed(st.l2.stddev) + "," + format_fixed(st.reward.mean) + "," +
             format_fixed(st.reward.stddev) + "\n";
    }
    staged.add("combined_" + tname + "_hybrid_algos_L1L2R.csv", csv);
  }

  std::string annulus_csv = "algo,rmin_mean,rmin_std,rmax_mean,rmax_std,band_b,band_a\n";
  for (const auto& algo : kRlAlgos) {
    const auto it = per_algo.find(algo);
    if (it == per_algo.end()) continue;
    const AlgoStats& st = it->second;
    annulus_csv += display_name(algo) + "," + format_fixed(st.rmin.mean) + "," +
                   format_fixed(st.rmin.stddev) + "," + format_fixed(st.rmax.mean) + "," +
                   format_fixed(st.rmax.stddev) + "," + format_fixed(band.inner) + "," +
                   format_fixed(band.outer) + "\n";
  }
  staged.add("annulus_" + tname + ".csv", annulus_csv);
}

}  // namespace

std::vector<std::string> run(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  normalize_and_validate(c);

  StagedOutputs staged;
  staged.dir = c.out_dir;

  nlohmann::json records;
  records["task"] = task_name(c.task);

  if (c.task.kind == PathKind::Circle) {
    run_circle(c, staged, records);
  } else {
    run_path_task(c, staged, records);
  }

  const nlohmann::json effective = config_to_json(c);
  const std::string config_dump = effective.dump(2);
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(config_dump)));
  records["config_hash"] = hash_buf;
  staged.add("records.json", records.dump(2) + "\n");

  nlohmann::json meta;
  meta["config"] = effective;
  meta["config_hash"] = hash_buf;
  meta["defaults_unstated"] = {
      {"policy_hidden_layers", c.rl.hidden},
      {"critic_hidden_layers", c.rl.critic_hidden},
      {"activations", "tanh hidden for policy nets, relu hidden for critic/value nets"},
      {"weight_init", "Glorot uniform, final policy layer scaled by " +
                          format_fixed(c.rl.final_layer_scale, 4)},
      {"log_std_clamp", {nn::kLogStdMin, nn::kLogStdMax}},
      {"rng", "mt19937_64; uniform = (x>>11)*2^-53, normal = Marsaglia polar"},
      {"ddpg_exploration", "Gaussian on the pre-squash action, stddev linear " +
                               format_fixed(c.rl.ddpg_noise_start, 3) + " -> " +
                               format_fixed(c.rl.ddpg_noise_end, 3)},
      {"ppo_epochs", c.rl.ppo_epochs},
      {"ppo_minibatch", c.rl.ppo_minibatch},
      {"ppo_iterations", c.episodes / c.rl.ppo_batch},
      {"cmaes_weights", "log-decreasing ln(mu+1/2)-ln(i), rank-mu c_mu=" +
                            format_fixed(c.cmaes.c_mu, 2)},
      {"bo_signal_variance", c.bo.signal_variance},
      {"circle_context", "[1,0,0,R,0]"},
      {"ellipse_sampling", c.task.ellipse_sampling == EllipseSampling::UniformArcLength
                               ? "uniform arc length"
                               : "uniform parameter"},
      {"gamma_note", "gamma is configuration-only; single-step targets equal the reward"},
  };
  nlohmann::json names = nlohmann::json::array();
  for (const auto& [name, content] : staged.files) names.push_back(name);
  meta["outputs"] = names;
  staged.add("run_metadata.json", meta.dump(2) + "\n");

  return staged.commit();
}

// ---------------------------------------------------------------------------
// report()

std::vector<std::string> report(const std::string& run_dir, const ReportOptions& opt) {
  auto need = [&](const std::string& name) -> std::string {
    const std::string path = join_path(run_dir, name);
    if (!fs::exists(path)) {
      throw IoError("report: missing input file: " + path);
    }
    return read_file(path);
  };

  const nlohmann::json meta = nlohmann::json::parse(need("run_metadata.json"));
  const nlohmann::json records = nlohmann::json::parse(need("records.json"));
  const std::string tname = meta.at("config").at("task").at("kind").get<std::string>();

  StagedOutputs staged;
  staged.dir = run_dir;

  if (tname == "circle") {
    const auto summary = parse_csv(need("circle_summary_methods.csv"));
    if (summary.size() < 2) throw IoError("report: circle_summary_methods.csv has no rows");

    std::string endpoints = "series,label,phi_deg,w_norm\n";
    std::vector<std::pair<double, double>> curve;
    for (int i = 0; i <= 180; ++i) {
      const double deg = 90.0 * i / 180.0;
      const double w = std::sin(2.0 * deg * kDegToRad);
      curve.emplace_back(deg, w);
      endpoints += "curve,analytic," + format_fixed(deg) + "," + format_fixed(w) + "\n";
    }
    std::vector<std::tuple<std::string, double, double>> marks;
    for (std::size_t i = 1; i < summary.size(); ++i) {
      const auto& row = summary[i];
      endpoints += "endpoint," + row[0] + "," + row[1] + "," + row[4] + "\n";
      marks.emplace_back(row[0], std::stod(row[1]), std::stod(row[4]));
    }
    staged.add("plot_circle_endpoints.csv", endpoints);

    std::string dev = "algo,seed,kind,abs_dev_deg\n";
    std::vector<std::tuple<std::string, std::uint64_t, std::string, double>> dev_rows;
    for (const auto& entry : records.at("rl")) {
      const std::string algo = entry.at("algo").get<std::string>();
      const auto seed = entry.at("seed").get<std::uint64_t>();
      for (const std::string kind : {"best", "greedy"}) {
        const double phi = entry.at(kind).at("phi_deg").get<double>();
        const double d = std::abs(phi - 45.0);
        const std::string label = kind == std::string("best") ? "BEST" : "GREEDY";
        dev += display_name(algo) + "," + std::to_string(seed) + "," + label + "," +
               format_fixed(d) + "\n";
        dev_rows.emplace_back(display_name(algo), seed, label, d);
      }
    }
    staged.add("plot_circle_deviation.csv", dev);

    if (opt.svg) {
      staged.add("fig_circle_endpoints.svg", svg_circle_endpoints(curve, marks));
      staged.add("fig_circle_deviation.svg", svg_deviation_bars(dev_rows));
    }
  } else {
    const auto combined = parse_csv(need("combined_" + tname + "_hybrid_algos_L1L2R.csv"));
    const auto annulus = parse_csv(need("annulus_" + tname + ".csv"));
    if (combined.size() < 2 || annulus.size() < 2) {
      throw IoError("report: summary CSVs in " + run_dir + " have no data rows");
    }

    std::string annulus_long = "algo,metric,value\n";
    std::vector<std::tuple<std::string, double, double>> bars;
    double band_b = 0.0, band_a = 0.0;
    for (std::size_t i = 1; i < annulus.size(); ++i) {
      const auto& row = annulus[i];
      const char* metrics[] = {"rmin_mean", "rmin_std", "rmax_mean",
                               "rmax_std",  "band_b",   "band_a"};
      for (int m = 0; m < 6; ++m) {
        annulus_long += row[0] + "," + metrics[m] + "," + row[static_cast<std::size_t>(m + 1)] +
                        "\n";
      }
      bars.emplace_back(row[0], std::stod(row[1]), std::stod(row[3]));
      band_b = std::stod(row[5]);
      band_a = std::stod(row[6]);
    }
    staged.add("plot_" + tname + "_annulus.csv", annulus_long);

    std::string morph_long = "algo,metric,value\n";
    std::vector<std::tuple<std::string, double, double>> pts;
    for (std::size_t i = 1; i < combined.size(); ++i) {
      const auto& row = combined[i];
      const char* metrics[] = {"L1_mean", "L1_std", "L2_mean", "L2_std", "R_mean", "R_std"};
      for (int m = 0; m < 6; ++m) {
        morph_long += row[0] + "," + metrics[m] + "," + row[static_cast<std::size_t>(m + 1)] +
                      "\n";
      }
      pts.emplace_back(row[0], std::stod(row[1]), std::stod(row[3]));
    }
    staged.add("plot_" + tname + "_morphology.csv", morph_long);

    if (opt.svg) {
      staged.add("fig_" + tname + "_annulus.svg", svg_annulus(bars, band_b, band_a));
      staged.add("fig_" + tname + "_morphology.svg", svg_morphology(pts));
    }
  }

  return staged.commit();
}

}  // namespace morph::harness
