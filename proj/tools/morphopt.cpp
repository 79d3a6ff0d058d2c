#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "morph/harness.hpp"

namespace {

using morph::harness::ConfigError;
using morph::harness::ExperimentConfig;

struct CommonFlags {
  std::string task = "circle";
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  int episodes = -1;
  std::string out_dir;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--task", f.task, "Task path: circle|ellipse|rect")
      ->check(CLI::IsMember({"circle", "ellipse", "rect", "rectangle"}));
  cmd->add_option("--config", f.config_path, "JSON configuration file");
  cmd->add_option("--seed", f.seeds, "Training seed (repeatable)");
  cmd->add_option("--episodes", f.episodes, "Episodes per training run");
  cmd->add_option("--out", f.out_dir, "Output directory");
}

ExperimentConfig build_config(const CommonFlags& f, const std::vector<std::string>& methods) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    const std::string text = morph::harness::read_file(f.config_path);
    c = morph::harness::config_from_json(nlohmann::json::parse(text));
  } else {
    if (f.task == "circle") {
      c.task = morph::TaskPath::circle(0.40);
    } else if (f.task == "ellipse") {
      c.task = morph::TaskPath::ellipse(0.40, 0.25);
    } else {
      c.task = morph::TaskPath::rectangle(0.70, 0.40);
    }
  }
  if (!methods.empty()) c.methods = methods;
  if (!f.seeds.empty()) c.seeds = f.seeds;
  if (f.episodes > 0) c.episodes = f.episodes;
  if (!f.out_dir.empty()) c.out_dir = f.out_dir;
  return c;
}

int run_and_print(const ExperimentConfig& c) {
  const auto files = morph::harness::run(c);
  for (const auto& f : files) std::cout << f << "\n";
  return 0;
}

void print_error(const std::string& type, const std::string& message) {
  nlohmann::json err;
  err["error"] = {{"type", type}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-aware morphology optimization for a planar 2R arm"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string heuristic_name, rl_name, baseline_name, report_dir;
  bool report_svg = false;

  CLI::App* sweep = app.add_subcommand("sweep", "1-D locus sweep (circle only)");
  add_common_flags(sweep, flags);

  CLI::App* heuristic = app.add_subcommand("heuristic", "PSO / BO / CMA-ES (circle only)");
  heuristic->add_option("name", heuristic_name, "pso|bo|cmaes")
      ->required()
      ->check(CLI::IsMember({"pso", "bo", "cmaes"}));
  add_common_flags(heuristic, flags);

  CLI::App* rl = app.add_subcommand("rl", "Train one RL algorithm");
  rl->add_option("name", rl_name, "sac|ddpg|ppo")
      ->required()
      ->check(CLI::IsMember({"sac", "ddpg", "ppo"}));
  add_common_flags(rl, flags);

  CLI::App* baseline = app.add_subcommand("baseline", "Constructive baselines");
  baseline->add_option("name", baseline_name, "equal-dex|band-match|analytic")
      ->required()
      ->check(CLI::IsMember({"equal-dex", "band-match", "analytic"}));
  add_common_flags(baseline, flags);

  CLI::App* run_all = app.add_subcommand("run-all", "Every method configured for the task");
  add_common_flags(run_all, flags);

  CLI::App* report = app.add_subcommand("report", "Derive plot data from a run directory");
  report->add_option("run_dir", report_dir, "Directory produced by a run")->required();
  report->add_flag("--svg", report_svg, "Also render SVG charts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return run_and_print(build_config(flags, {"analytic", "sweep"}));
    if (heuristic->parsed()) {
      return run_and_print(build_config(flags, {"analytic", heuristic_name}));
    }
    if (rl->parsed()) return run_and_print(build_config(flags, {rl_name}));
    if (baseline->parsed()) {
      std::vector<std::string> methods = baseline_name == "analytic"
                                             ? std::vector<std::string>{"analytic"}
                                             : std::vector<std::string>{baseline_name};
      return run_and_print(build_config(flags, methods));
    }
    if (run_all->parsed()) return run_and_print(build_config(flags, {}));
    if (report->parsed()) {
      const auto files =
          morph::harness::report(report_dir, morph::harness::ReportOptions{report_svg});
      for (const auto& f : files) std::cout << f << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    print_error("config", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    print_error("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 1;
  }
  return 0;
}
