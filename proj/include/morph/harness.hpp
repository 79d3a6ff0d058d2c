#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "morph/baselines.hpp"
#include "morph/blackbox.hpp"
#include "morph/reward.hpp"
#include "morph/rlagents.hpp"
#include "morph/taskpaths.hpp"

namespace morph::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complete description of one experiment. Every field has a default; the
// effective values (including everything the defaults fill in) are echoed
// into run_metadata.json so a run is auditable and reproducible.
struct ExperimentConfig {
  TaskPath task = TaskPath::circle(0.40);
  RewardVariant variant = RewardVariant::Hybrid;  // path tasks; circle runs
                                                  // always use the analytic
                                                  // objective instead
  std::vector<std::string> methods;               // empty -> task defaults
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int episodes = 5000;
  std::string out_dir = "runs/out";
  RewardWeights weights;
  rl::RlConfig rl;
  PsoSettings pso;
  BoSettings bo;
  CmaesSettings cmaes;
  int sweep_grid = 1801;
  std::uint64_t heuristic_seed = 0;
  int workers = 0;  // 0 -> hardware concurrency
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

// Fills task-dependent defaults (methods, reward variant, rl episodes) and
// checks method/task compatibility; throws ConfigError on violations such as
// heuristics on non-circle tasks.
void normalize_and_validate(ExperimentConfig& c);

std::string task_name(const TaskPath& t);
std::uint64_t fnv1a(std::string_view s);

// Fixed-point, locale-independent formatting used for every CSV number.
std::string format_fixed(double v, int decimals = 6);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);  // throws IoError if absent

// Executes every requested method, writes the summary/curve/annulus CSVs,
// records.json and run_metadata.json into c.out_dir, and returns the list
// of files written. All outputs are byte-deterministic for a fixed config.
std::vector<std::string> run(const ExperimentConfig& c);

struct ReportOptions {
  bool svg = false;
};

// Derives tidy plot-data files (and optional SVG charts) from a completed
// run directory. Verifies every required input exists before writing
// anything; a missing file aborts with its name and no partial output.
std::vector<std::string> report(const std::string& run_dir, const ReportOptions& opt = {});

}  // namespace morph::harness
