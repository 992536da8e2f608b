#pragma once

// Experiment configuration.
//
// Grammar (one entry per line):
//
//   line    := blank | comment | entry
//   comment := '#' anything
//   entry   := key '=' value [ '#' comment ]
//   key     := section '.' name       e.g. sampler.kappa
//   value   := scalar | scalar (',' scalar)*
//
// Whitespace around keys, values and list items is ignored. Keys may appear at
// most once; unknown keys are rejected. See docs/config.md for every key.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hacl/command_space.hpp"
#include "hacl/metrics.hpp"
#include "hacl/proxy_env.hpp"
#include "hacl/reward_model.hpp"
#include "hacl/sampler.hpp"

namespace hacl {

// Every problem found while reading or validating a config, one per line,
// each prefixed with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct RangeConfig {
  ActiveRange range;            // v_max holds the initial envelope
  std::size_t success_window = 50;
  double success_threshold = 0.8;
};

struct EnvConfig {
  EnvKind kind = EnvKind::kFrontier;
  FrontierParams frontier;       // v_cap_max / omega_cap_max follow range.cap
  double drift_std = 0.01;
  double bandit_noise_std = 0.1;
};

struct MetricsConfig {
  double mass = 12.0;
  double gravity = 9.81;
  CotDenominator cot_mode = CotDenominator::kTotalDistance;
  StabilityWeights stability_weights{std::vector<double>(kStabilityComponents, 1.0)};
};

struct ExperimentConfig {
  std::string name = "experiment";
  CommandGrid grid;
  RangeConfig range;
  SamplerConfig sampler;
  PredictorConfig predictor;
  double reward_scale_floor = 1.0;
  EnvConfig env;
  MetricsConfig metrics;
  std::uint64_t budget = 5000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double target_fraction = 0.9;
  std::string output_dir = "out";
  bool record_wall_clock = false;

  // Source text, kept so checkpoints can rebuild the run.
  std::string source;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Throws ConfigError listing every violated constraint.
void validate(const ExperimentConfig& config);

// Canonical text of the settings that define the task (grid, range, env,
// metrics, budget); equal fingerprints mean two configs are comparable.
std::string environment_fingerprint(const ExperimentConfig& config);

}  // namespace hacl
