#pragma once

// Experiment loop. Each episode runs, in this fixed order:
//
//   select bin -> sample command -> environment episode -> predictor update
//   -> weight update -> (every success_window episodes) range expansion
//
// Reordering these steps changes every recorded trajectory. A run is a pure
// function of (config, seed): all randomness comes from per-component
// substreams derived from the seed.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hacl/config.hpp"
#include "hacl/metrics.hpp"
#include "hacl/proxy_env.hpp"
#include "hacl/reward_model.hpp"
#include "hacl/rng.hpp"
#include "hacl/sampler.hpp"

namespace hacl {

struct RunRecord {
  std::uint64_t episode = 0;
  BinId bin;
  Command command;
  RewardObservation reward;      // normalized observation fed to the predictor
  Prediction prediction;         // model prediction for the bin before the episode
  double utility = 0.0;          // utility of the post-training prediction for the bin
  double observed_utility = 0.0;
  double weight = 0.0;           // bin weight after the update
  Vec3 v_max{};
  double v_cap = 0.0;
  double omega_cap = 0.0;
  bool success = false;
  double regret = 0.0;           // increment for this episode
  double loss = 0.0;
  bool clipped = false;
  std::optional<double> wall_ms;

  std::string to_json() const;
};

// Online [0, 1] scaling of reward components by their running maxima.
struct RewardNormalizer {
  double floor = 1.0;
  double max_lin = 0.0;
  double max_ang = 0.0;

  RewardObservation apply(const RewardObservation& raw);
};

class Experiment {
 public:
  Experiment(ExperimentConfig config, std::uint64_t seed);

  // Restores a run from a checkpoint. The config embedded in the checkpoint is
  // used unless `config` is given.
  static Experiment resume(const std::filesystem::path& checkpoint,
                           std::optional<ExperimentConfig> config = std::nullopt);

  bool done() const { return episode_ >= config_.budget; }
  std::uint64_t episode() const { return episode_; }
  RunRecord step();
  RunSummary summary() const;

  void save_checkpoint(const std::filesystem::path& path) const;
  std::string checkpoint_text() const;
  void load_checkpoint(const CheckpointReader& in);

  const ExperimentConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const ActiveRange& range() const { return range_; }
  const std::vector<BinId>& active_bins() const { return active_; }
  const Scheduler& scheduler() const { return scheduler_; }
  const Environment& environment() const { return *env_; }
  const RewardModel& model() const { return *model_; }

 private:
  CheckpointWriter checkpoint_writer() const;

  ExperimentConfig config_;
  std::uint64_t seed_;
  Rng sampler_rng_;
  Rng command_rng_;
  Rng env_rng_;
  Scheduler scheduler_;
  std::unique_ptr<RewardModel> model_;
  std::unique_ptr<Environment> env_;
  RewardNormalizer normalizer_;
  ActiveRange range_;
  std::vector<BinId> active_;

  std::uint64_t episode_ = 0;
  std::vector<double> success_window_;
  std::optional<std::uint64_t> episodes_to_target_;
  double cumulative_regret_ = 0.0;
  double cot_sum_ = 0.0;
  std::uint64_t cot_count_ = 0;
  double stability_sum_ = 0.0;
  std::uint64_t stability_count_ = 0;
  std::uint64_t successes_ = 0;
};

// Config stored in a checkpoint, with the budget the run was started under.
ExperimentConfig checkpoint_config(const CheckpointReader& in);

struct RunOptions {
  std::ostream* records = nullptr;  // JSONL sink, one row per episode
  std::uint64_t checkpoint_every = 0;
  std::filesystem::path checkpoint_path;
};

// Thrown when a run aborts on a numeric failure; carries the episode index.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(std::uint64_t episode, const std::string& what);
  std::uint64_t episode() const { return episode_; }

 private:
  std::uint64_t episode_;
};

RunSummary run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                          const RunOptions& options = {});

// Continues `experiment` to its budget with the same options semantics.
RunSummary continue_experiment(Experiment& experiment, const RunOptions& options = {});

std::string summary_csv_header();
std::string summary_csv_row(const RunSummary& s);
RunSummary parse_summary_csv_row(const std::string& line);

}  // namespace hacl
