#pragma once

// Bin schedulers: the history-aware greedy meta-policy and the baselines
// (UCB, Thompson sampling, uniform, fixed grid sweep) behind one front.

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "hacl/checkpoint.hpp"
#include "hacl/command_space.hpp"
#include "hacl/predictor.hpp"
#include "hacl/rng.hpp"

namespace hacl {

enum class SchedulerKind { kHaGreedy, kUcb, kThompson, kUniform, kFixedGrid };

std::string_view to_string(SchedulerKind kind);
SchedulerKind parse_scheduler_kind(std::string_view s);

struct UtilityParams {
  double alpha = 0.5;
  double kappa = 0.2;
  double epsilon = 1e-3;

  void validate() const;
};

// Per-bin weights, each in [0, 1].
struct BinWeights {
  std::vector<double> w;
};

// Probability vector over all bins, zero outside the active set.
struct MetaPolicy {
  std::vector<double> p;
};

struct BanditState {
  std::vector<std::uint64_t> counts;
  std::vector<double> means;
  std::vector<double> alpha;  // Beta posterior, starts at 1
  std::vector<double> beta;
  std::uint64_t total = 0;

  static BanditState fresh(std::size_t num_bins);
};

inline constexpr double kUnvisitedBonus = std::numeric_limits<double>::infinity();

double utility(const Prediction& pred, double alpha);

BinWeights initial_weights(std::size_t num_bins, double w0 = 0.5);

BinWeights ha_greedy_update(BinWeights weights, BinId bin, double u, double kappa);

// Throws ArgumentError on an empty active set or non-positive epsilon.
MetaPolicy normalize(const BinWeights& weights, std::span<const BinId> active, double epsilon);

BinId sample_bin(const MetaPolicy& policy, Rng& rng);

double ucb_weight(const BanditState& state, BinId bin);

double thompson_weight(const BanditState& state, BinId bin, Rng& rng);

// Count, running mean and Beta bookkeeping: alpha += 1 when reward >= threshold,
// else beta += 1. Throws ArgumentError when reward is outside [0, 1].
BanditState update_bandit(BanditState state, BinId bin, double reward, double threshold = 0.5);

struct SamplerConfig {
  SchedulerKind kind = SchedulerKind::kHaGreedy;
  UtilityParams utility;
  double initial_weight = 0.5;
  double thompson_threshold = 0.5;
};

// Mutable per-run scheduler state.
class Scheduler {
 public:
  Scheduler(const SamplerConfig& config, std::size_t num_bins);

  SchedulerKind kind() const { return config_.kind; }
  const SamplerConfig& config() const { return config_; }

  // Chooses the next bin from `active` (non-empty, sorted ascending).
  BinId select(std::span<const BinId> active, Rng& rng);

  // Feedback after an episode: `u` is the utility of the model's prediction
  // for `bin` after training on the episode, `observed` the utility of the
  // observed rewards, clamped to [0, 1].
  void record(BinId bin, double u, double observed);

  // Meta-policy the ha_greedy scheduler would sample from.
  MetaPolicy policy(std::span<const BinId> active) const;

  const BinWeights& weights() const { return weights_; }
  const BanditState& bandit() const { return bandit_; }

  void save(CheckpointWriter& out) const;
  void load(const CheckpointReader& in);

 private:
  SamplerConfig config_;
  BinWeights weights_;
  BanditState bandit_;
  std::uint64_t sweep_cursor_ = 0;
};

}  // namespace hacl
