#pragma once

// Stateful online reward models used by the experiment loop. A model owns its
// parameters, the sliding history window it trains on and, for the recurrent
// kind, the hidden state carried across episodes of a run.

#include <cstddef>
#include <deque>
#include <memory>
#include <string_view>
#include <vector>

#include "hacl/checkpoint.hpp"
#include "hacl/predictor.hpp"

namespace hacl {

enum class PredictorKind { kRecurrent, kFeedforward };

std::string_view to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view s);

struct PredictorConfig {
  PredictorKind kind = PredictorKind::kRecurrent;
  std::size_t hidden_size = 64;
  std::size_t embed_size = 32;
  std::size_t window = 32;  // truncation length L
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
};

class RewardModel {
 public:
  virtual ~RewardModel() = default;

  virtual PredictorKind kind() const = 0;
  // Prediction for `bin` given everything observed so far.
  virtual Prediction predict(BinId bin) const = 0;
  virtual std::vector<Prediction> predict_all() const = 0;
  // Appends an observation, takes one training step on the window and
  // advances the carried state.
  virtual TrainResult observe(BinId bin, const RewardObservation& reward) = 0;

  virtual void save(CheckpointWriter& out) const = 0;
  virtual void load(const CheckpointReader& in) = 0;
};

std::unique_ptr<RewardModel> make_reward_model(const PredictorConfig& config,
                                               std::size_t num_bins, Rng& init_rng);

class RecurrentRewardModel final : public RewardModel {
 public:
  RecurrentRewardModel(const PredictorConfig& config, RecurrentPredictorParams params);

  PredictorKind kind() const override { return PredictorKind::kRecurrent; }
  Prediction predict(BinId bin) const override;
  std::vector<Prediction> predict_all() const override;
  TrainResult observe(BinId bin, const RewardObservation& reward) override;
  void save(CheckpointWriter& out) const override;
  void load(const CheckpointReader& in) override;

  const RecurrentPredictorParams& params() const { return params_; }
  const HiddenState& hidden() const { return h_current_; }

 private:
  PredictorConfig config_;
  RecurrentPredictorParams params_;
  std::deque<HistoryEntry> window_;
  HiddenState h_start_;    // hidden state before the oldest window entry
  HiddenState h_current_;  // hidden state after the newest window entry
};

class FeedforwardRewardModel final : public RewardModel {
 public:
  FeedforwardRewardModel(const PredictorConfig& config, FeedforwardParams params);

  PredictorKind kind() const override { return PredictorKind::kFeedforward; }
  Prediction predict(BinId bin) const override;
  std::vector<Prediction> predict_all() const override;
  TrainResult observe(BinId bin, const RewardObservation& reward) override;
  void save(CheckpointWriter& out) const override;
  void load(const CheckpointReader& in) override;

  const FeedforwardParams& params() const { return params_; }

 private:
  PredictorConfig config_;
  FeedforwardParams params_;
  std::deque<HistoryEntry> window_;
};

}  // namespace hacl
