#include "hacl/reward_model.hpp"

#include <string>

#include "hacl/errors.hpp"

namespace hacl {
namespace {

template <class Params>
void save_params(CheckpointWriter& out, const Params& params, std::string_view prefix) {
  out.put_u64(std::string(prefix) + ".num_bins", params.num_bins);
  out.put_u64(std::string(prefix) + ".hidden_size", params.hidden_size);
  out.put_u64(std::string(prefix) + ".embed_size", params.embed_size);
  for (const auto& t : params.tensors()) {
    out.put_tensor(std::string(prefix) + "." + std::string(t.name), t.rows, t.cols, t.data);
  }
}

template <class Params>
Params load_params(const CheckpointReader& in, const Params& like, std::string_view prefix) {
  const std::string p(prefix);
  if (in.get_u64(p + ".num_bins") != like.num_bins ||
      in.get_u64(p + ".hidden_size") != like.hidden_size ||
      in.get_u64(p + ".embed_size") != like.embed_size) {
    throw CheckpointShapeError("predictor sizes in checkpoint differ from the configured model");
  }
  Params out = like;
  for (auto& t : out.tensors()) {
    const auto values = in.get_tensor(p + "." + std::string(t.name), t.rows, t.cols);
    std::copy(values.begin(), values.end(), t.data.begin());
  }
  return out;
}

void save_window(CheckpointWriter& out, const std::deque<HistoryEntry>& window) {
  std::vector<double> flat;
  flat.reserve(window.size() * 3);
  for (const auto& e : window) {
    flat.push_back(static_cast<double>(e.bin.index));
    flat.push_back(e.reward.r_lin);
    flat.push_back(e.reward.r_ang);
  }
  out.put_tensor("predictor.window", window.size(), 3, flat);
}

std::deque<HistoryEntry> load_window(const CheckpointReader& in, std::size_t max_len,
                                     std::size_t num_bins) {
  const std::size_t n = in.get_u64("predictor.window_len");
  if (n > max_len) throw CheckpointShapeError("history window longer than configured truncation");
  const auto flat = in.get_tensor("predictor.window", n, 3);
  std::deque<HistoryEntry> window;
  for (std::size_t i = 0; i < n; ++i) {
    const auto bin = static_cast<std::size_t>(flat[3 * i]);
    if (bin >= num_bins) throw CheckpointShapeError("history window references an unknown bin");
    window.push_back({BinId{bin}, {flat[3 * i + 1], flat[3 * i + 2]}});
  }
  return window;
}

HiddenState load_hidden(const CheckpointReader& in, std::string_view key, std::size_t size) {
  return HiddenState{in.get_tensor(key, size, 1)};
}

}  // namespace

std::string_view to_string(PredictorKind kind) {
  return kind == PredictorKind::kRecurrent ? "recurrent" : "feedforward";
}

PredictorKind parse_predictor_kind(std::string_view s) {
  if (s == "recurrent") return PredictorKind::kRecurrent;
  if (s == "feedforward") return PredictorKind::kFeedforward;
  throw ArgumentError("unknown predictor kind '" + std::string(s) + "'");
}

std::unique_ptr<RewardModel> make_reward_model(const PredictorConfig& config,
                                               std::size_t num_bins, Rng& init_rng) {
  if (config.kind == PredictorKind::kRecurrent) {
    return std::make_unique<RecurrentRewardModel>(
        config, RecurrentPredictorParams::random(num_bins, config.hidden_size, config.embed_size,
                                                 init_rng));
  }
  return std::make_unique<FeedforwardRewardModel>(
      config,
      FeedforwardParams::random(num_bins, config.hidden_size, config.embed_size, init_rng));
}

// --- recurrent -----------------------------------------------------------------

RecurrentRewardModel::RecurrentRewardModel(const PredictorConfig& config,
                                           RecurrentPredictorParams params)
    : config_(config),
      params_(std::move(params)),
      h_start_(HiddenState::zeros(params_.hidden_size)),
      h_current_(HiddenState::zeros(params_.hidden_size)) {
  if (config_.window == 0) throw ArgumentError("predictor window must be positive");
}

Prediction RecurrentRewardModel::predict(BinId bin) const {
  return hacl::predict(params_, h_current_, bin);
}

std::vector<Prediction> RecurrentRewardModel::predict_all() const {
  return hacl::predict_all(params_, h_current_);
}

TrainResult RecurrentRewardModel::observe(BinId bin, const RewardObservation& reward) {
  window_.push_back({bin, reward});
  if (window_.size() > config_.window) {
    const HistoryEntry& oldest = window_.front();
    h_start_ = step(params_, h_start_, oldest.bin, oldest.reward);
    window_.pop_front();
  }
  const std::vector<HistoryEntry> window(window_.begin(), window_.end());
  TrainResult r =
      train_step(params_, window, h_start_, config_.learning_rate, config_.clip_norm);
  h_current_ = r.h_end;
  return r;
}

void RecurrentRewardModel::save(CheckpointWriter& out) const {
  save_params(out, params_, "predictor");
  out.put_u64("predictor.window_len", window_.size());
  save_window(out, window_);
  out.put_tensor("predictor.h_start", h_start_.h.size(), 1, h_start_.h);
  out.put_tensor("predictor.h_current", h_current_.h.size(), 1, h_current_.h);
}

void RecurrentRewardModel::load(const CheckpointReader& in) {
  auto params = load_params(in, params_, "predictor");
  auto window = load_window(in, config_.window, params_.num_bins);
  auto h_start = load_hidden(in, "predictor.h_start", params_.hidden_size);
  auto h_current = load_hidden(in, "predictor.h_current", params_.hidden_size);
  params_ = std::move(params);
  window_ = std::move(window);
  h_start_ = std::move(h_start);
  h_current_ = std::move(h_current);
}

// --- feedforward ---------------------------------------------------------------

FeedforwardRewardModel::FeedforwardRewardModel(const PredictorConfig& config,
                                               FeedforwardParams params)
    : config_(config), params_(std::move(params)) {
  if (config_.window == 0) throw ArgumentError("predictor window must be positive");
}

Prediction FeedforwardRewardModel::predict(BinId bin) const { return ff_predict(params_, bin); }

std::vector<Prediction> FeedforwardRewardModel::predict_all() const {
  return ff_predict_all(params_);
}

TrainResult FeedforwardRewardModel::observe(BinId bin, const RewardObservation& reward) {
  window_.push_back({bin, reward});
  if (window_.size() > config_.window) window_.pop_front();
  const std::vector<HistoryEntry> window(window_.begin(), window_.end());
  return ff_train_step(params_, window, config_.learning_rate, config_.clip_norm);
}

void FeedforwardRewardModel::save(CheckpointWriter& out) const {
  save_params(out, params_, "predictor");
  out.put_u64("predictor.window_len", window_.size());
  save_window(out, window_);
}

void FeedforwardRewardModel::load(const CheckpointReader& in) {
  auto params = load_params(in, params_, "predictor");
  auto window = load_window(in, config_.window, params_.num_bins);
  params_ = std::move(params);
  window_ = std::move(window);
}

}  // namespace hacl
