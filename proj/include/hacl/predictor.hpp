#pragma once

// Reward predictors over command bins.
//
// The recurrent predictor keeps a hidden state summarizing the sequence of
// (bin, observed reward) pairs:
//
//   h_t     = tanh(recur h_{t-1} + input_proj e(b_t) + reward_in r_t + hidden_bias)
//   mu(b)   = head_hidden h_{t-1} + head_embed e(b) + head_bias
//
// where e(b) is row b of the bin embedding table. input_proj * e(b) equals
// W_x * one_hot(b) with W_x = input_proj * bin_embedding^T, so the lookup is an
// exact reparameterization of a dense one-hot input layer.
//
// The feedforward predictor is the history-free ablation: a two-layer tanh
// network on e(b) alone.
//
// Both are trained on a sliding window of observations by minimizing the mean
// squared error between observed and predicted reward pairs.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hacl/command_space.hpp"
#include "hacl/rng.hpp"

namespace hacl {

struct RewardObservation {
  double r_lin = 0.0;
  double r_ang = 0.0;
};

struct Prediction {
  double r_hat_lin = 0.0;
  double r_hat_ang = 0.0;
};

struct HiddenState {
  std::vector<double> h;

  static HiddenState zeros(std::size_t hidden_size) { return {std::vector<double>(hidden_size, 0.0)}; }
};

struct HistoryEntry {
  BinId bin;
  RewardObservation reward;
};

using HistoryWindow = std::span<const HistoryEntry>;

// Row-major view of one parameter tensor.
struct TensorView {
  std::string_view name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<double> data;
};

struct ConstTensorView {
  std::string_view name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const double> data;
};

struct RecurrentPredictorParams {
  std::size_t num_bins = 0;
  std::size_t hidden_size = 0;
  std::size_t embed_size = 0;

  std::vector<double> bin_embedding;  // num_bins x embed_size
  std::vector<double> input_proj;     // hidden x embed
  std::vector<double> reward_in;      // hidden x 2
  std::vector<double> recur;          // hidden x hidden
  std::vector<double> hidden_bias;    // hidden
  std::vector<double> head_hidden;    // 2 x hidden
  std::vector<double> head_embed;     // 2 x embed
  std::vector<double> head_bias;      // 2

  static RecurrentPredictorParams zeros(std::size_t num_bins, std::size_t hidden, std::size_t embed);
  static RecurrentPredictorParams random(std::size_t num_bins, std::size_t hidden,
                                         std::size_t embed, Rng& rng);

  std::span<const double> embedding(BinId bin) const;
  std::vector<TensorView> tensors();
  std::vector<ConstTensorView> tensors() const;
  // Throws NumericError on any non-finite entry.
  void check_finite() const;
};

struct FeedforwardParams {
  std::size_t num_bins = 0;
  std::size_t hidden_size = 0;
  std::size_t embed_size = 0;

  std::vector<double> bin_embedding;  // num_bins x embed
  std::vector<double> w1;             // hidden x embed
  std::vector<double> b1;             // hidden
  std::vector<double> w2;             // 2 x hidden
  std::vector<double> b2;             // 2

  static FeedforwardParams zeros(std::size_t num_bins, std::size_t hidden, std::size_t embed);
  static FeedforwardParams random(std::size_t num_bins, std::size_t hidden, std::size_t embed,
                                  Rng& rng);

  std::span<const double> embedding(BinId bin) const;
  std::vector<TensorView> tensors();
  std::vector<ConstTensorView> tensors() const;
  void check_finite() const;
};

struct TrainResult {
  double loss_before = 0.0;
  double grad_norm = 0.0;  // before clipping
  bool clipped = false;
  HiddenState h_end;       // hidden state after the window, under the pre-update parameters
};

// --- recurrent ---------------------------------------------------------------

HiddenState step(const RecurrentPredictorParams& params, const HiddenState& h_prev, BinId bin,
                 const RewardObservation& reward);

Prediction predict(const RecurrentPredictorParams& params, const HiddenState& h_prev, BinId bin);

// Predictions for every bin, indexed by BinId.
std::vector<Prediction> predict_all(const RecurrentPredictorParams& params,
                                    const HiddenState& h_prev);

// Mean over the window of ||r_t - mu(b_t)||^2 with h evolving by step().
// Throws ArgumentError on an empty window.
double loss(const RecurrentPredictorParams& params, HistoryWindow window, const HiddenState& h0);

// Accumulates dL/dparams into `grad`, which must have the same shapes and be
// zero on entry. Returns the loss; `h_end` receives the final hidden state.
double loss_and_gradient(const RecurrentPredictorParams& params, HistoryWindow window,
                         const HiddenState& h0, RecurrentPredictorParams& grad,
                         HiddenState* h_end = nullptr);

// One gradient-descent step over the window with global-norm clipping.
TrainResult train_step(RecurrentPredictorParams& params, HistoryWindow window,
                       const HiddenState& h0, double learning_rate, double clip_norm);

// --- feedforward -------------------------------------------------------------

Prediction ff_predict(const FeedforwardParams& params, BinId bin);

std::vector<Prediction> ff_predict_all(const FeedforwardParams& params);

double ff_loss(const FeedforwardParams& params, HistoryWindow window);

double ff_loss_and_gradient(const FeedforwardParams& params, HistoryWindow window,
                            FeedforwardParams& grad);

TrainResult ff_train_step(FeedforwardParams& params, HistoryWindow window, double learning_rate,
                          double clip_norm);

}  // namespace hacl
