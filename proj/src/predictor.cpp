#include "hacl/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hacl/errors.hpp"
#include "hacl/kernels.hpp"

namespace hacl {
namespace {

namespace k = kernels;

void fill_uniform(std::vector<double>& v, double scale, Rng& rng) {
  for (double& x : v) x = uniform(rng, -scale, scale);
}

void check_bin(BinId bin, std::size_t num_bins) {
  if (bin.index >= num_bins) {
    throw AddressError("bin index " + std::to_string(bin.index) + " outside predictor table of " +
                       std::to_string(num_bins));
  }
}

void check_tensors_finite(const std::vector<ConstTensorView>& tensors) {
  for (const auto& t : tensors) {
    for (double x : t.data) {
      if (!std::isfinite(x)) {
        throw NumericError("non-finite value in predictor tensor " + std::string(t.name));
      }
    }
  }
}

std::span<double> row(std::vector<double>& m, std::size_t r, std::size_t cols) {
  return std::span<double>(m).subspan(r * cols, cols);
}

std::span<const double> row(const std::vector<double>& m, std::size_t r, std::size_t cols) {
  return std::span<const double>(m).subspan(r * cols, cols);
}

std::vector<std::size_t> unique_bins(HistoryWindow window) {
  std::vector<std::size_t> bins;
  bins.reserve(window.size());
  for (const auto& e : window) bins.push_back(e.bin.index);
  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  return bins;
}

// Clipped descent over dense tensors, except the embedding table where only
// the rows in `rows` carry gradient. Zeroes the consumed gradient entries.
template <class Params>
void apply_descent(Params& params, Params& grad, const std::vector<std::size_t>& rows,
                   double learning_rate, double clip_norm, TrainResult& result) {
  auto p_tensors = params.tensors();
  auto g_tensors = grad.tensors();
  const std::size_t embed = params.embed_size;

  double sq = 0.0;
  for (std::size_t i = 0; i < g_tensors.size(); ++i) {
    if (g_tensors[i].name == "bin_embedding") {
      for (std::size_t r : rows) sq += k::sum_squares(row(grad.bin_embedding, r, embed));
    } else {
      sq += k::sum_squares(g_tensors[i].data);
    }
  }
  result.grad_norm = std::sqrt(sq);
  if (!std::isfinite(result.grad_norm)) throw NumericError("non-finite gradient");

  double scale = 1.0;
  if (clip_norm > 0.0 && result.grad_norm > clip_norm) {
    scale = clip_norm / result.grad_norm;
    result.clipped = true;
  }
  const double a = -learning_rate * scale;
  for (std::size_t i = 0; i < g_tensors.size(); ++i) {
    if (g_tensors[i].name == "bin_embedding") {
      for (std::size_t r : rows) {
        auto g = row(grad.bin_embedding, r, embed);
        k::axpy(a, g, row(params.bin_embedding, r, embed));
        std::fill(g.begin(), g.end(), 0.0);
      }
    } else {
      k::axpy(a, g_tensors[i].data, p_tensors[i].data);
      std::fill(g_tensors[i].data.begin(), g_tensors[i].data.end(), 0.0);
    }
  }
}

// Per-thread zeroed gradient buffer matching the parameter shapes.
template <class Params>
Params& gradient_workspace(const Params& params) {
  thread_local Params ws;
  if (ws.num_bins != params.num_bins || ws.hidden_size != params.hidden_size ||
      ws.embed_size != params.embed_size) {
    ws = Params::zeros(params.num_bins, params.hidden_size, params.embed_size);
  }
  return ws;
}

}  // namespace

// --- parameter containers ------------------------------------------------------

RecurrentPredictorParams RecurrentPredictorParams::zeros(std::size_t num_bins, std::size_t hidden,
                                                         std::size_t embed) {
  if (num_bins == 0 || hidden == 0 || embed == 0) {
    throw ArgumentError("predictor sizes must be positive");
  }
  RecurrentPredictorParams p;
  p.num_bins = num_bins;
  p.hidden_size = hidden;
  p.embed_size = embed;
  p.bin_embedding.assign(num_bins * embed, 0.0);
  p.input_proj.assign(hidden * embed, 0.0);
  p.reward_in.assign(hidden * 2, 0.0);
  p.recur.assign(hidden * hidden, 0.0);
  p.hidden_bias.assign(hidden, 0.0);
  p.head_hidden.assign(2 * hidden, 0.0);
  p.head_embed.assign(2 * embed, 0.0);
  p.head_bias.assign(2, 0.0);
  return p;
}

RecurrentPredictorParams RecurrentPredictorParams::random(std::size_t num_bins, std::size_t hidden,
                                                          std::size_t embed, Rng& rng) {
  RecurrentPredictorParams p = zeros(num_bins, hidden, embed);
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(hidden + embed + 2));
  const double head_scale = 1.0 / std::sqrt(static_cast<double>(hidden + embed));
  fill_uniform(p.bin_embedding, 0.5, rng);
  fill_uniform(p.input_proj, in_scale, rng);
  fill_uniform(p.reward_in, in_scale, rng);
  fill_uniform(p.recur, in_scale, rng);
  fill_uniform(p.head_hidden, head_scale, rng);
  fill_uniform(p.head_embed, head_scale, rng);
  return p;
}

std::span<const double> RecurrentPredictorParams::embedding(BinId bin) const {
  check_bin(bin, num_bins);
  return row(bin_embedding, bin.index, embed_size);
}

std::vector<TensorView> RecurrentPredictorParams::tensors() {
  return {
      {"bin_embedding", num_bins, embed_size, bin_embedding},
      {"input_proj", hidden_size, embed_size, input_proj},
      {"reward_in", hidden_size, 2, reward_in},
      {"recur", hidden_size, hidden_size, recur},
      {"hidden_bias", hidden_size, 1, hidden_bias},
      {"head_hidden", 2, hidden_size, head_hidden},
      {"head_embed", 2, embed_size, head_embed},
      {"head_bias", 2, 1, head_bias},
  };
}

std::vector<ConstTensorView> RecurrentPredictorParams::tensors() const {
  std::vector<ConstTensorView> out;
  for (const auto& t : const_cast<RecurrentPredictorParams*>(this)->tensors()) {
    out.push_back({t.name, t.rows, t.cols, t.data});
  }
  return out;
}

void RecurrentPredictorParams::check_finite() const { check_tensors_finite(tensors()); }

FeedforwardParams FeedforwardParams::zeros(std::size_t num_bins, std::size_t hidden,
                                           std::size_t embed) {
  if (num_bins == 0 || hidden == 0 || embed == 0) {
    throw ArgumentError("predictor sizes must be positive");
  }
  FeedforwardParams p;
  p.num_bins = num_bins;
  p.hidden_size = hidden;
  p.embed_size = embed;
  p.bin_embedding.assign(num_bins * embed, 0.0);
  p.w1.assign(hidden * embed, 0.0);
  p.b1.assign(hidden, 0.0);
  p.w2.assign(2 * hidden, 0.0);
  p.b2.assign(2, 0.0);
  return p;
}

FeedforwardParams FeedforwardParams::random(std::size_t num_bins, std::size_t hidden,
                                            std::size_t embed, Rng& rng) {
  FeedforwardParams p = zeros(num_bins, hidden, embed);
  fill_uniform(p.bin_embedding, 0.5, rng);
  fill_uniform(p.w1, 1.0 / std::sqrt(static_cast<double>(embed)), rng);
  fill_uniform(p.w2, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  return p;
}

std::span<const double> FeedforwardParams::embedding(BinId bin) const {
  check_bin(bin, num_bins);
  return row(bin_embedding, bin.index, embed_size);
}

std::vector<TensorView> FeedforwardParams::tensors() {
  return {
      {"bin_embedding", num_bins, embed_size, bin_embedding},
      {"w1", hidden_size, embed_size, w1},
      {"b1", hidden_size, 1, b1},
      {"w2", 2, hidden_size, w2},
      {"b2", 2, 1, b2},
  };
}

std::vector<ConstTensorView> FeedforwardParams::tensors() const {
  std::vector<ConstTensorView> out;
  for (const auto& t : const_cast<FeedforwardParams*>(this)->tensors()) {
    out.push_back({t.name, t.rows, t.cols, t.data});
  }
  return out;
}

void FeedforwardParams::check_finite() const { check_tensors_finite(tensors()); }

// --- recurrent -------------------------------------------------------------------

HiddenState step(const RecurrentPredictorParams& params, const HiddenState& h_prev, BinId bin,
                 const RewardObservation& reward) {
  const std::size_t H = params.hidden_size;
  const std::size_t D = params.embed_size;
  if (h_prev.h.size() != H) throw ArgumentError("hidden state size mismatch");
  const auto e = params.embedding(bin);

  HiddenState next{std::vector<double>(H)};
  std::vector<double> proj(H);
  k::gemv(params.recur, H, H, h_prev.h, next.h);
  k::gemv(params.input_proj, H, D, e, proj);
  for (std::size_t i = 0; i < H; ++i) {
    const double a = next.h[i] + proj[i] + params.reward_in[2 * i] * reward.r_lin +
                     params.reward_in[2 * i + 1] * reward.r_ang + params.hidden_bias[i];
    if (!std::isfinite(a)) throw NumericError("non-finite pre-activation in recurrent step");
    next.h[i] = std::tanh(a);
  }
  return next;
}

Prediction predict(const RecurrentPredictorParams& params, const HiddenState& h_prev, BinId bin) {
  const std::size_t H = params.hidden_size;
  const std::size_t D = params.embed_size;
  if (h_prev.h.size() != H) throw ArgumentError("hidden state size mismatch");
  const auto e = params.embedding(bin);
  Prediction p;
  p.r_hat_lin = k::dot(row(params.head_hidden, 0, H), h_prev.h) +
                k::dot(row(params.head_embed, 0, D), e) + params.head_bias[0];
  p.r_hat_ang = k::dot(row(params.head_hidden, 1, H), h_prev.h) +
                k::dot(row(params.head_embed, 1, D), e) + params.head_bias[1];
  if (!std::isfinite(p.r_hat_lin) || !std::isfinite(p.r_hat_ang)) {
    throw NumericError("non-finite prediction");
  }
  return p;
}

std::vector<Prediction> predict_all(const RecurrentPredictorParams& params,
                                    const HiddenState& h_prev) {
  const std::size_t N = params.num_bins;
  const std::size_t H = params.hidden_size;
  const std::size_t D = params.embed_size;
  if (h_prev.h.size() != H) throw ArgumentError("hidden state size mismatch");
  const double base_lin = k::dot(row(params.head_hidden, 0, H), h_prev.h) + params.head_bias[0];
  const double base_ang = k::dot(row(params.head_hidden, 1, H), h_prev.h) + params.head_bias[1];
  std::vector<double> lin(N), ang(N);
  k::dot_rows(params.bin_embedding, N, D, row(params.head_embed, 0, D), lin);
  k::dot_rows(params.bin_embedding, N, D, row(params.head_embed, 1, D), ang);
  std::vector<Prediction> out(N);
  for (std::size_t b = 0; b < N; ++b) out[b] = {base_lin + lin[b], base_ang + ang[b]};
  return out;
}

double loss(const RecurrentPredictorParams& params, HistoryWindow window, const HiddenState& h0) {
  if (window.empty()) throw ArgumentError("loss over an empty window");
  HiddenState h = h0;
  double total = 0.0;
  for (const auto& obs : window) {
    const Prediction p = predict(params, h, obs.bin);
    const double dl = obs.reward.r_lin - p.r_hat_lin;
    const double da = obs.reward.r_ang - p.r_hat_ang;
    total += dl * dl + da * da;
    h = step(params, h, obs.bin, obs.reward);
  }
  return total / static_cast<double>(window.size());
}

double loss_and_gradient(const RecurrentPredictorParams& params, HistoryWindow window,
                         const HiddenState& h0, RecurrentPredictorParams& grad,
                         HiddenState* h_end) {
  if (window.empty()) throw ArgumentError("loss over an empty window");
  const std::size_t T = window.size();
  const std::size_t H = params.hidden_size;
  const std::size_t D = params.embed_size;

  // hs[t] is h_t; hs[0] = h0.
  std::vector<HiddenState> hs;
  hs.reserve(T + 1);
  hs.push_back(h0);
  std::vector<Prediction> preds(T);
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& obs = window[t];
    preds[t] = predict(params, hs[t], obs.bin);
    const double dl = preds[t].r_hat_lin - obs.reward.r_lin;
    const double da = preds[t].r_hat_ang - obs.reward.r_ang;
    total += dl * dl + da * da;
    hs.push_back(step(params, hs[t], obs.bin, obs.reward));
  }
  if (h_end != nullptr) *h_end = hs[T];

  const double inv_t = 1.0 / static_cast<double>(T);
  std::vector<double> dh(H, 0.0);  // dL/dh_t flowing back from later steps
  std::vector<double> da(H), dh_prev(H);
  for (std::size_t t = T; t-- > 0;) {
    const auto& obs = window[t];
    const auto& h_prev = hs[t].h;
    const auto& h_cur = hs[t + 1].h;
    const auto e = params.embedding(obs.bin);
    auto de = row(grad.bin_embedding, obs.bin.index, D);
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);

    // Through h_{t+1} = tanh(a).
    for (std::size_t i = 0; i < H; ++i) da[i] = dh[i] * (1.0 - h_cur[i] * h_cur[i]);
    k::rank1(grad.recur, H, H, da, h_prev);
    k::rank1(grad.input_proj, H, D, da, e);
    for (std::size_t i = 0; i < H; ++i) {
      grad.reward_in[2 * i] += da[i] * obs.reward.r_lin;
      grad.reward_in[2 * i + 1] += da[i] * obs.reward.r_ang;
      grad.hidden_bias[i] += da[i];
    }
    k::gemv_t_acc(params.recur, H, H, da, dh_prev);
    k::gemv_t_acc(params.input_proj, H, D, da, de);

    // Through the prediction made from h_t.
    const double dp[2] = {2.0 * inv_t * (preds[t].r_hat_lin - obs.reward.r_lin),
                          2.0 * inv_t * (preds[t].r_hat_ang - obs.reward.r_ang)};
    k::rank1(grad.head_hidden, 2, H, dp, h_prev);
    k::rank1(grad.head_embed, 2, D, dp, e);
    grad.head_bias[0] += dp[0];
    grad.head_bias[1] += dp[1];
    k::gemv_t_acc(params.head_hidden, 2, H, dp, dh_prev);
    k::gemv_t_acc(params.head_embed, 2, D, dp, de);

    dh.swap(dh_prev);
  }
  return total * inv_t;
}

TrainResult train_step(RecurrentPredictorParams& params, HistoryWindow window,
                       const HiddenState& h0, double learning_rate, double clip_norm) {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
  auto& grad = gradient_workspace(params);
  TrainResult result;
  try {
    result.loss_before = loss_and_gradient(params, window, h0, grad, &result.h_end);
    apply_descent(params, grad, unique_bins(window), learning_rate, clip_norm, result);
  } catch (...) {
    grad.num_bins = 0;  // partially filled; rebuilt zeroed on next use
    throw;
  }
  return result;
}

// --- feedforward -------------------------------------------------------------------

namespace {

struct FfForward {
  std::vector<double> z;
  Prediction out;
};

FfForward ff_forward(const FeedforwardParams& params, BinId bin) {
  const std::size_t H = params.hidden_size;
  const std::size_t D = params.embed_size;
  const auto e = params.embedding(bin);
  FfForward f;
  f.z.resize(H);
  k::gemv(params.w1, H, D, e, f.z);
  for (std::size_t i = 0; i < H; ++i) f.z[i] = std::tanh(f.z[i] + params.b1[i]);
  f.out.r_hat_lin = k::dot(row(params.w2, 0, H), f.z) + params.b2[0];
  f.out.r_hat_ang = k::dot(row(params.w2, 1, H), f.z) + params.b2[1];
  if (!std::isfinite(f.out.r_hat_lin) || !std::isfinite(f.out.r_hat_ang)) {
    throw NumericError("non-finite prediction");
  }
  return f;
}

}  // namespace

Prediction ff_predict(const FeedforwardParams& params, BinId bin) {
  return ff_forward(params, bin).out;
}

std::vector<Prediction> ff_predict_all(const FeedforwardParams& params) {
  std::vector<Prediction> out(params.num_bins);
  for (std::size_t b = 0; b < params.num_bins; ++b) out[b] = ff_predict(params, BinId{b});
  return out;
}

double ff_loss(const FeedforwardParams& params, HistoryWindow window) {
  if (window.empty()) throw ArgumentError("loss over an empty window");
  double total = 0.0;
  for (const auto& obs : window) {
    const Prediction p = ff_predict(params, obs.bin);
    const double dl = obs.reward.r_lin - p.r_hat_lin;
    const double da = obs.reward.r_ang - p.r_hat_ang;
    total += dl * dl + da * da;
  }
  return total / static_cast<double>(window.size());
}

double ff_loss_and_gradient(const FeedforwardParams& params, HistoryWindow window,
                            FeedforwardParams& grad) {
  if (window.empty()) throw ArgumentError("loss over an empty window");
  const std::size_t H = params.hidden_size;
  const std::size_t D = params.embed_size;
  const double inv_t = 1.0 / static_cast<double>(window.size());
  std::vector<double> dz(H);
  double total = 0.0;
  for (const auto& obs : window) {
    const FfForward f = ff_forward(params, obs.bin);
    const double el = f.out.r_hat_lin - obs.reward.r_lin;
    const double ea = f.out.r_hat_ang - obs.reward.r_ang;
    total += el * el + ea * ea;
    const double dp[2] = {2.0 * inv_t * el, 2.0 * inv_t * ea};
    k::rank1(grad.w2, 2, H, dp, f.z);
    grad.b2[0] += dp[0];
    grad.b2[1] += dp[1];
    std::fill(dz.begin(), dz.end(), 0.0);
    k::gemv_t_acc(params.w2, 2, H, dp, dz);
    for (std::size_t i = 0; i < H; ++i) dz[i] *= 1.0 - f.z[i] * f.z[i];
    k::rank1(grad.w1, H, D, dz, params.embedding(obs.bin));
    k::axpy(1.0, dz, grad.b1);
    k::gemv_t_acc(params.w1, H, D, dz, row(grad.bin_embedding, obs.bin.index, D));
  }
  return total * inv_t;
}

TrainResult ff_train_step(FeedforwardParams& params, HistoryWindow window, double learning_rate,
                          double clip_norm) {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
  auto& grad = gradient_workspace(params);
  TrainResult result;
  try {
    result.loss_before = ff_loss_and_gradient(params, window, grad);
    apply_descent(params, grad, unique_bins(window), learning_rate, clip_norm, result);
  } catch (...) {
    grad.num_bins = 0;  // partially filled; rebuilt zeroed on next use
    throw;
  }
  return result;
}

}  // namespace hacl
