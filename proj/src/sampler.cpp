#include "hacl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hacl/errors.hpp"
#include "hacl/kernels.hpp"

namespace hacl {

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::kHaGreedy: return "ha_greedy";
    case SchedulerKind::kUcb: return "ucb";
    case SchedulerKind::kThompson: return "thompson";
    case SchedulerKind::kUniform: return "uniform";
    case SchedulerKind::kFixedGrid: return "fixed_grid";
  }
  return "unknown";
}

SchedulerKind parse_scheduler_kind(std::string_view s) {
  for (auto k : {SchedulerKind::kHaGreedy, SchedulerKind::kUcb, SchedulerKind::kThompson,
                 SchedulerKind::kUniform, SchedulerKind::kFixedGrid}) {
    if (to_string(k) == s) return k;
  }
  throw ArgumentError("unknown scheduler kind '" + std::string(s) + "'");
}

void UtilityParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  if (!(kappa > 0.0)) throw ArgumentError("kappa must be positive");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
}

BanditState BanditState::fresh(std::size_t num_bins) {
  BanditState s;
  s.counts.assign(num_bins, 0);
  s.means.assign(num_bins, 0.0);
  s.alpha.assign(num_bins, 1.0);
  s.beta.assign(num_bins, 1.0);
  return s;
}

double utility(const Prediction& pred, double alpha) {
  return alpha * pred.r_hat_lin + (1.0 - alpha) * pred.r_hat_ang;
}

BinWeights initial_weights(std::size_t num_bins, double w0) {
  if (!(w0 >= 0.0 && w0 <= 1.0)) throw ArgumentError("initial weight must lie in [0, 1]");
  return BinWeights{std::vector<double>(num_bins, w0)};
}

BinWeights ha_greedy_update(BinWeights weights, BinId bin, double u, double kappa) {
  if (bin.index >= weights.w.size()) throw AddressError("bin outside weight table");
  if (!(kappa > 0.0)) throw ArgumentError("kappa must be positive");
  double& w = weights.w[bin.index];
  w = std::clamp(w + kappa * u, 0.0, 1.0);
  return weights;
}

MetaPolicy normalize(const BinWeights& weights, std::span<const BinId> active, double epsilon) {
  if (active.empty()) throw ArgumentError("meta-policy over an empty active set");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  std::vector<double> shifted(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i].index >= weights.w.size()) throw AddressError("active bin outside weight table");
    shifted[i] = weights.w[active[i].index] + epsilon;
  }
  const double z = kernels::sum(shifted);
  MetaPolicy policy{std::vector<double>(weights.w.size(), 0.0)};
  for (std::size_t i = 0; i < active.size(); ++i) policy.p[active[i].index] = shifted[i] / z;
  return policy;
}

BinId sample_bin(const MetaPolicy& policy, Rng& rng) {
  const double target = uniform01(rng);
  double acc = 0.0;
  std::size_t last_positive = policy.p.size();
  for (std::size_t b = 0; b < policy.p.size(); ++b) {
    if (policy.p[b] <= 0.0) continue;
    last_positive = b;
    acc += policy.p[b];
    if (target < acc) return BinId{b};
  }
  // Rounding can leave the cumulative sum a hair below one.
  if (last_positive == policy.p.size()) throw ArgumentError("meta-policy has no support");
  return BinId{last_positive};
}

double ucb_weight(const BanditState& state, BinId bin) {
  const std::uint64_t n = state.counts.at(bin.index);
  if (n == 0) return kUnvisitedBonus;
  const double t = static_cast<double>(std::max<std::uint64_t>(state.total, 1));
  return state.means[bin.index] + std::sqrt(2.0 * std::log(t) / static_cast<double>(n));
}

double thompson_weight(const BanditState& state, BinId bin, Rng& rng) {
  return beta(rng, state.alpha.at(bin.index), state.beta.at(bin.index));
}

BanditState update_bandit(BanditState state, BinId bin, double reward, double threshold) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw ArgumentError("bandit reward must lie in [0, 1]");
  }
  if (bin.index >= state.counts.size()) throw AddressError("bin outside bandit table");
  const std::size_t b = bin.index;
  state.counts[b] += 1;
  state.means[b] += (reward - state.means[b]) / static_cast<double>(state.counts[b]);
  state.total += 1;
  if (reward >= threshold) {
    state.alpha[b] += 1.0;
  } else {
    state.beta[b] += 1.0;
  }
  return state;
}

// --- Scheduler -------------------------------------------------------------------

Scheduler::Scheduler(const SamplerConfig& config, std::size_t num_bins)
    : config_(config),
      weights_(initial_weights(num_bins, config.initial_weight)),
      bandit_(BanditState::fresh(num_bins)) {
  config_.utility.validate();
}

MetaPolicy Scheduler::policy(std::span<const BinId> active) const {
  return normalize(weights_, active, config_.utility.epsilon);
}

BinId Scheduler::select(std::span<const BinId> active, Rng& rng) {
  if (active.empty()) throw ArgumentError("select over an empty active set");
  switch (config_.kind) {
    case SchedulerKind::kHaGreedy:
      return sample_bin(policy(active), rng);
    case SchedulerKind::kUcb: {
      BinId best = active.front();
      double best_w = -kUnvisitedBonus;
      for (BinId b : active) {
        const double w = ucb_weight(bandit_, b);
        if (w > best_w) {
          best_w = w;
          best = b;
        }
      }
      return best;
    }
    case SchedulerKind::kThompson: {
      BinId best = active.front();
      double best_w = -1.0;
      for (BinId b : active) {
        const double w = thompson_weight(bandit_, b, rng);
        if (w > best_w) {
          best_w = w;
          best = b;
        }
      }
      return best;
    }
    case SchedulerKind::kUniform: {
      const auto i = std::uniform_int_distribution<std::size_t>(0, active.size() - 1)(rng);
      return active[i];
    }
    case SchedulerKind::kFixedGrid:
      return active[sweep_cursor_++ % active.size()];
  }
  throw ArgumentError("unhandled scheduler kind");
}

void Scheduler::record(BinId bin, double u, double observed) {
  if (config_.kind == SchedulerKind::kHaGreedy) {
    weights_ = ha_greedy_update(std::move(weights_), bin, u, config_.utility.kappa);
  }
  const double r = std::clamp(observed, 0.0, 1.0);
  bandit_ = update_bandit(std::move(bandit_), bin, r, config_.thompson_threshold);
}

void Scheduler::save(CheckpointWriter& out) const {
  const std::size_t n = weights_.w.size();
  out.put_tensor("sampler.weights", n, 1, weights_.w);
  std::vector<double> counts(bandit_.counts.begin(), bandit_.counts.end());
  out.put_tensor("sampler.counts", n, 1, counts);
  out.put_tensor("sampler.means", n, 1, bandit_.means);
  out.put_tensor("sampler.alpha", n, 1, bandit_.alpha);
  out.put_tensor("sampler.beta", n, 1, bandit_.beta);
  out.put_u64("sampler.total", bandit_.total);
  out.put_u64("sampler.sweep_cursor", sweep_cursor_);
}

void Scheduler::load(const CheckpointReader& in) {
  const std::size_t n = weights_.w.size();
  BinWeights w{in.get_tensor("sampler.weights", n, 1)};
  BanditState b;
  for (double c : in.get_tensor("sampler.counts", n, 1)) {
    b.counts.push_back(static_cast<std::uint64_t>(c));
  }
  b.means = in.get_tensor("sampler.means", n, 1);
  b.alpha = in.get_tensor("sampler.alpha", n, 1);
  b.beta = in.get_tensor("sampler.beta", n, 1);
  b.total = in.get_u64("sampler.total");
  const std::uint64_t cursor = in.get_u64("sampler.sweep_cursor");
  weights_ = std::move(w);
  bandit_ = std::move(b);
  sweep_cursor_ = cursor;
}

}  // namespace hacl
