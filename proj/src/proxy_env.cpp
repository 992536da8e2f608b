#include "hacl/proxy_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hacl/errors.hpp"

namespace hacl {
namespace {

double tracking_reward(double magnitude, double capability, double sigma) {
  const double e = std::max(0.0, magnitude - capability);
  return std::exp(-(e * e) / (sigma * sigma));
}

double grow(double capability, double magnitude, double margin, double growth, double cap) {
  if (magnitude >= capability - margin && magnitude <= capability + margin) {
    return std::min(capability + growth, cap);
  }
  return capability;
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// E[max(X - c, 0)] for X ~ N(mean, s^2), s > 0.
double expected_excess(double mean, double s, double c) {
  const double z = (mean - c) / s;
  return (mean - c) * Phi(z) + s * phi(z);
}

double reflect01(double x) {
  // Fold onto [0, 2) then mirror the upper half.
  x = std::fmod(x, 2.0);
  if (x < 0.0) x += 2.0;
  return x > 1.0 ? 2.0 - x : x;
}

}  // namespace

std::string_view to_string(EnvKind kind) {
  return kind == EnvKind::kFrontier ? "frontier" : "drifting_bandit";
}

EnvKind parse_env_kind(std::string_view s) {
  if (s == "frontier") return EnvKind::kFrontier;
  if (s == "drifting_bandit") return EnvKind::kDriftingBandit;
  throw ArgumentError("unknown environment kind '" + std::string(s) + "'");
}

void FrontierParams::validate() const {
  if (!(v_cap0 > 0.0 && v_cap0 <= v_cap_max)) throw ArgumentError("need 0 < v_cap0 <= v_cap_max");
  if (!(omega_cap0 > 0.0 && omega_cap0 <= omega_cap_max)) {
    throw ArgumentError("need 0 < omega_cap0 <= omega_cap_max");
  }
  if (!(growth >= 0.0) || !(omega_growth >= 0.0)) throw ArgumentError("growth must be >= 0");
  if (!(margin >= 0.0)) throw ArgumentError("margin must be >= 0");
  if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
  if (!(noise_std >= 0.0)) throw ArgumentError("noise_std must be >= 0");
  if (episode_steps == 0 || joints == 0) throw ArgumentError("episode needs steps and joints");
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
}

FrontierEnvState FrontierEnvState::initial(const FrontierParams& params) {
  params.validate();
  return FrontierEnvState{params.v_cap0, params.omega_cap0, params};
}

double expected_clamped(double mean, double stddev) {
  if (stddev <= 0.0) return std::clamp(mean, 0.0, 1.0);
  return expected_excess(mean, stddev, 0.0) - expected_excess(mean, stddev, 1.0);
}

std::pair<FrontierEnvState, EpisodeOutcome> env_step(const FrontierEnvState& state,
                                                     const Command& cmd, Rng& rng) {
  const FrontierParams& p = state.params;
  const double vx = std::abs(cmd.v_x);
  const double wz = std::abs(cmd.omega_z);
  const double tol = 1e-9;
  if (vx > p.v_cap_max + tol || wz > p.omega_cap_max + tol) {
    throw ArgumentError("command beyond environment caps");
  }

  EpisodeOutcome out;
  const double clean_lin = tracking_reward(vx, state.v_cap, p.sigma);
  const double clean_ang = tracking_reward(wz, state.omega_cap, p.sigma);
  out.reward.r_lin = std::clamp(clean_lin + normal(rng, 0.0, p.noise_std), 0.0, 1.0);
  out.reward.r_ang = std::clamp(clean_ang + normal(rng, 0.0, p.noise_std), 0.0, 1.0);
  out.success = out.reward.r_lin >= p.success_reward;
  out.achieved_v = std::min(vx, state.v_cap);

  const double cmd_norm = std::sqrt(cmd.v_x * cmd.v_x + cmd.v_y * cmd.v_y + cmd.omega_z * cmd.omega_z);
  const double tau = p.torque_gain * cmd_norm;
  const double qdot = p.joint_speed_gain * out.achieved_v;
  out.trace.steps = p.episode_steps;
  out.trace.joints = p.joints;
  out.trace.dt = p.dt;
  out.trace.torque.assign(p.episode_steps * p.joints, tau);
  out.trace.joint_velocity.assign(p.episode_steps * p.joints, qdot);
  out.trace.displacement.assign(p.episode_steps, out.achieved_v * p.dt);

  // Constraint-style components decay with the squared tracking shortfall.
  const double e_lin = std::max(0.0, vx - state.v_cap);
  const double e_ang = std::max(0.0, wz - state.omega_cap);
  const double strain = (e_lin * e_lin + e_ang * e_ang) / (p.sigma * p.sigma);
  const double per_step[kStabilityComponents] = {
      std::exp(-strain),        std::exp(-0.5 * strain),  out.reward.r_ang,
      out.reward.r_lin,         std::exp(-0.25 * strain), std::exp(-0.25 * strain),
      std::exp(-0.1 * strain),  std::exp(-strain),        std::exp(-0.5 * strain)};
  out.components.steps = p.episode_steps;
  out.components.components = kStabilityComponents;
  out.components.values.reserve(p.episode_steps * kStabilityComponents);
  for (std::size_t i = 0; i < p.episode_steps; ++i) {
    out.components.values.insert(out.components.values.end(), per_step,
                                 per_step + kStabilityComponents);
  }

  FrontierEnvState next = state;
  next.v_cap = grow(state.v_cap, vx, p.margin, p.growth, p.v_cap_max);
  next.omega_cap = grow(state.omega_cap, wz, p.margin, p.omega_growth, p.omega_cap_max);
  return {next, std::move(out)};
}

Prediction true_expected_reward(const FrontierEnvState& state, BinId bin, const CommandGrid& grid,
                                const ActiveRange& range) {
  const Box box = sampling_box(bin, grid, range);
  const FrontierParams& p = state.params;
  const double vx = std::abs(box[0].center());
  const double wz = std::abs(box[2].center());
  return {expected_clamped(tracking_reward(vx, state.v_cap, p.sigma), p.noise_std),
          expected_clamped(tracking_reward(wz, state.omega_cap, p.sigma), p.noise_std)};
}

DriftingBanditState DriftingBanditState::initial(std::size_t num_bins, double drift_std,
                                                 double noise_std, Rng& rng) {
  if (!(drift_std >= 0.0) || !(noise_std >= 0.0)) {
    throw ArgumentError("drift and noise must be >= 0");
  }
  DriftingBanditState s;
  s.means.resize(num_bins);
  for (double& m : s.means) m = uniform01(rng);
  s.drift_std = drift_std;
  s.noise_std = noise_std;
  return s;
}

double drifting_bandit_step(DriftingBanditState& state, BinId bin, Rng& rng) {
  if (bin.index >= state.means.size()) throw AddressError("bin outside bandit table");
  const double reward =
      std::clamp(state.means[bin.index] + normal(rng, 0.0, state.noise_std), 0.0, 1.0);
  if (state.drift_std > 0.0) {
    for (double& m : state.means) m = reflect01(m + normal(rng, 0.0, state.drift_std));
  }
  return reward;
}

double drifting_expected_reward(const DriftingBanditState& state, BinId bin) {
  return expected_clamped(state.means.at(bin.index), state.noise_std);
}

// --- Environment implementations -------------------------------------------------

FrontierEnvironment::FrontierEnvironment(const FrontierParams& params)
    : state_(FrontierEnvState::initial(params)) {}

EpisodeOutcome FrontierEnvironment::run_episode(BinId, const Command& cmd, Rng& rng) {
  auto [next, outcome] = env_step(state_, cmd, rng);
  state_ = next;
  return std::move(outcome);
}

std::vector<double> FrontierEnvironment::expected_utilities(std::span<const BinId> active,
                                                            const CommandGrid& grid,
                                                            const ActiveRange& range,
                                                            double alpha) const {
  // r_lin depends only on the x index and r_ang only on the z index.
  std::vector<double> lin(grid.bins(0), -1.0), ang(grid.bins(2), -1.0);
  std::vector<double> out;
  out.reserve(active.size());
  for (BinId b : active) {
    const BinCoords c = coords_of(b, grid);
    if (lin[c.ix] < 0.0 || ang[c.iz] < 0.0) {
      const Prediction e = true_expected_reward(state_, b, grid, range);
      lin[c.ix] = e.r_hat_lin;
      ang[c.iz] = e.r_hat_ang;
    }
    out.push_back(alpha * lin[c.ix] + (1.0 - alpha) * ang[c.iz]);
  }
  return out;
}

void FrontierEnvironment::save(CheckpointWriter& out) const {
  out.put_f64("env.v_cap", state_.v_cap);
  out.put_f64("env.omega_cap", state_.omega_cap);
}

void FrontierEnvironment::load(const CheckpointReader& in) {
  const double v = in.get_f64("env.v_cap");
  const double w = in.get_f64("env.omega_cap");
  state_.v_cap = v;
  state_.omega_cap = w;
}

DriftingBanditEnvironment::DriftingBanditEnvironment(std::size_t num_bins, double drift_std,
                                                     double noise_std, double success_reward,
                                                     Rng& init_rng)
    : state_(DriftingBanditState::initial(num_bins, drift_std, noise_std, init_rng)),
      success_reward_(success_reward) {}

EpisodeOutcome DriftingBanditEnvironment::run_episode(BinId bin, const Command&, Rng& rng) {
  EpisodeOutcome out;
  const double r = drifting_bandit_step(state_, bin, rng);
  out.reward = {r, r};
  out.success = r >= success_reward_;
  return out;
}

std::vector<double> DriftingBanditEnvironment::expected_utilities(std::span<const BinId> active,
                                                                  const CommandGrid&,
                                                                  const ActiveRange&,
                                                                  double) const {
  std::vector<double> out;
  out.reserve(active.size());
  for (BinId b : active) out.push_back(drifting_expected_reward(state_, b));
  return out;
}

void DriftingBanditEnvironment::save(CheckpointWriter& out) const {
  out.put_tensor("env.means", state_.means.size(), 1, state_.means);
}

void DriftingBanditEnvironment::load(const CheckpointReader& in) {
  state_.means = in.get_tensor("env.means", state_.means.size(), 1);
}

}  // namespace hacl
