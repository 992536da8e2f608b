#pragma once

// Synthetic stand-ins for a legged-robot trainer.
//
// Frontier environment: the learner has an achievable forward speed v_cap and
// yaw rate omega_cap. Commands within capability are tracked perfectly;
// beyond it the tracking reward decays as exp(-e^2 / sigma^2). Capability on
// an axis grows by `growth` only when the command magnitude lands within
// `margin` of the current capability, so rewards depend on the whole command
// history through the capabilities.
//
// Drifting bandit: a per-bin table of mean rewards, each following a
// reflected Gaussian random walk.
//
// Traces and stability components are synthetic: torque is proportional to
// the command norm, joint speed to the achieved forward speed.

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hacl/checkpoint.hpp"
#include "hacl/command_space.hpp"
#include "hacl/metrics.hpp"
#include "hacl/predictor.hpp"
#include "hacl/rng.hpp"

namespace hacl {

enum class EnvKind { kFrontier, kDriftingBandit };

std::string_view to_string(EnvKind kind);
EnvKind parse_env_kind(std::string_view s);

struct FrontierParams {
  double v_cap0 = 1.0;
  double omega_cap0 = 1.0;
  double growth = 0.002;
  double omega_growth = 0.002;
  double margin = 0.5;
  double sigma = 1.0;
  double noise_std = 0.05;
  double v_cap_max = 7.0;
  double omega_cap_max = 5.0;
  double success_reward = 0.8;
  std::size_t episode_steps = 50;
  std::size_t joints = 12;
  double dt = 0.005;
  double torque_gain = 1.0;       // N*m per unit command norm
  double joint_speed_gain = 10.0;  // rad/s per m/s achieved

  void validate() const;
};

struct FrontierEnvState {
  double v_cap = 1.0;
  double omega_cap = 1.0;
  FrontierParams params;

  static FrontierEnvState initial(const FrontierParams& params);
};

struct EpisodeOutcome {
  RewardObservation reward;
  bool success = false;
  TrajectoryLog trace;
  RewardComponents components;
  double achieved_v = 0.0;
};

// Throws ArgumentError when a command component exceeds the caps.
std::pair<FrontierEnvState, EpisodeOutcome> env_step(const FrontierEnvState& state,
                                                     const Command& cmd, Rng& rng);

// Expected (clamped, noisy) reward for the center of the bin's sampling box.
Prediction true_expected_reward(const FrontierEnvState& state, BinId bin, const CommandGrid& grid,
                                const ActiveRange& range);

// E[clamp(mean + N(0, stddev^2), 0, 1)].
double expected_clamped(double mean, double stddev);

struct DriftingBanditState {
  std::vector<double> means;
  double drift_std = 0.01;
  double noise_std = 0.1;

  static DriftingBanditState initial(std::size_t num_bins, double drift_std, double noise_std,
                                     Rng& rng);
};

// Reward for `bin`, then every mean takes one reflected random-walk step.
double drifting_bandit_step(DriftingBanditState& state, BinId bin, Rng& rng);

double drifting_expected_reward(const DriftingBanditState& state, BinId bin);

// Uniform front used by the experiment loop.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvKind kind() const = 0;
  virtual EpisodeOutcome run_episode(BinId bin, const Command& cmd, Rng& rng) = 0;
  // Oracle utility alpha * r_lin + (1 - alpha) * r_ang for each bin in `active`.
  virtual std::vector<double> expected_utilities(std::span<const BinId> active,
                                                 const CommandGrid& grid,
                                                 const ActiveRange& range,
                                                 double alpha) const = 0;
  // Forward-speed capability, or 0 where the notion does not apply.
  virtual double v_cap() const = 0;
  virtual double omega_cap() const = 0;

  virtual void save(CheckpointWriter& out) const = 0;
  virtual void load(const CheckpointReader& in) = 0;
};

class FrontierEnvironment final : public Environment {
 public:
  explicit FrontierEnvironment(const FrontierParams& params);

  EnvKind kind() const override { return EnvKind::kFrontier; }
  EpisodeOutcome run_episode(BinId bin, const Command& cmd, Rng& rng) override;
  std::vector<double> expected_utilities(std::span<const BinId> active, const CommandGrid& grid,
                                         const ActiveRange& range, double alpha) const override;
  double v_cap() const override { return state_.v_cap; }
  double omega_cap() const override { return state_.omega_cap; }
  void save(CheckpointWriter& out) const override;
  void load(const CheckpointReader& in) override;

  const FrontierEnvState& state() const { return state_; }

 private:
  FrontierEnvState state_;
};

class DriftingBanditEnvironment final : public Environment {
 public:
  DriftingBanditEnvironment(std::size_t num_bins, double drift_std, double noise_std,
                            double success_reward, Rng& init_rng);

  EnvKind kind() const override { return EnvKind::kDriftingBandit; }
  EpisodeOutcome run_episode(BinId bin, const Command& cmd, Rng& rng) override;
  std::vector<double> expected_utilities(std::span<const BinId> active, const CommandGrid& grid,
                                         const ActiveRange& range, double alpha) const override;
  double v_cap() const override { return 0.0; }
  double omega_cap() const override { return 0.0; }
  void save(CheckpointWriter& out) const override;
  void load(const CheckpointReader& in) override;

  const DriftingBanditState& state() const { return state_; }

 private:
  DriftingBanditState state_;
  double success_reward_;
};

}  // namespace hacl
