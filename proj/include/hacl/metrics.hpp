#pragma once

// Evaluation metrics: cost of transport, stability score, task success rate
// with a Wald interval, and cumulative regret against an oracle.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hacl {

// Per-step joint traces. torque and joint_velocity are steps x joints, row-major.
struct TrajectoryLog {
  std::size_t steps = 0;
  std::size_t joints = 0;
  std::vector<double> torque;          // N*m
  std::vector<double> joint_velocity;  // rad/s
  std::vector<double> displacement;    // m per step
  double dt = 0.005;                   // s

  void validate() const;
};

// Per-step component rewards, steps x components, row-major.
struct RewardComponents {
  std::size_t steps = 0;
  std::size_t components = 0;
  std::vector<double> values;
};

// Component order used by the proxy environment.
inline constexpr std::size_t kStabilityComponents = 9;
inline constexpr const char* kStabilityComponentNames[kStabilityComponents] = {
    "orientation",     "base_height",       "angular_velocity",
    "linear_velocity", "joint_pos_limit",   "joint_vel_limit",
    "raw_joint_vel",   "self_collision",    "torque_limit"};

struct StabilityWeights {
  std::vector<double> w;
};

enum class CotDenominator {
  kTotalDistance,  // total joint energy / (m g total distance)
  kPerStep,        // mean over steps of step energy / (m g step distance)
};

// Empty when the metric is undefined (no displacement).
std::optional<double> cost_of_transport(const TrajectoryLog& log, double mass, double gravity,
                                        CotDenominator mode = CotDenominator::kTotalDistance);

double stability_score(const RewardComponents& components, const StabilityWeights& weights);

struct SuccessRate {
  double rate = 0.0;
  double ci_lo = 0.0;  // 95% Wald interval, clipped to [0, 1]
  double ci_hi = 0.0;
  std::size_t trials = 0;
};

SuccessRate success_rate(std::span<const bool> outcomes);
SuccessRate success_rate(std::size_t successes, std::size_t trials);

struct OracleUtility {
  double best = 0.0;    // max over available bins of the oracle utility
  double chosen = 0.0;  // oracle utility of the bin actually selected
};

double cumulative_regret(std::span<const OracleUtility> episodes);

struct RunSummary {
  std::string method;
  std::uint64_t seed = 0;
  std::uint64_t episodes = 0;
  std::optional<std::uint64_t> episodes_to_target;  // first episode with v_cap >= target
  double final_v_cap = 0.0;
  double final_v_max_x = 0.0;
  std::optional<double> mean_cot;
  double stability = 0.0;
  SuccessRate success;
  double cumulative_regret = 0.0;
};

}  // namespace hacl
