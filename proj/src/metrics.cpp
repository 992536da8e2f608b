#include "hacl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hacl/errors.hpp"

namespace hacl {

void TrajectoryLog::validate() const {
  if (torque.size() != steps * joints || joint_velocity.size() != steps * joints ||
      displacement.size() != steps) {
    throw ArgumentError("trajectory log arrays do not match its step/joint counts");
  }
  if (!(dt > 0.0)) throw ArgumentError("trajectory timestep must be positive");
}

std::optional<double> cost_of_transport(const TrajectoryLog& log, double mass, double gravity,
                                        CotDenominator mode) {
  log.validate();
  if (!(mass > 0.0) || !(gravity > 0.0)) throw ArgumentError("mass and gravity must be positive");
  const double weight = mass * gravity;

  auto step_energy = [&](std::size_t i) {
    double e = 0.0;
    for (std::size_t j = 0; j < log.joints; ++j) {
      e += log.torque[i * log.joints + j] * log.joint_velocity[i * log.joints + j];
    }
    return e * log.dt;
  };

  if (mode == CotDenominator::kTotalDistance) {
    double energy = 0.0;
    double distance = 0.0;
    for (std::size_t i = 0; i < log.steps; ++i) {
      energy += step_energy(i);
      distance += log.displacement[i];
    }
    if (!(distance > 0.0)) return std::nullopt;
    return energy / (weight * distance);
  }

  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < log.steps; ++i) {
    if (!(log.displacement[i] > 0.0)) continue;
    total += step_energy(i) / (weight * log.displacement[i]);
    ++counted;
  }
  if (counted == 0) return std::nullopt;
  return total / static_cast<double>(counted);
}

double stability_score(const RewardComponents& components, const StabilityWeights& weights) {
  if (weights.w.size() != components.components) {
    throw ArgumentError("stability weights and reward components differ in length");
  }
  if (components.values.size() != components.steps * components.components) {
    throw ArgumentError("reward component array does not match its shape");
  }
  if (components.steps == 0) throw ArgumentError("stability score over zero steps");
  double total = 0.0;
  for (std::size_t i = 0; i < components.steps; ++i) {
    for (std::size_t k = 0; k < components.components; ++k) {
      total += weights.w[k] * components.values[i * components.components + k];
    }
  }
  return total / static_cast<double>(components.steps);
}

SuccessRate success_rate(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw ArgumentError("success rate over zero trials");
  if (successes > trials) throw ArgumentError("more successes than trials");
  SuccessRate s;
  s.trials = trials;
  s.rate = static_cast<double>(successes) / static_cast<double>(trials);
  const double half = 1.96 * std::sqrt(s.rate * (1.0 - s.rate) / static_cast<double>(trials));
  s.ci_lo = std::max(0.0, s.rate - half);
  s.ci_hi = std::min(1.0, s.rate + half);
  return s;
}

SuccessRate success_rate(std::span<const bool> outcomes) {
  return success_rate(static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), true)),
                      outcomes.size());
}

double cumulative_regret(std::span<const OracleUtility> episodes) {
  double total = 0.0;
  for (const auto& e : episodes) total += std::max(0.0, e.best - e.chosen);
  return total;
}

}  // namespace hacl
