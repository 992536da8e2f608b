#include <cmath>
#include <vector>

#include "doctest.h"
#include "hacl/errors.hpp"
#include "hacl/metrics.hpp"

using namespace hacl;

namespace {

TrajectoryLog uniform_log(std::size_t steps, std::size_t joints, double tau, double qd,
                          double step_distance, double dt) {
  TrajectoryLog log;
  log.steps = steps;
  log.joints = joints;
  log.dt = dt;
  log.torque.assign(steps * joints, tau);
  log.joint_velocity.assign(steps * joints, qd);
  log.displacement.assign(steps, step_distance);
  return log;
}

}  // namespace

TEST_CASE("cost of transport") {
  const auto log = uniform_log(2, 2, 1.0, 1.0, 0.2, 1.0);
  const auto cot = cost_of_transport(log, 1.0, 10.0);
  REQUIRE(cot.has_value());
  CHECK(*cot == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(*cost_of_transport(uniform_log(2, 2, 0.0, 1.0, 0.2, 1.0), 1.0, 10.0) == 0.0);
  CHECK(*cost_of_transport(uniform_log(2, 2, 2.0, 1.0, 0.2, 1.0), 1.0, 10.0) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(*cost_of_transport(uniform_log(2, 2, 1.0, 1.0, 0.4, 1.0), 1.0, 10.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(cost_of_transport(uniform_log(3, 2, 1.0, 1.0, 0.0, 1.0), 1.0, 10.0).has_value());

  // Per-step denominator: each step contributes 2 / (10 * 0.2) = 1.
  CHECK(*cost_of_transport(log, 1.0, 10.0, CotDenominator::kPerStep) ==
        doctest::Approx(1.0).epsilon(1e-12));

  auto bad = log;
  bad.torque.pop_back();
  CHECK_THROWS_AS(cost_of_transport(bad, 1.0, 10.0), ArgumentError);
}

TEST_CASE("stability score") {
  RewardComponents one{1, 2, {0.5, 0.25}};
  CHECK(stability_score(one, {{1.0, 2.0}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stability_score({1, 2, {0.0, 0.0}}, {{1.0, 2.0}}) == 0.0);
  CHECK(stability_score(one, {{3.0, 6.0}}) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(stability_score(one, {{1.0}}), ArgumentError);

  // Concatenated logs give the length-weighted mean of the parts.
  RewardComponents a{2, 2, {1, 0, 0, 1}};
  RewardComponents b{1, 2, {0.5, 0.5}};
  RewardComponents ab{3, 2, {1, 0, 0, 1, 0.5, 0.5}};
  const StabilityWeights w{{2.0, 1.0}};
  const double expected = (2 * stability_score(a, w) + stability_score(b, w)) / 3;
  CHECK(stability_score(ab, w) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("success rate") {
  std::vector<bool> nine(9, true);
  nine.push_back(false);
  bool buf[10];
  for (int i = 0; i < 10; ++i) buf[i] = nine[i];
  const SuccessRate r = success_rate(std::span<const bool>(buf, 10));
  CHECK(r.rate == doctest::Approx(0.9).epsilon(1e-12));
  const double half = 1.96 * std::sqrt(0.9 * 0.1 / 10);
  CHECK(r.ci_lo == doctest::Approx(0.9 - half).epsilon(1e-12));
  CHECK(r.ci_hi == doctest::Approx(1.0));  // clipped
  CHECK(success_rate(5, 5).rate == 1.0);
  CHECK(success_rate(0, 5).rate == 0.0);
  CHECK(success_rate(0, 5).ci_lo == 0.0);
  CHECK_THROWS_AS(success_rate(std::span<const bool>{}), ArgumentError);
}

TEST_CASE("cumulative regret") {
  const std::vector<OracleUtility> best{{1.0, 1.0}, {0.7, 0.7}};
  CHECK(cumulative_regret(best) == 0.0);
  const std::vector<OracleUtility> one{{1.0, 0.4}};
  CHECK(cumulative_regret(one) == doctest::Approx(0.6).epsilon(1e-12));
  std::vector<OracleUtility> seq;
  double previous = 0.0;
  for (int t = 0; t < 20; ++t) {
    seq.push_back({1.0, 0.05 * t});
    const double r = cumulative_regret(seq);
    CHECK(r >= previous);
    previous = r;
  }
}
