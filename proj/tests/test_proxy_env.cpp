#include <cmath>
#include <vector>

#include "doctest.h"
#include "hacl/command_space.hpp"
#include "hacl/errors.hpp"
#include "hacl/proxy_env.hpp"

using namespace hacl;

namespace {

FrontierEnvState noiseless() {
  FrontierParams p;
  p.noise_std = 0.0;
  return FrontierEnvState::initial(p);
}

}  // namespace

TEST_CASE("tracking reward examples") {
  Rng rng = make_stream(1, "env");
  const auto s = noiseless();
  CHECK(env_step(s, {0.5, 0.0, 0.0}, rng).second.reward.r_lin == 1.0);
  CHECK(env_step(s, {2.0, 0.0, 0.0}, rng).second.reward.r_lin ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(env_step(s, {2.0, 0.0, 0.0}, rng).second.success == false);
  CHECK(env_step(s, {-0.3, 0.0, 0.0}, rng).second.success == true);
  CHECK_THROWS_AS(env_step(s, {7.5, 0.0, 0.0}, rng), ArgumentError);
  CHECK_THROWS_AS(env_step(s, {0.0, 0.0, -5.5}, rng), ArgumentError);
}

TEST_CASE("frontier practice grows capability by the recurrence") {
  Rng rng = make_stream(2, "growth");
  auto s = noiseless();
  const double delta = s.params.growth, cap = s.params.v_cap_max;
  double oracle = s.v_cap;
  for (int k = 1; k <= 4000; ++k) {
    const double v = std::min(s.v_cap, cap);
    s = env_step(s, {v, 0.0, 0.0}, rng).first;
    oracle = std::min(oracle + delta, cap);
    REQUIRE(s.v_cap == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK(s.v_cap == cap);

  // Commands outside the frontier band leave capability unchanged.
  auto t = noiseless();
  for (int k = 0; k < 100; ++k) t = env_step(t, {0.2, 0.0, 0.0}, rng).first;
  CHECK(t.v_cap == 1.0);
}

TEST_CASE("capability never decreases and never exceeds the cap") {
  Rng rng = make_stream(3, "monotone");
  FrontierParams p;
  auto s = FrontierEnvState::initial(p);
  for (int k = 0; k < 5000; ++k) {
    const Command c{uniform(rng, -7, 7), uniform(rng, -1, 1), uniform(rng, -5, 5)};
    auto [next, out] = env_step(s, c, rng);
    REQUIRE(next.v_cap >= s.v_cap);
    REQUIRE(next.v_cap <= p.v_cap_max);
    REQUIRE(next.omega_cap >= s.omega_cap);
    REQUIRE(next.omega_cap <= p.omega_cap_max);
    REQUIRE((out.reward.r_lin >= 0.0 && out.reward.r_lin <= 1.0));
    REQUIRE((out.reward.r_ang >= 0.0 && out.reward.r_ang <= 1.0));
    REQUIRE(out.trace.steps == p.episode_steps);
    REQUIRE(out.trace.torque.size() == p.episode_steps * p.joints);
    s = next;
  }
}

TEST_CASE("expected reward oracle") {
  const CommandGrid grid;
  const ActiveRange range;
  const auto s = noiseless();
  // A bin centered well inside capability.
  const BinId inside = linear_index({10, 5, 10}, grid);
  const Prediction e = true_expected_reward(s, inside, grid, range);
  CHECK(e.r_hat_lin == 1.0);
  CHECK(e.r_hat_ang == 1.0);

  // Non-increasing in |center v_x| beyond capability.
  ActiveRange full;
  full.v_max = full.cap;
  double previous = 2.0;
  for (std::size_t ix = 10; ix < 20; ++ix) {
    const double r = true_expected_reward(s, linear_index({ix, 5, 10}, grid), grid, full).r_hat_lin;
    CHECK(r <= previous);
    previous = r;
  }
}

TEST_CASE("expected reward matches Monte Carlo at the cell center") {
  const CommandGrid grid;
  ActiveRange full;
  full.v_max = full.cap;
  FrontierParams p;
  p.noise_std = 0.3;  // large enough for clamping to matter
  auto s = FrontierEnvState::initial(p);
  s.v_cap = 2.0;
  Rng rng = make_stream(4, "mc");
  for (std::size_t ix : {10u, 13u, 15u, 19u}) {
    const BinId b = linear_index({ix, 5, 12}, grid);
    const Box box = sampling_box(b, grid, full);
    const Command center{0.5 * (box[0].lo + box[0].hi), 0.5 * (box[1].lo + box[1].hi),
                         0.5 * (box[2].lo + box[2].hi)};
    constexpr int n = 10000;
    double sum = 0.0, sq = 0.0, sum_ang = 0.0, sq_ang = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto out = env_step(s, center, rng).second;
      sum += out.reward.r_lin;
      sq += out.reward.r_lin * out.reward.r_lin;
      sum_ang += out.reward.r_ang;
      sq_ang += out.reward.r_ang * out.reward.r_ang;
    }
    const double mean = sum / n, mean_ang = sum_ang / n;
    const double se = std::sqrt(std::max(sq / n - mean * mean, 1e-12) / n);
    const double se_ang = std::sqrt(std::max(sq_ang / n - mean_ang * mean_ang, 1e-12) / n);
    const Prediction e = true_expected_reward(s, b, grid, full);
    CHECK(std::abs(e.r_hat_lin - mean) < 3 * se);
    CHECK(std::abs(e.r_hat_ang - mean_ang) < 3 * se_ang);
  }
}

TEST_CASE("concentrating on the frontier raises capability faster than uniform") {
  FrontierParams p;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng a = make_stream(seed, "frontier");
    Rng b = make_stream(seed, "uniform");
    auto focused = FrontierEnvState::initial(p);
    auto spread = FrontierEnvState::initial(p);
    for (int k = 0; k < 2000; ++k) {
      const double lo = focused.v_cap - p.margin;
      const double hi = std::min(focused.v_cap + p.margin, p.v_cap_max);
      const Command cf{uniform(a, lo, hi), uniform(a, -1, 1), uniform(a, -5, 5)};
      focused = env_step(focused, cf, a).first;
      const Command cu{uniform(b, -7, 7), uniform(b, -1, 1), uniform(b, -5, 5)};
      spread = env_step(spread, cu, b).first;
    }
    CHECK(focused.v_cap > spread.v_cap);
  }
}

TEST_CASE("same seed gives the same outcome stream") {
  auto run = [] {
    Rng rng = make_stream(5, "stream");
    FrontierEnvironment env(FrontierParams{});
    std::vector<double> out;
    for (int k = 0; k < 300; ++k) {
      const Command c{uniform(rng, -3, 3), uniform(rng, -1, 1), uniform(rng, -2, 2)};
      const auto o = env.run_episode(BinId{0}, c, rng);
      out.push_back(o.reward.r_lin);
      out.push_back(o.reward.r_ang);
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("drifting bandit") {
  Rng rng = make_stream(6, "bandit");
  auto still = DriftingBanditState::initial(5, 0.0, 0.0, rng);
  const auto means = still.means;
  for (int k = 0; k < 100; ++k) {
    const double r = drifting_bandit_step(still, BinId{2}, rng);
    CHECK(r == means[2]);
  }
  CHECK(still.means == means);

  auto noisy = DriftingBanditState::initial(20, 0.05, 0.5, rng);
  for (int k = 0; k < 2000; ++k) {
    const double r = drifting_bandit_step(noisy, BinId{static_cast<std::size_t>(k % 20)}, rng);
    REQUIRE((r >= 0.0 && r <= 1.0));
    for (double m : noisy.means) REQUIRE((m >= 0.0 && m <= 1.0));
  }
}

TEST_CASE("drift mean-squared displacement grows linearly") {
  // Means start at 0.5 and move little enough that the walls are never hit.
  constexpr int trials = 10000;
  constexpr int k = 100;
  constexpr double sd = 0.002;
  Rng rng = make_stream(7, "msd");
  DriftingBanditState s;
  s.drift_std = sd;
  s.noise_std = 0.0;
  s.means.assign(trials, 0.5);
  for (int step = 0; step < k; ++step) drifting_bandit_step(s, BinId{0}, rng);
  double msd = 0.0;
  for (double m : s.means) msd += (m - 0.5) * (m - 0.5) / trials;
  const double expected = k * sd * sd;
  const double se = std::sqrt(2.0) * expected / std::sqrt(double(trials));
  CHECK(std::abs(msd - expected) < 3 * se);
}

TEST_CASE("environment kinds round-trip through their names") {
  CHECK(parse_env_kind(to_string(EnvKind::kFrontier)) == EnvKind::kFrontier);
  CHECK(parse_env_kind(to_string(EnvKind::kDriftingBandit)) == EnvKind::kDriftingBandit);
  CHECK_THROWS(parse_env_kind("maze"));
}
