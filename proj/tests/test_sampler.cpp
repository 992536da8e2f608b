#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "hacl/errors.hpp"
#include "hacl/sampler.hpp"

using namespace hacl;

namespace {

std::vector<BinId> ids(std::initializer_list<std::size_t> xs) {
  std::vector<BinId> out;
  for (auto x : xs) out.push_back(BinId{x});
  return out;
}

}  // namespace

TEST_CASE("utility examples") {
  CHECK(utility({0.8, 0.4}, 0.5) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(utility({0.3, 0.9}, 1.0) == 0.3);
  CHECK(utility({0.3, 0.9}, 0.0) == 0.9);
}

TEST_CASE("clipped greedy weight update") {
  auto w = initial_weights(4, 0.5);
  auto up = ha_greedy_update(w, BinId{1}, 1.0, 0.2);
  CHECK(up.w[1] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(up.w[0] == 0.5);
  CHECK(up.w[2] == 0.5);
  w.w[2] = 0.95;
  CHECK(ha_greedy_update(w, BinId{2}, 1.0, 0.2).w[2] == 1.0);
  w.w[3] = 0.1;
  CHECK(ha_greedy_update(w, BinId{3}, -1.0, 0.2).w[3] == 0.0);
}

TEST_CASE("normalization examples") {
  BinWeights w{{0.7, 0.3, 0.9}};
  const MetaPolicy p = normalize(w, ids({0, 1}), 1e-3);
  CHECK(p.p[0] == doctest::Approx(0.701 / 1.002).epsilon(1e-12));
  CHECK(p.p[1] == doctest::Approx(0.301 / 1.002).epsilon(1e-12));
  CHECK(p.p[2] == 0.0);

  BinWeights zero{{0, 0, 0, 0}};
  const MetaPolicy u = normalize(zero, ids({0, 1, 3}), 1e-3);
  for (std::size_t b : {0u, 1u, 3u}) CHECK(u.p[b] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(u.p[2] == 0.0);

  CHECK_THROWS_AS(normalize(w, {}, 1e-3), ArgumentError);
  CHECK_THROWS_AS(normalize(w, ids({0}), 0.0), ArgumentError);
}

TEST_CASE("weights and policy invariants under random updates") {
  Rng rng = make_stream(2, "invariants");
  auto w = initial_weights(50);
  std::vector<BinId> active;
  for (std::size_t b = 0; b < 50; b += 3) active.push_back(BinId{b});
  for (int t = 0; t < 5000; ++t) {
    const BinId b{std::uniform_int_distribution<std::size_t>(0, 49)(rng)};
    w = ha_greedy_update(w, b, uniform(rng, -3.0, 3.0), 0.2);
    for (double x : w.w) REQUIRE((x >= 0.0 && x <= 1.0));
    if (t % 100 == 0) {
      const MetaPolicy p = normalize(w, active, 1e-3);
      double total = 0.0, active_total = 0.0;
      for (double x : p.p) total += x;
      for (BinId a : active) {
        REQUIRE(p.p[a.index] > 0.0);
        double denom = 0.0;
        for (BinId c : active) denom += w.w[c.index] + 1e-3;
        REQUIRE(p.p[a.index] >= 1e-3 / denom * (1 - 1e-12));
        active_total += p.p[a.index];
      }
      REQUIRE(std::abs(total - 1.0) <= 1e-9);
      REQUIRE(active_total == doctest::Approx(total));
    }
  }
}

TEST_CASE("categorical draws") {
  MetaPolicy point{{0, 0, 1, 0}};
  Rng rng = make_stream(3, "draws");
  for (int i = 0; i < 100; ++i) CHECK(sample_bin(point, rng).index == 2);

  const std::vector<double> probs{0.2, 0.3, 0.5};
  MetaPolicy p{probs};
  constexpr int n = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[sample_bin(p, rng).index];
  for (std::size_t b = 0; b < 3; ++b) {
    const double se = std::sqrt(probs[b] * (1 - probs[b]) / n);
    CHECK(std::abs(counts[b] / double(n) - probs[b]) < 3 * se);
  }

  Rng a = make_stream(4, "same"), b = make_stream(4, "same");
  for (int i = 0; i < 1000; ++i) REQUIRE(sample_bin(p, a) == sample_bin(p, b));
}

TEST_CASE("UCB weights") {
  auto s = BanditState::fresh(3);
  s.counts = {4, 0, 8};
  s.means = {0.5, 0.0, 0.5};
  s.total = 12;
  CHECK(ucb_weight(s, BinId{0}) == doctest::Approx(0.5 + std::sqrt(2 * std::log(12.0) / 4)).epsilon(1e-12));
  CHECK(ucb_weight(s, BinId{1}) == kUnvisitedBonus);
  CHECK(ucb_weight(s, BinId{0}) > ucb_weight(s, BinId{2}));
  // With ln t = 2 the bonus for n = 4 is exactly 1.
  const double bonus = std::sqrt(2.0 * 2.0 / 4.0);
  CHECK(0.5 + bonus == 1.5);
}

TEST_CASE("UCB argmax is invariant to shifting every mean") {
  Rng rng = make_stream(5, "shift");
  SamplerConfig cfg;
  cfg.kind = SchedulerKind::kUcb;
  for (int trial = 0; trial < 20; ++trial) {
    auto s = BanditState::fresh(10);
    for (std::size_t b = 0; b < 10; ++b) {
      s.counts[b] = 1 + std::uniform_int_distribution<std::uint64_t>(0, 20)(rng);
      s.means[b] = uniform01(rng);
      s.total += s.counts[b];
    }
    auto argmax = [](const BanditState& st) {
      std::size_t best = 0;
      for (std::size_t b = 1; b < 10; ++b) {
        if (ucb_weight(st, BinId{b}) > ucb_weight(st, BinId{best})) best = b;
      }
      return best;
    };
    auto shifted = s;
    for (auto& m : shifted.means) m += 3.25;
    CHECK(argmax(s) == argmax(shifted));
  }
}

TEST_CASE("Thompson draws follow the Beta posterior") {
  Rng rng = make_stream(6, "beta");
  auto s = BanditState::fresh(2);
  s.alpha = {1, 100};
  s.beta = {1, 1};
  constexpr int n = 100000;
  double m0 = 0.0, m1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = thompson_weight(s, BinId{0}, rng);
    const double b = thompson_weight(s, BinId{1}, rng);
    REQUIRE((a >= 0.0 && a <= 1.0));
    REQUIRE((b >= 0.0 && b <= 1.0));
    m0 += a / n;
    m1 += b / n;
  }
  CHECK(std::abs(m0 - 0.5) < 3 * std::sqrt(1.0 / 12 / n));
  CHECK(m1 >= 0.97);
  const double var1 = 100.0 / (101.0 * 101.0 * 102.0);
  CHECK(std::abs(m1 - 100.0 / 101.0) < 3 * std::sqrt(var1 / n));
}

TEST_CASE("bandit bookkeeping") {
  auto s = update_bandit(BanditState::fresh(3), BinId{1}, 0.8);
  CHECK(s.counts[1] == 1);
  CHECK(s.means[1] == doctest::Approx(0.8));
  CHECK(s.alpha[1] == 2.0);
  CHECK(s.beta[1] == 1.0);
  CHECK(s.total == 1);
  s = update_bandit(s, BinId{1}, 0.4);
  CHECK(s.means[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(s.beta[1] == 2.0);
  CHECK(s.alpha[1] == 2.0);
  CHECK_THROWS_AS(update_bandit(s, BinId{0}, 1.2), ArgumentError);
  CHECK_THROWS_AS(update_bandit(s, BinId{0}, -0.1), ArgumentError);
  std::uint64_t total = 0;
  for (auto c : s.counts) total += c;
  CHECK(total == s.total);
}

TEST_CASE("scheduler selection rules") {
  Rng rng = make_stream(7, "select");
  SamplerConfig cfg;

  cfg.kind = SchedulerKind::kUniform;
  Scheduler uni(cfg, 10);
  for (int i = 0; i < 20; ++i) CHECK(uni.select(ids({4}), rng).index == 4);

  cfg.kind = SchedulerKind::kUcb;
  Scheduler ucb(cfg, 10);
  for (std::size_t b : {1u, 2u, 3u}) ucb.record(BinId{b}, 0.0, 0.9);
  CHECK(ucb.select(ids({1, 2, 3, 5}), rng).index == 5);
  // Equal weights break toward the lowest index.
  CHECK(ucb.select(ids({1, 2, 3}), rng).index == 1);

  cfg.kind = SchedulerKind::kFixedGrid;
  Scheduler grid(cfg, 500);
  const auto active = ids({0, 200, 400});
  std::vector<std::size_t> seen;
  for (int i = 0; i < 4; ++i) seen.push_back(grid.select(active, rng).index);
  CHECK(seen == std::vector<std::size_t>{0, 200, 400, 0});

  cfg.kind = SchedulerKind::kThompson;
  Scheduler ts(cfg, 10);
  CHECK_THROWS_AS(ts.select({}, rng), ArgumentError);
}

TEST_CASE("higher-utility bin is selected increasingly often") {
  // Frozen oracle utilities: bin 0 is best, the others are weaker. Each round
  // measures the selection frequency from the current policy, then runs a
  // short batch of select/update episodes.
  const std::vector<double> u{0.6, 0.1, 0.05, 0.0, 0.1};
  SamplerConfig cfg;
  cfg.utility.kappa = 0.05;
  Scheduler s(cfg, u.size());
  const auto active = ids({0, 1, 2, 3, 4});
  Rng rng = make_stream(8, "frequency");

  double previous = -1.0;
  int rounds = 0;
  while (s.weights().w[0] < 1.0 && rounds < 100) {
    constexpr int draws = 20000;
    const MetaPolicy policy = s.policy(active);
    int hits = 0;
    for (int i = 0; i < draws; ++i) hits += sample_bin(policy, rng).index == 0 ? 1 : 0;
    const double freq = hits / double(draws);
    CHECK(freq > previous);
    previous = freq;
    for (int i = 0; i < 10; ++i) {
      const BinId b = s.select(active, rng);
      s.record(b, u[b.index], u[b.index]);
    }
    ++rounds;
  }
  CHECK(rounds > 3);
  CHECK(s.weights().w[0] == 1.0);
}

TEST_CASE("schedulers are deterministic in their random stream") {
  for (auto kind : {SchedulerKind::kHaGreedy, SchedulerKind::kUcb, SchedulerKind::kThompson,
                    SchedulerKind::kUniform, SchedulerKind::kFixedGrid}) {
    auto trace = [kind] {
      SamplerConfig cfg;
      cfg.kind = kind;
      Scheduler s(cfg, 30);
      Rng rng = make_stream(9, "trace");
      Rng rewards = make_stream(9, "rewards");
      std::vector<BinId> active;
      for (std::size_t b = 0; b < 30; b += 2) active.push_back(BinId{b});
      std::vector<std::size_t> out;
      for (int t = 0; t < 200; ++t) {
        const BinId b = s.select(active, rng);
        const double r = uniform01(rewards);
        s.record(b, r, r);
        out.push_back(b.index);
      }
      return out;
    };
    CHECK(trace() == trace());
  }
}

TEST_CASE("scheduler kinds round-trip through their names") {
  for (auto kind : {SchedulerKind::kHaGreedy, SchedulerKind::kUcb, SchedulerKind::kThompson,
                    SchedulerKind::kUniform, SchedulerKind::kFixedGrid}) {
    CHECK(parse_scheduler_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS(parse_scheduler_kind("softmax"));
}
