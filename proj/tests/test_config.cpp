#include <string>

#include "doctest.h"
#include "hacl/config.hpp"

using namespace hacl;

namespace {

bool mentions(const ConfigError& e, const std::string& field) {
  for (const auto& p : e.problems()) {
    if (p.rfind(field, 0) == 0) return true;
  }
  return false;
}

ConfigError error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a config error");
  return ConfigError({});
}

}  // namespace

TEST_CASE("defaults and overrides") {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "name = probe\n"
      "sampler.kind = ucb   # trailing comment\n"
      "sampler.kappa = 0.3\n"
      "range.initial = 1.5, 1, 2\n"
      "grid.bins = 10, 5, 10\n"
      "run.seeds = 7, 8\n"
      "metrics.cot_mode = per_step\n");
  CHECK(c.name == "probe");
  CHECK(c.sampler.kind == SchedulerKind::kUcb);
  CHECK(c.sampler.utility.kappa == 0.3);
  CHECK(c.sampler.utility.epsilon == 1e-3);
  CHECK(c.range.range.v_max == Vec3{1.5, 1, 2});
  CHECK(c.grid.size() == 500);
  CHECK(c.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(c.metrics.cot_mode == CotDenominator::kPerStep);
  CHECK(c.budget == 5000);
  CHECK(c.env.frontier.v_cap_max == 7.0);
}

TEST_CASE("every problem is reported with its field path") {
  const ConfigError e = error_of(
      "run.budget = 0\n"
      "sampler.alpha = 1.5\n"
      "sampler.kind = softmax\n"
      "bogus.key = 1\n"
      "sampler.kappa = 0.1\n"
      "sampler.kappa = 0.2\n"
      "not a pair\n");
  CHECK(mentions(e, "sampler.kind"));
  CHECK(mentions(e, "bogus.key"));
  CHECK(mentions(e, "sampler.kappa"));
  CHECK(mentions(e, "line 7"));
  CHECK(mentions(e, "run.budget"));
  CHECK(mentions(e, "sampler.alpha"));
  CHECK(e.problems().size() == 6);
}

TEST_CASE("validation errors") {
  CHECK(mentions(error_of("run.budget = 0\n"), "run.budget"));
  CHECK(mentions(error_of("sampler.alpha = 1.5\n"), "sampler.alpha"));
  CHECK(mentions(error_of("range.initial = 8, 1, 1\n"), "range.initial[0]"));
  CHECK(mentions(error_of("sampler.epsilon = 0\n"), "sampler.epsilon"));
  CHECK(mentions(error_of("metrics.stability_weights = 1, 2\n"), "metrics.stability_weights"));
  CHECK(mentions(error_of("predictor.learning_rate = -1\n"), "predictor.learning_rate"));
  CHECK(mentions(error_of("sampler.kappa = abc\n"), "sampler.kappa"));
}

TEST_CASE("environment fingerprint ignores scheduler and predictor choices") {
  const auto a = parse_config("sampler.kind = ha_greedy\npredictor.kind = recurrent\nname = a\n");
  const auto b = parse_config("sampler.kind = uniform\npredictor.kind = feedforward\nname = b\n");
  const auto c = parse_config("env.sigma = 2\n");
  CHECK(environment_fingerprint(a) == environment_fingerprint(b));
  CHECK(environment_fingerprint(a) != environment_fingerprint(c));
}
