#include "hacl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hacl {
namespace {

std::string join_lines(const std::vector<std::string>& v) {
  std::string s = "invalid configuration:";
  for (const auto& p : v) s += "\n  " + p;
  return s;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = v.find(',', start);
    out.push_back(trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool to_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

bool to_u64(std::string_view s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

// Field setters keyed by config path. Each returns an error message or "".
using Setter = std::function<std::string(ExperimentConfig&, std::string_view)>;

template <class F>
Setter number(F field) {
  return [field](ExperimentConfig& c, std::string_view v) -> std::string {
    double x = 0;
    if (!to_double(v, x)) return "expected a number, got '" + std::string(v) + "'";
    field(c) = x;
    return "";
  };
}

template <class F>
Setter count(F field) {
  return [field](ExperimentConfig& c, std::string_view v) -> std::string {
    std::uint64_t x = 0;
    if (!to_u64(v, x)) return "expected a non-negative integer, got '" + std::string(v) + "'";
    field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(x);
    return "";
  };
}

template <class F>
Setter vec3(F field) {
  return [field](ExperimentConfig& c, std::string_view v) -> std::string {
    const auto items = split_list(v);
    if (items.size() != 3) return "expected three comma-separated numbers";
    Vec3 out{};
    for (std::size_t a = 0; a < 3; ++a) {
      if (!to_double(items[a], out[a])) return "bad number '" + std::string(items[a]) + "'";
    }
    field(c) = out;
    return "";
  };
}

template <class F>
Setter boolean(F field) {
  return [field](ExperimentConfig& c, std::string_view v) -> std::string {
    if (v == "true") {
      field(c) = true;
    } else if (v == "false") {
      field(c) = false;
    } else {
      return "expected true or false";
    }
    return "";
  };
}

template <class F, class Parse>
Setter enumeration(F field, Parse parse) {
  return [field, parse](ExperimentConfig& c, std::string_view v) -> std::string {
    try {
      field(c) = parse(v);
    } catch (const std::exception& e) {
      return e.what();
    }
    return "";
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  using C = ExperimentConfig;
  static const std::map<std::string, Setter, std::less<>> table = {
      {"name", [](C& c, std::string_view v) -> std::string {
         if (v.empty() || v.find_first_of(" /\\,") != v.npos) {
           return "name must be non-empty without spaces, commas or slashes";
         }
         c.name = std::string(v);
         return "";
       }},
      {"grid.bins", [](C& c, std::string_view v) -> std::string {
         const auto items = split_list(v);
         if (items.size() != 3) return "expected three comma-separated bin counts";
         std::array<std::size_t, 3> bins{};
         for (std::size_t a = 0; a < 3; ++a) {
           std::uint64_t n = 0;
           if (!to_u64(items[a], n) || n == 0) return "bin counts must be positive integers";
           bins[a] = n;
         }
         c.grid = CommandGrid(bins, c.grid.axis_domain());
         return "";
       }},
      {"range.initial", vec3([](C& c) -> Vec3& { return c.range.range.v_max; })},
      {"range.step", vec3([](C& c) -> Vec3& { return c.range.range.step; })},
      {"range.cap", vec3([](C& c) -> Vec3& { return c.range.range.cap; })},
      {"range.success_window", count([](C& c) -> std::size_t& { return c.range.success_window; })},
      {"range.success_threshold", number([](C& c) -> double& { return c.range.success_threshold; })},
      {"sampler.kind", enumeration([](C& c) -> SchedulerKind& { return c.sampler.kind; },
                                   parse_scheduler_kind)},
      {"sampler.alpha", number([](C& c) -> double& { return c.sampler.utility.alpha; })},
      {"sampler.kappa", number([](C& c) -> double& { return c.sampler.utility.kappa; })},
      {"sampler.epsilon", number([](C& c) -> double& { return c.sampler.utility.epsilon; })},
      {"sampler.initial_weight", number([](C& c) -> double& { return c.sampler.initial_weight; })},
      {"sampler.thompson_threshold",
       number([](C& c) -> double& { return c.sampler.thompson_threshold; })},
      {"predictor.kind", enumeration([](C& c) -> PredictorKind& { return c.predictor.kind; },
                                     parse_predictor_kind)},
      {"predictor.hidden", count([](C& c) -> std::size_t& { return c.predictor.hidden_size; })},
      {"predictor.embed", count([](C& c) -> std::size_t& { return c.predictor.embed_size; })},
      {"predictor.window", count([](C& c) -> std::size_t& { return c.predictor.window; })},
      {"predictor.learning_rate", number([](C& c) -> double& { return c.predictor.learning_rate; })},
      {"predictor.clip_norm", number([](C& c) -> double& { return c.predictor.clip_norm; })},
      {"predictor.reward_scale_floor", number([](C& c) -> double& { return c.reward_scale_floor; })},
      {"env.kind", enumeration([](C& c) -> EnvKind& { return c.env.kind; }, parse_env_kind)},
      {"env.v_cap0", number([](C& c) -> double& { return c.env.frontier.v_cap0; })},
      {"env.omega_cap0", number([](C& c) -> double& { return c.env.frontier.omega_cap0; })},
      {"env.growth", number([](C& c) -> double& { return c.env.frontier.growth; })},
      {"env.omega_growth", number([](C& c) -> double& { return c.env.frontier.omega_growth; })},
      {"env.margin", number([](C& c) -> double& { return c.env.frontier.margin; })},
      {"env.sigma", number([](C& c) -> double& { return c.env.frontier.sigma; })},
      {"env.noise_std", number([](C& c) -> double& { return c.env.frontier.noise_std; })},
      {"env.success_reward", number([](C& c) -> double& { return c.env.frontier.success_reward; })},
      {"env.episode_steps", count([](C& c) -> std::size_t& { return c.env.frontier.episode_steps; })},
      {"env.joints", count([](C& c) -> std::size_t& { return c.env.frontier.joints; })},
      {"env.dt", number([](C& c) -> double& { return c.env.frontier.dt; })},
      {"env.torque_gain", number([](C& c) -> double& { return c.env.frontier.torque_gain; })},
      {"env.joint_speed_gain",
       number([](C& c) -> double& { return c.env.frontier.joint_speed_gain; })},
      {"env.drift_std", number([](C& c) -> double& { return c.env.drift_std; })},
      {"env.bandit_noise_std", number([](C& c) -> double& { return c.env.bandit_noise_std; })},
      {"metrics.mass", number([](C& c) -> double& { return c.metrics.mass; })},
      {"metrics.gravity", number([](C& c) -> double& { return c.metrics.gravity; })},
      {"metrics.cot_mode", enumeration([](C& c) -> CotDenominator& { return c.metrics.cot_mode; },
                                       [](std::string_view v) {
                                         if (v == "total_distance") return CotDenominator::kTotalDistance;
                                         if (v == "per_step") return CotDenominator::kPerStep;
                                         throw std::invalid_argument(
                                             "cot_mode must be total_distance or per_step");
                                       })},
      {"metrics.stability_weights", [](C& c, std::string_view v) -> std::string {
         std::vector<double> w;
         for (auto item : split_list(v)) {
           double x = 0;
           if (!to_double(item, x)) return "bad number '" + std::string(item) + "'";
           w.push_back(x);
         }
         c.metrics.stability_weights.w = std::move(w);
         return "";
       }},
      {"run.budget", count([](C& c) -> std::uint64_t& { return c.budget; })},
      {"run.seeds", [](C& c, std::string_view v) -> std::string {
         std::vector<std::uint64_t> seeds;
         for (auto item : split_list(v)) {
           if (item.empty()) continue;
           std::uint64_t s = 0;
           if (!to_u64(item, s)) return "bad seed '" + std::string(item) + "'";
           seeds.push_back(s);
         }
         c.seeds = std::move(seeds);
         return "";
       }},
      {"run.target_fraction", number([](C& c) -> double& { return c.target_fraction; })},
      {"output.dir", [](C& c, std::string_view v) -> std::string {
         c.output_dir = std::string(v);
         return "";
       }},
      {"output.wall_clock", boolean([](C& c) -> bool& { return c.record_wall_clock; })},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  config.source = std::string(text);
  std::vector<std::string> problems;
  std::map<std::string, std::size_t, std::less<>> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == line.npos) {
      problems.push_back(where + ": expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (auto it = seen.find(key); it != seen.end()) {
      problems.push_back(key + ": duplicate key (" + where + ", first at line " +
                         std::to_string(it->second) + ")");
      continue;
    }
    seen[key] = line_no;
    const auto& table = setters();
    auto setter = table.find(key);
    if (setter == table.end()) {
      problems.push_back(key + ": unknown key (" + where + ")");
      continue;
    }
    try {
      if (std::string err = setter->second(config, value); !err.empty()) {
        problems.push_back(key + ": " + err);
      }
    } catch (const std::exception& e) {
      problems.push_back(key + ": " + e.what());
    }
  }
  config.env.frontier.v_cap_max = config.range.range.cap[0];
  config.env.frontier.omega_cap_max = config.range.range.cap[2];
  try {
    validate(config);
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open " + path.string()});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> p;
  const auto& r = c.range.range;
  for (std::size_t a = 0; a < kAxes; ++a) {
    const std::string axis = std::to_string(a);
    if (!(r.cap[a] > 0.0)) p.push_back("range.cap[" + axis + "]: must be positive");
    if (!(r.v_max[a] > 0.0 && r.v_max[a] <= r.cap[a])) {
      p.push_back("range.initial[" + axis + "]: must lie in (0, cap]");
    }
    if (!(r.step[a] >= 0.0)) p.push_back("range.step[" + axis + "]: must be >= 0");
  }
  if (c.range.success_window == 0) p.push_back("range.success_window: must be positive");
  if (!(c.range.success_threshold >= 0.0 && c.range.success_threshold <= 1.0)) {
    p.push_back("range.success_threshold: must lie in [0, 1]");
  }
  const auto& u = c.sampler.utility;
  if (!(u.alpha >= 0.0 && u.alpha <= 1.0)) p.push_back("sampler.alpha: must lie in [0, 1]");
  if (!(u.kappa > 0.0)) p.push_back("sampler.kappa: must be positive");
  if (!(u.epsilon > 0.0)) p.push_back("sampler.epsilon: must be positive");
  if (!(c.sampler.initial_weight >= 0.0 && c.sampler.initial_weight <= 1.0)) {
    p.push_back("sampler.initial_weight: must lie in [0, 1]");
  }
  if (c.predictor.hidden_size == 0) p.push_back("predictor.hidden: must be positive");
  if (c.predictor.embed_size == 0) p.push_back("predictor.embed: must be positive");
  if (c.predictor.window == 0) p.push_back("predictor.window: must be positive");
  if (!(c.predictor.learning_rate > 0.0)) p.push_back("predictor.learning_rate: must be positive");
  if (!(c.predictor.clip_norm >= 0.0)) p.push_back("predictor.clip_norm: must be >= 0");
  if (!(c.reward_scale_floor > 0.0)) p.push_back("predictor.reward_scale_floor: must be positive");
  const auto& f = c.env.frontier;
  if (!(f.v_cap0 > 0.0 && f.v_cap0 <= r.cap[0])) p.push_back("env.v_cap0: must lie in (0, range.cap x]");
  if (!(f.omega_cap0 > 0.0 && f.omega_cap0 <= r.cap[2])) {
    p.push_back("env.omega_cap0: must lie in (0, range.cap z]");
  }
  if (!(f.growth >= 0.0)) p.push_back("env.growth: must be >= 0");
  if (!(f.omega_growth >= 0.0)) p.push_back("env.omega_growth: must be >= 0");
  if (!(f.margin >= 0.0)) p.push_back("env.margin: must be >= 0");
  if (!(f.sigma > 0.0)) p.push_back("env.sigma: must be positive");
  if (!(f.noise_std >= 0.0)) p.push_back("env.noise_std: must be >= 0");
  if (f.episode_steps == 0) p.push_back("env.episode_steps: must be positive");
  if (f.joints == 0) p.push_back("env.joints: must be positive");
  if (!(f.dt > 0.0)) p.push_back("env.dt: must be positive");
  if (!(c.env.drift_std >= 0.0)) p.push_back("env.drift_std: must be >= 0");
  if (!(c.env.bandit_noise_std >= 0.0)) p.push_back("env.bandit_noise_std: must be >= 0");
  if (!(c.metrics.mass > 0.0)) p.push_back("metrics.mass: must be positive");
  if (!(c.metrics.gravity > 0.0)) p.push_back("metrics.gravity: must be positive");
  if (c.metrics.stability_weights.w.size() != kStabilityComponents) {
    p.push_back("metrics.stability_weights: expected " + std::to_string(kStabilityComponents) +
                " weights");
  }
  if (c.budget == 0) p.push_back("run.budget: must be positive");
  if (c.seeds.empty()) p.push_back("run.seeds: need at least one seed");
  if (!(c.target_fraction > 0.0 && c.target_fraction <= 1.0)) {
    p.push_back("run.target_fraction: must lie in (0, 1]");
  }
  if (!p.empty()) throw ConfigError(std::move(p));
}

std::string environment_fingerprint(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "grid " << c.grid.bins(0) << ' ' << c.grid.bins(1) << ' ' << c.grid.bins(2) << '\n';
  for (std::size_t a = 0; a < kAxes; ++a) {
    os << "range " << c.range.range.v_max[a] << ' ' << c.range.range.step[a] << ' '
       << c.range.range.cap[a] << '\n';
  }
  os << "success " << c.range.success_window << ' ' << c.range.success_threshold << '\n';
  const auto& f = c.env.frontier;
  os << "env " << to_string(c.env.kind) << ' ' << f.v_cap0 << ' ' << f.omega_cap0 << ' '
     << f.growth << ' ' << f.omega_growth << ' ' << f.margin << ' ' << f.sigma << ' '
     << f.noise_std << ' ' << f.success_reward << ' ' << f.episode_steps << ' ' << f.joints << ' '
     << f.dt << ' ' << f.torque_gain << ' ' << f.joint_speed_gain << ' ' << c.env.drift_std << ' '
     << c.env.bandit_noise_std << '\n';
  os << "metrics " << c.metrics.mass << ' ' << c.metrics.gravity << ' '
     << static_cast<int>(c.metrics.cot_mode);
  for (double w : c.metrics.stability_weights.w) os << ' ' << w;
  os << "\nbudget " << c.budget << ' ' << c.target_fraction << '\n';
  return os.str();
}

}  // namespace hacl
