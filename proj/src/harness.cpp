#include "hacl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "hacl/checkpoint.hpp"
#include "hacl/errors.hpp"
#include "json.hpp"

namespace hacl {
namespace {

std::unique_ptr<Environment> make_environment(const ExperimentConfig& c, Rng& init_rng) {
  if (c.env.kind == EnvKind::kFrontier) return std::make_unique<FrontierEnvironment>(c.env.frontier);
  return std::make_unique<DriftingBanditEnvironment>(c.grid.size(), c.env.drift_std,
                                                     c.env.bandit_noise_std,
                                                     c.env.frontier.success_reward, init_rng);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string RunRecord::to_json() const {
  nlohmann::ordered_json j;
  j["episode"] = episode;
  j["bin"] = bin.index;
  j["command"] = {command.v_x, command.v_y, command.omega_z};
  j["reward"] = {reward.r_lin, reward.r_ang};
  j["prediction"] = {prediction.r_hat_lin, prediction.r_hat_ang};
  j["utility"] = utility;
  j["observed_utility"] = observed_utility;
  j["weight"] = weight;
  j["v_max"] = {v_max[0], v_max[1], v_max[2]};
  j["v_cap"] = v_cap;
  j["omega_cap"] = omega_cap;
  j["success"] = success;
  j["regret"] = regret;
  j["loss"] = loss;
  j["clipped"] = clipped;
  if (wall_ms) j["wall_ms"] = *wall_ms;
  return j.dump();
}

RewardObservation RewardNormalizer::apply(const RewardObservation& raw) {
  max_lin = std::max(max_lin, raw.r_lin);
  max_ang = std::max(max_ang, raw.r_ang);
  return {std::clamp(raw.r_lin / std::max(floor, max_lin), 0.0, 1.0),
          std::clamp(raw.r_ang / std::max(floor, max_ang), 0.0, 1.0)};
}

RunAborted::RunAborted(std::uint64_t episode, const std::string& what)
    : std::runtime_error("run aborted at episode " + std::to_string(episode) + ": " + what),
      episode_(episode) {}

ExperimentConfig checkpoint_config(const CheckpointReader& in) {
  ExperimentConfig c = parse_config(in.get_text("config"));
  c.budget = in.get_u64("budget");
  validate(c);
  return c;
}

// --- Experiment ------------------------------------------------------------------

Experiment::Experiment(ExperimentConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      seed_(seed),
      sampler_rng_(make_stream(seed, "sampler")),
      command_rng_(make_stream(seed, "command")),
      env_rng_(make_stream(seed, "env")),
      scheduler_(config_.sampler, config_.grid.size()) {
  validate(config_);
  Rng predictor_init = make_stream(seed, "predictor-init");
  Rng env_init = make_stream(seed, "env-init");
  model_ = make_reward_model(config_.predictor, config_.grid.size(), predictor_init);
  env_ = make_environment(config_, env_init);
  normalizer_.floor = config_.reward_scale_floor;
  range_ = config_.range.range;
  range_.validate();
  active_ = bins_in_range(config_.grid, range_);
}

RunRecord Experiment::step() {
  if (done()) throw ArgumentError("experiment budget exhausted");
  const auto t0 = std::chrono::steady_clock::now();
  const double alpha = config_.sampler.utility.alpha;
  RunRecord rec;
  rec.episode = episode_;

  const BinId bin = scheduler_.select(active_, sampler_rng_);
  rec.bin = bin;
  rec.prediction = model_->predict(bin);

  const auto oracle = env_->expected_utilities(active_, config_.grid, range_, alpha);
  const auto pos = std::lower_bound(active_.begin(), active_.end(), bin) - active_.begin();
  rec.regret = std::max(0.0, *std::max_element(oracle.begin(), oracle.end()) -
                                 oracle[static_cast<std::size_t>(pos)]);

  rec.command = sample_command(bin, config_.grid, range_, command_rng_);
  EpisodeOutcome outcome = env_->run_episode(bin, rec.command, env_rng_);
  rec.reward = normalizer_.apply(outcome.reward);
  rec.success = outcome.success;

  const TrainResult train = model_->observe(bin, rec.reward);
  rec.loss = train.loss_before;
  rec.clipped = train.clipped;
  rec.utility = utility(model_->predict(bin), alpha);
  rec.observed_utility = utility({rec.reward.r_lin, rec.reward.r_ang}, alpha);
  scheduler_.record(bin, rec.utility, rec.observed_utility);
  rec.weight = scheduler_.weights().w[bin.index];

  if (outcome.trace.steps > 0) {
    if (auto cot = cost_of_transport(outcome.trace, config_.metrics.mass, config_.metrics.gravity,
                                     config_.metrics.cot_mode)) {
      cot_sum_ += *cot;
      ++cot_count_;
    }
  }
  if (outcome.components.steps > 0) {
    stability_sum_ += stability_score(outcome.components, config_.metrics.stability_weights);
    ++stability_count_;
  }
  if (outcome.success) ++successes_;
  cumulative_regret_ += rec.regret;

  success_window_.push_back(rec.observed_utility);
  if (success_window_.size() >= config_.range.success_window) {
    double mean = 0.0;
    for (double u : success_window_) mean += u;
    mean /= static_cast<double>(success_window_.size());
    const ActiveRange next = expand_range(range_, mean >= config_.range.success_threshold);
    if (next != range_) {
      range_ = next;
      active_ = bins_in_range(config_.grid, range_);
    }
    success_window_.clear();
  }

  ++episode_;
  if (!episodes_to_target_ && env_->kind() == EnvKind::kFrontier &&
      env_->v_cap() >= config_.target_fraction * config_.range.range.cap[0]) {
    episodes_to_target_ = episode_;
  }

  rec.v_max = range_.v_max;
  rec.v_cap = env_->v_cap();
  rec.omega_cap = env_->omega_cap();
  if (config_.record_wall_clock) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
  }
  return rec;
}

RunSummary Experiment::summary() const {
  RunSummary s;
  s.method = config_.name;
  s.seed = seed_;
  s.episodes = episode_;
  s.episodes_to_target = episodes_to_target_;
  s.final_v_cap = env_->v_cap();
  s.final_v_max_x = range_.v_max[0];
  if (cot_count_ > 0) s.mean_cot = cot_sum_ / static_cast<double>(cot_count_);
  if (stability_count_ > 0) s.stability = stability_sum_ / static_cast<double>(stability_count_);
  if (episode_ > 0) s.success = success_rate(successes_, episode_);
  s.cumulative_regret = cumulative_regret_;
  return s;
}

CheckpointWriter Experiment::checkpoint_writer() const {
  CheckpointWriter out;
  out.put_text("config", config_.source);
  out.put_u64("seed", seed_);
  out.put_u64("budget", config_.budget);
  out.put_u64("episode", episode_);
  out.put_u64("grid.x", config_.grid.bins(0));
  out.put_u64("grid.y", config_.grid.bins(1));
  out.put_u64("grid.z", config_.grid.bins(2));
  out.put_tensor("range.v_max", 3, 1, range_.v_max);
  out.put_tensor("range.cap", 3, 1, range_.cap);
  out.put_tensor("range.step", 3, 1, range_.step);
  out.put_text("rng.sampler", serialize_rng(sampler_rng_));
  out.put_text("rng.command", serialize_rng(command_rng_));
  out.put_text("rng.env", serialize_rng(env_rng_));
  scheduler_.save(out);
  model_->save(out);
  env_->save(out);
  out.put_f64("normalizer.max_lin", normalizer_.max_lin);
  out.put_f64("normalizer.max_ang", normalizer_.max_ang);
  out.put_u64("success_window.len", success_window_.size());
  out.put_tensor("success_window.values", success_window_.size(), 1, success_window_);
  out.put_u64("metrics.has_target", episodes_to_target_.has_value() ? 1 : 0);
  out.put_u64("metrics.episodes_to_target", episodes_to_target_.value_or(0));
  out.put_f64("metrics.cumulative_regret", cumulative_regret_);
  out.put_f64("metrics.cot_sum", cot_sum_);
  out.put_u64("metrics.cot_count", cot_count_);
  out.put_f64("metrics.stability_sum", stability_sum_);
  out.put_u64("metrics.stability_count", stability_count_);
  out.put_u64("metrics.successes", successes_);
  return out;
}

std::string Experiment::checkpoint_text() const { return checkpoint_writer().str(); }

void Experiment::save_checkpoint(const std::filesystem::path& path) const {
  checkpoint_writer().save(path);
}

void Experiment::load_checkpoint(const CheckpointReader& in) {
  // Restore into a fresh run so that a failure leaves *this untouched.
  Experiment fresh(config_, in.get_u64("seed"));
  const std::array<std::uint64_t, 3> bins{in.get_u64("grid.x"), in.get_u64("grid.y"),
                                          in.get_u64("grid.z")};
  for (std::size_t a = 0; a < kAxes; ++a) {
    if (bins[a] != fresh.config_.grid.bins(a)) {
      throw CheckpointShapeError("checkpoint grid differs from the configured grid");
    }
  }
  fresh.episode_ = in.get_u64("episode");
  const auto v_max = in.get_tensor("range.v_max", 3, 1);
  const auto cap = in.get_tensor("range.cap", 3, 1);
  const auto step = in.get_tensor("range.step", 3, 1);
  for (std::size_t a = 0; a < kAxes; ++a) {
    fresh.range_.v_max[a] = v_max[a];
    fresh.range_.cap[a] = cap[a];
    fresh.range_.step[a] = step[a];
  }
  fresh.range_.validate();
  fresh.active_ = bins_in_range(fresh.config_.grid, fresh.range_);
  fresh.sampler_rng_ = deserialize_rng(in.get_text("rng.sampler"));
  fresh.command_rng_ = deserialize_rng(in.get_text("rng.command"));
  fresh.env_rng_ = deserialize_rng(in.get_text("rng.env"));
  fresh.scheduler_.load(in);
  fresh.model_->load(in);
  fresh.env_->load(in);
  fresh.normalizer_.max_lin = in.get_f64("normalizer.max_lin");
  fresh.normalizer_.max_ang = in.get_f64("normalizer.max_ang");
  fresh.success_window_ =
      in.get_tensor("success_window.values", in.get_u64("success_window.len"), 1);
  if (in.get_u64("metrics.has_target") != 0) {
    fresh.episodes_to_target_ = in.get_u64("metrics.episodes_to_target");
  }
  fresh.cumulative_regret_ = in.get_f64("metrics.cumulative_regret");
  fresh.cot_sum_ = in.get_f64("metrics.cot_sum");
  fresh.cot_count_ = in.get_u64("metrics.cot_count");
  fresh.stability_sum_ = in.get_f64("metrics.stability_sum");
  fresh.stability_count_ = in.get_u64("metrics.stability_count");
  fresh.successes_ = in.get_u64("metrics.successes");
  *this = std::move(fresh);
}

Experiment Experiment::resume(const std::filesystem::path& checkpoint,
                              std::optional<ExperimentConfig> config) {
  const CheckpointReader in = CheckpointReader::load(checkpoint);
  ExperimentConfig cfg = config ? std::move(*config) : checkpoint_config(in);
  Experiment e(std::move(cfg), in.get_u64("seed"));
  e.load_checkpoint(in);
  return e;
}

// --- driver ----------------------------------------------------------------------

RunSummary continue_experiment(Experiment& experiment, const RunOptions& options) {
  while (!experiment.done()) {
    RunRecord rec;
    try {
      rec = experiment.step();
    } catch (const NumericError& e) {
      throw RunAborted(experiment.episode(), e.what());
    }
    if (options.records != nullptr) *options.records << rec.to_json() << '\n';
    if (options.checkpoint_every > 0 && experiment.episode() % options.checkpoint_every == 0) {
      experiment.save_checkpoint(options.checkpoint_path);
    }
  }
  return experiment.summary();
}

RunSummary run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                          const RunOptions& options) {
  Experiment experiment(config, seed);
  return continue_experiment(experiment, options);
}

// --- summary CSV -----------------------------------------------------------------

std::string summary_csv_header() {
  return "method,seed,episodes,episodes_to_target,final_v_cap,final_v_max_x,mean_cot,stability,"
         "success_rate,success_ci_lo,success_ci_hi,cumulative_regret";
}

std::string summary_csv_row(const RunSummary& s) {
  std::ostringstream os;
  os << s.method << ',' << s.seed << ',' << s.episodes << ',';
  if (s.episodes_to_target) os << *s.episodes_to_target;
  os << ',' << fmt(s.final_v_cap) << ',' << fmt(s.final_v_max_x) << ',';
  if (s.mean_cot) os << fmt(*s.mean_cot);
  os << ',' << fmt(s.stability) << ',' << fmt(s.success.rate) << ',' << fmt(s.success.ci_lo)
     << ',' << fmt(s.success.ci_hi) << ',' << fmt(s.cumulative_regret);
  return os.str();
}

RunSummary parse_summary_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != 12) throw ArgumentError("summary row has " + std::to_string(f.size()) + " fields");
  try {
    RunSummary s;
    s.method = f[0];
    s.seed = std::stoull(f[1]);
    s.episodes = std::stoull(f[2]);
    if (!f[3].empty()) s.episodes_to_target = std::stoull(f[3]);
    s.final_v_cap = std::stod(f[4]);
    s.final_v_max_x = std::stod(f[5]);
    if (!f[6].empty()) s.mean_cot = std::stod(f[6]);
    s.stability = std::stod(f[7]);
    s.success.rate = std::stod(f[8]);
    s.success.ci_lo = std::stod(f[9]);
    s.success.ci_hi = std::stod(f[10]);
    s.success.trials = s.episodes;
    s.cumulative_regret = std::stod(f[11]);
    return s;
  } catch (const std::logic_error&) {
    throw ArgumentError("malformed summary row: " + line);
  }
}

}  // namespace hacl
