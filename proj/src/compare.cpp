#include "hacl/compare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "hacl/errors.hpp"
#include "hacl/harness.hpp"

namespace hacl {

const std::vector<MetricSpec>& comparison_metrics() {
  static const std::vector<MetricSpec> metrics{
      {"episodes_to_target", MetricDirection::kLowerIsBetter},
      {"final_v_cap", MetricDirection::kHigherIsBetter},
      {"final_v_max_x", MetricDirection::kHigherIsBetter},
      {"mean_cot", MetricDirection::kLowerIsBetter},
      {"stability", MetricDirection::kHigherIsBetter},
      {"success_rate", MetricDirection::kHigherIsBetter},
      {"cumulative_regret", MetricDirection::kLowerIsBetter},
  };
  return metrics;
}

std::optional<double> metric_value(const RunSummary& s, const std::string& metric) {
  if (metric == "episodes_to_target") {
    return static_cast<double>(s.episodes_to_target.value_or(s.episodes + 1));
  }
  if (metric == "final_v_cap") return s.final_v_cap;
  if (metric == "final_v_max_x") return s.final_v_max_x;
  if (metric == "mean_cot") return s.mean_cot;
  if (metric == "stability") return s.stability;
  if (metric == "success_rate") return s.success.rate;
  if (metric == "cumulative_regret") return s.cumulative_regret;
  throw ArgumentError("unknown metric '" + metric + "'");
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ComparisonRow> tabulate(const std::vector<RunSummary>& runs) {
  std::vector<std::string> methods;
  for (const auto& r : runs) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& metric : comparison_metrics()) {
    const auto first = rows.size();
    for (const auto& m : methods) {
      std::vector<double> values;
      for (const auto& r : runs) {
        if (r.method != m) continue;
        if (auto v = metric_value(r, metric.name)) values.push_back(*v);
      }
      ComparisonRow row{m, metric.name, std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(), 0, values.size()};
      if (!values.empty()) {
        row.median = quantile(values, 0.5);
        row.iqr = quantile(values, 0.75) - quantile(values, 0.25);
      }
      rows.push_back(row);
    }
    // Rank by median, equal medians share a rank; undefined medians rank last.
    std::vector<std::size_t> order(rows.size() - first);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = first + i;
    const bool lower = metric.direction == MetricDirection::kLowerIsBetter;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double x = rows[a].median, y = rows[b].median;
      if (std::isnan(x) || std::isnan(y)) return !std::isnan(x) && std::isnan(y);
      return lower ? x < y : x > y;
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& prev = i > 0 ? rows[order[i - 1]] : rows[order[i]];
      const auto& cur = rows[order[i]];
      const bool tied = i > 0 && (prev.median == cur.median ||
                                  (std::isnan(prev.median) && std::isnan(cur.median)));
      rows[order[i]].rank = tied ? prev.rank : i + 1;
    }
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "method,metric,median,iqr,rank,n\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.method << ',' << r.metric << ',';
    if (!std::isnan(r.median)) {
      std::snprintf(buf, sizeof buf, "%.17g", r.median);
      os << buf;
    }
    os << ',';
    if (!std::isnan(r.iqr)) {
      std::snprintf(buf, sizeof buf, "%.17g", r.iqr);
      os << buf;
    }
    os << ',' << r.rank << ',' << r.n << '\n';
  }
  return os.str();
}

std::vector<RunSummary> sweep(const std::vector<ExperimentConfig>& configs,
                              const std::vector<std::uint64_t>& seeds,
                              const SweepOptions& options) {
  if (configs.empty()) throw ArgumentError("sweep needs at least one config");
  if (seeds.empty()) throw ArgumentError("sweep needs at least one seed");
  const std::string fingerprint = environment_fingerprint(configs.front());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (environment_fingerprint(configs[i]) != fingerprint) {
      throw ArgumentError("config '" + configs[i].name + "' runs a different task than '" +
                          configs.front().name + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (configs[j].name == configs[i].name) {
        throw ArgumentError("duplicate method name '" + configs[i].name + "'");
      }
    }
  }
  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

  const std::size_t jobs = configs.size() * seeds.size();
  std::vector<RunSummary> results(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const auto& config = configs[job / seeds.size()];
      const std::uint64_t seed = seeds[job % seeds.size()];
      try {
        RunOptions run;
        std::ofstream records;
        if (options.out_dir) {
          const std::string stem = config.name + "_seed" + std::to_string(seed);
          records.open(*options.out_dir / (stem + ".jsonl"));
          if (!records) throw ArgumentError("cannot write records for " + stem);
          run.records = &records;
          run.checkpoint_every = options.checkpoint_every;
          run.checkpoint_path = *options.out_dir / (stem + ".ckpt");
        }
        results[job] = run_experiment(config, seed, run);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::size_t threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, jobs);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<ComparisonRow> compare(const std::vector<ExperimentConfig>& configs,
                                   const std::vector<std::uint64_t>& seeds) {
  return tabulate(sweep(configs, seeds));
}

std::vector<RunSummary> read_summaries(const std::vector<std::filesystem::path>& files) {
  std::vector<RunSummary> runs;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != summary_csv_header()) {
      throw ArgumentError(path.string() + ": missing summary header");
    }
    while (std::getline(in, line)) {
      if (!line.empty()) runs.push_back(parse_summary_csv_row(line));
    }
  }
  return runs;
}

}  // namespace hacl
