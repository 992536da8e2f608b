#pragma once

// Multi-seed sweeps and the per-method comparison table.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hacl/config.hpp"
#include "hacl/metrics.hpp"

namespace hacl {

enum class MetricDirection { kLowerIsBetter, kHigherIsBetter };

struct MetricSpec {
  std::string name;
  MetricDirection direction;
};

// Metrics reported in the comparison table, in output order.
const std::vector<MetricSpec>& comparison_metrics();

// Value of `metric` for one run. A run that never reached the target counts as
// episodes + 1 for episodes_to_target. Empty for an undefined cost of transport.
std::optional<double> metric_value(const RunSummary& s, const std::string& metric);

struct ComparisonRow {
  std::string method;
  std::string metric;
  double median = 0.0;
  double iqr = 0.0;
  std::size_t rank = 0;  // 1 = best median for this metric; ties share a rank
  std::size_t n = 0;     // runs with a defined value
};

// Linear-interpolated quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);

// One row per (method, metric), methods in first-appearance order.
std::vector<ComparisonRow> tabulate(const std::vector<RunSummary>& runs);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);

struct SweepOptions {
  std::optional<std::filesystem::path> out_dir;  // per-run JSONL goes here when set
  std::size_t threads = 0;                       // 0: hardware concurrency
  std::uint64_t checkpoint_every = 0;
};

// Runs every (config, seed) pair. Configs must share an environment fingerprint
// and have distinct names; otherwise throws ArgumentError. Results are ordered
// by config, then seed, independent of thread scheduling.
std::vector<RunSummary> sweep(const std::vector<ExperimentConfig>& configs,
                              const std::vector<std::uint64_t>& seeds,
                              const SweepOptions& options = {});

std::vector<ComparisonRow> compare(const std::vector<ExperimentConfig>& configs,
                                   const std::vector<std::uint64_t>& seeds);

// Reads summary CSV files written by a sweep (header line first).
std::vector<RunSummary> read_summaries(const std::vector<std::filesystem::path>& files);

}  // namespace hacl
