// hacl: run, sweep, resume and report curriculum experiments.
//
// Exit codes: 0 success, 1 I/O or checkpoint error, 2 config or usage error,
// 3 numeric failure during a run.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hacl/checkpoint.hpp"
#include "hacl/compare.hpp"
#include "hacl/config.hpp"
#include "hacl/errors.hpp"
#include "hacl/harness.hpp"

namespace fs = std::filesystem;
using namespace hacl;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
  std::optional<std::uint64_t> budget;
  std::uint64_t checkpoint_every = 0;
  std::optional<fs::path> out;
};

void apply(ExperimentConfig& c, const Overrides& o) {
  if (o.budget) {
    c.budget = *o.budget;
    validate(c);
  }
  if (o.out) c.output_dir = o.out->string();
}

std::string stem(const ExperimentConfig& c, std::uint64_t seed) {
  return c.name + "_seed" + std::to_string(seed);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path.string());
}

void print_summaries(const std::vector<RunSummary>& runs) {
  std::cout << summary_csv_header() << '\n';
  for (const auto& r : runs) std::cout << summary_csv_row(r) << '\n';
}

std::string summaries_csv(const std::vector<RunSummary>& runs) {
  std::string text = summary_csv_header() + "\n";
  for (const auto& r : runs) text += summary_csv_row(r) + "\n";
  return text;
}

int cmd_run(const fs::path& config_path, std::optional<std::uint64_t> seed_flag,
            const Overrides& o) {
  ExperimentConfig c = load_config(config_path);
  apply(c, o);
  const std::uint64_t seed = seed_flag.value_or(c.seeds.front());
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  std::ofstream records(dir / (stem(c, seed) + ".jsonl"));
  if (!records) throw std::runtime_error("cannot write to " + dir.string());
  RunOptions run{&records, o.checkpoint_every, dir / (stem(c, seed) + ".ckpt")};
  const RunSummary s = run_experiment(c, seed, run);
  write_file(dir / (stem(c, seed) + "_summary.csv"), summaries_csv({s}));
  print_summaries({s});
  return 0;
}

int cmd_sweep(const std::vector<fs::path>& config_paths, const std::vector<std::uint64_t>& seed_flags,
              const Overrides& o, std::size_t threads) {
  std::vector<ExperimentConfig> configs;
  for (const auto& p : config_paths) {
    configs.push_back(load_config(p));
    apply(configs.back(), o);
  }
  const std::vector<std::uint64_t> seeds = seed_flags.empty() ? configs.front().seeds : seed_flags;
  const fs::path dir = configs.front().output_dir;
  SweepOptions options{dir, threads, o.checkpoint_every};
  const auto runs = sweep(configs, seeds, options);
  write_file(dir / "summary.csv", summaries_csv(runs));
  write_file(dir / "comparison.csv", comparison_csv(tabulate(runs)));
  print_summaries(runs);
  return 0;
}

// Keeps the first `episodes` lines of an existing record stream so that rows
// written after the checkpoint are replaced by the resumed run.
void truncate_records(const fs::path& path, std::uint64_t episodes) {
  std::string kept;
  if (std::ifstream in(path); in) {
    std::string line;
    for (std::uint64_t i = 0; i < episodes && std::getline(in, line); ++i) kept += line + "\n";
  }
  write_file(path, kept);
}

int cmd_resume(const fs::path& checkpoint, const std::optional<fs::path>& config_path,
               const Overrides& o) {
  const CheckpointReader in = CheckpointReader::load(checkpoint);
  ExperimentConfig c = config_path ? load_config(*config_path) : checkpoint_config(in);
  apply(c, o);
  Experiment e(c, in.get_u64("seed"));
  e.load_checkpoint(in);
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  const fs::path records_path = dir / (stem(c, e.seed()) + ".jsonl");
  truncate_records(records_path, e.episode());
  std::ofstream records(records_path, std::ios::app);
  RunOptions run{&records, o.checkpoint_every, checkpoint};
  const RunSummary s = continue_experiment(e, run);
  write_file(dir / (stem(c, e.seed()) + "_summary.csv"), summaries_csv({s}));
  print_summaries({s});
  return 0;
}

int cmd_report(const std::vector<fs::path>& files, const std::optional<fs::path>& out) {
  const std::string table = comparison_csv(tabulate(read_summaries(files)));
  if (out) {
    fs::create_directories(*out);
    write_file(*out / "comparison.csv", table);
  }
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"History-aware curriculum experiments"};
  app.require_subcommand(1);

  Overrides o;
  fs::path config;
  std::vector<fs::path> configs;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  fs::path checkpoint;
  std::optional<fs::path> resume_config;
  std::vector<fs::path> summaries;
  std::size_t threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory (overrides output.dir)");
    sub->add_option("--budget", o.budget, "Episode budget (overrides run.budget)");
    sub->add_option("--checkpoint-every", o.checkpoint_every, "Episodes between checkpoints");
  };

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Root seed (default: first of run.seeds)");
  add_common(run);

  auto* sw = app.add_subcommand("sweep", "Run methods x seeds and rank the methods");
  sw->add_option("--config", configs, "Config file, one per method")->required()
      ->check(CLI::ExistingFile);
  sw->add_option("--seed", seeds, "Seeds (default: run.seeds of the first config)");
  sw->add_option("--threads", threads, "Worker threads (0: all cores)");
  add_common(sw);

  auto* rs = app.add_subcommand("resume", "Continue a run from a checkpoint");
  rs->add_option("checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  rs->add_option("--config", resume_config, "Config file (default: the one in the checkpoint)");
  add_common(rs);

  auto* rp = app.add_subcommand("report", "Aggregate summary CSVs into a comparison table");
  rp->add_option("summaries", summaries, "Summary CSV files")->required()->check(CLI::ExistingFile);
  rp->add_option("--out", o.out, "Directory for comparison.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config, seed, o);
    if (sw->parsed()) return cmd_sweep(configs, seeds, o, threads);
    if (rs->parsed()) return cmd_resume(checkpoint, resume_config, o);
    return cmd_report(summaries, o.out);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << '\n';
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RunAborted& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
