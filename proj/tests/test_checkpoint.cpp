#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hacl/checkpoint.hpp"
#include "hacl/harness.hpp"

using namespace hacl;

namespace {

ExperimentConfig small(const std::string& extra = "") {
  return parse_config("run.budget = 120\nrange.success_window = 10\n" + extra);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Records from an uninterrupted run against records from a run split at
// `cut` and restored from its checkpoint text.
void check_resume(const ExperimentConfig& config, std::uint64_t cut) {
  std::ostringstream full;
  run_experiment(config, 17, {&full});

  Experiment first(config, 17);
  std::ostringstream split;
  for (std::uint64_t i = 0; i < cut; ++i) split << first.step().to_json() << '\n';
  const std::string text = first.checkpoint_text();

  Experiment resumed(config, 99);  // state is fully replaced by the checkpoint
  resumed.load_checkpoint(CheckpointReader::parse(text));
  CHECK(resumed.episode() == cut);
  CHECK(resumed.checkpoint_text() == text);
  const RunSummary s = continue_experiment(resumed, {&split});
  CHECK(lines(split.str()) == lines(full.str()));
  CHECK(summary_csv_row(s) == summary_csv_row(run_experiment(config, 17)));
}

}  // namespace

TEST_CASE("values round-trip bit-exactly") {
  const std::vector<double> values{0.1, -0.0, 1e-310, std::numeric_limits<double>::max(),
                                   -3.141592653589793, 1.0 / 3.0};
  CheckpointWriter w;
  w.put_u64("n", 18446744073709551615ull);
  w.put_f64("x", 0.1 + 0.2);
  w.put_tensor("t", 2, 3, values);
  w.put_text("s", "two\nlines = here\n");
  const auto r = CheckpointReader::parse(w.str());
  CHECK(r.get_u64("n") == 18446744073709551615ull);
  CHECK(std::bit_cast<std::uint64_t>(r.get_f64("x")) == std::bit_cast<std::uint64_t>(0.1 + 0.2));
  const auto t = r.get_tensor("t", 2, 3);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(t[i]) == std::bit_cast<std::uint64_t>(values[i]));
  }
  CHECK(r.get_text("s") == "two\nlines = here\n");
  CHECK(r.has("x"));
  CHECK_FALSE(r.has("y"));
  CHECK_THROWS_AS(r.get_f64("y"), CheckpointFormatError);
}

TEST_CASE("distinct load errors") {
  Experiment e(small(), 3);
  for (int i = 0; i < 30; ++i) e.step();
  const std::string good = e.checkpoint_text();

  std::string wrong_version = good;
  wrong_version.replace(wrong_version.find("version 1"), 9, "version 2");
  CHECK_THROWS_AS(CheckpointReader::parse(wrong_version), CheckpointVersionError);

  CHECK_THROWS_AS(CheckpointReader::parse(good.substr(0, good.size() / 2)), CheckpointTruncatedError);
  CHECK_THROWS_AS(CheckpointReader::parse(good.substr(0, good.size() - 4)), CheckpointTruncatedError);

  std::string bad_header = good;
  bad_header[2] = 'X';
  CHECK_THROWS_AS(CheckpointReader::parse(bad_header), CheckpointFormatError);

  const auto reader = CheckpointReader::parse(good);
  CHECK_THROWS_AS(reader.get_tensor("predictor.recur", 3, 3), CheckpointShapeError);
  Experiment other(small("predictor.hidden = 16\n"), 3);
  CHECK_THROWS_AS(other.load_checkpoint(reader), CheckpointShapeError);
  Experiment coarse(small("grid.bins = 10, 10, 10\n"), 3);
  CHECK_THROWS_AS(coarse.load_checkpoint(reader), CheckpointShapeError);
}

TEST_CASE("a failed load leaves the run untouched") {
  Experiment e(small(), 4);
  for (int i = 0; i < 25; ++i) e.step();
  const std::string before = e.checkpoint_text();

  Experiment donor(small("predictor.hidden = 8\n"), 4);
  const auto mismatched = CheckpointReader::parse(donor.checkpoint_text());
  CHECK_THROWS(e.load_checkpoint(mismatched));
  CHECK(e.checkpoint_text() == before);

  std::string corrupt = before;
  corrupt.replace(0, 15, "NOT-A-CHECKPOINT");
  CHECK_THROWS(e.load_checkpoint(CheckpointReader::parse(corrupt)));
  CHECK(e.checkpoint_text() == before);
}

TEST_CASE("resume equals the uninterrupted run") {
  check_resume(small(), 37);
  check_resume(small("predictor.kind = feedforward\n"), 50);
  check_resume(small("sampler.kind = thompson\nenv.kind = drifting_bandit\nrange.initial = 7, 1, 5\n"),
               41);
  check_resume(small("sampler.kind = ucb\nenv.kind = drifting_bandit\nrange.initial = 7, 1, 5\n"), 1);
  check_resume(small("sampler.kind = fixed_grid\n"), 119);
}

TEST_CASE("file round trip and resume from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "hacl_checkpoint_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "run.ckpt";
  const ExperimentConfig config = small();

  std::ostringstream full;
  run_experiment(config, 5, {&full});

  std::ostringstream part;
  Experiment e(config, 5);
  for (int i = 0; i < 60; ++i) part << e.step().to_json() << '\n';
  e.save_checkpoint(path);
  CHECK_FALSE(std::filesystem::exists(dir / "run.ckpt.tmp"));

  Experiment resumed = Experiment::resume(path);
  continue_experiment(resumed, {&part});
  CHECK(part.str() == full.str());
  std::filesystem::remove_all(dir);
}

TEST_CASE("periodic checkpoints during a run") {
  const auto dir = std::filesystem::temp_directory_path() / "hacl_periodic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "p.ckpt";
  run_experiment(small(), 6, {nullptr, 50, path});
  const auto r = CheckpointReader::load(path);
  CHECK(r.get_u64("episode") == 100);
  std::filesystem::remove_all(dir);
}
