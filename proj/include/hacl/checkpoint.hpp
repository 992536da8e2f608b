#pragma once

// Checkpoint file: a versioned, line-oriented key/value store.
//
//   HACL-CHECKPOINT
//   version 1
//   u64 <key> <decimal>
//   f64 <key> <hex-float>
//   tensor <key> <rows> <cols>
//   <rows * cols hex-floats, one row per line>
//   text <key> <byte-count>
//   <raw bytes>
//   end
//
// Doubles are written as C99 hex floats so every value round-trips bit-exactly.
// A reader parses the whole file before any value is handed out, so a failed
// load never leaves partially restored state behind.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hacl {

inline constexpr std::uint64_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointTruncatedError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointShapeError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Malformed content that is neither a version, truncation nor shape problem.
class CheckpointFormatError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointWriter {
 public:
  void put_u64(std::string_view key, std::uint64_t value);
  void put_f64(std::string_view key, double value);
  void put_tensor(std::string_view key, std::size_t rows, std::size_t cols,
                  std::span<const double> values);
  void put_text(std::string_view key, std::string_view text);

  std::string str() const;
  // Writes through a temporary file and renames it into place.
  void save(const std::filesystem::path& path) const;

 private:
  std::string body_;
};

class CheckpointReader {
 public:
  static CheckpointReader parse(std::string_view content);
  static CheckpointReader load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  double get_f64(std::string_view key) const;
  // Throws CheckpointShapeError if the stored shape differs from the expected one.
  std::vector<double> get_tensor(std::string_view key, std::size_t rows, std::size_t cols) const;
  const std::string& get_text(std::string_view key) const;

 private:
  struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
  };
  std::map<std::string, std::uint64_t, std::less<>> u64_;
  std::map<std::string, double, std::less<>> f64_;
  std::map<std::string, Tensor, std::less<>> tensors_;
  std::map<std::string, std::string, std::less<>> text_;
};

}  // namespace hacl
