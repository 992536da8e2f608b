#include "hacl/checkpoint.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hacl {
namespace {

constexpr std::string_view kMagic = "HACL-CHECKPOINT";

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void check_key(std::string_view key) {
  if (key.empty() || key.find_first_of(" \t\n") != std::string_view::npos) {
    throw CheckpointFormatError("invalid checkpoint key '" + std::string(key) + "'");
  }
}

// Cursor over the file content with line/token helpers.
class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool at_end() const { return pos_ >= s_.size(); }

  std::string_view line() {
    if (at_end()) throw CheckpointTruncatedError("checkpoint ends before the end marker");
    const std::size_t nl = s_.find('\n', pos_);
    if (nl == std::string_view::npos) {
      throw CheckpointTruncatedError("checkpoint ends mid-line");
    }
    std::string_view out = s_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return out;
  }

  std::string_view bytes(std::size_t n) {
    if (s_.size() - pos_ < n + 1) throw CheckpointTruncatedError("checkpoint text block cut short");
    std::string_view out = s_.substr(pos_, n);
    pos_ += n;
    if (s_[pos_] != '\n') throw CheckpointFormatError("text block not newline-terminated");
    ++pos_;
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_u64(std::string_view tok) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw CheckpointFormatError("bad integer '" + std::string(tok) + "'");
  }
  return v;
}

bool parse_f64(std::string_view tok, double& out) {
  const std::string s(tok);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty();
}

}  // namespace

void CheckpointWriter::put_u64(std::string_view key, std::uint64_t value) {
  check_key(key);
  body_ += "u64 " + std::string(key) + " " + std::to_string(value) + "\n";
}

void CheckpointWriter::put_f64(std::string_view key, double value) {
  check_key(key);
  body_ += "f64 " + std::string(key) + " " + hex(value) + "\n";
}

void CheckpointWriter::put_tensor(std::string_view key, std::size_t rows, std::size_t cols,
                                  std::span<const double> values) {
  check_key(key);
  if (values.size() != rows * cols) {
    throw CheckpointShapeError("tensor " + std::string(key) + " has " +
                               std::to_string(values.size()) + " values for shape " +
                               std::to_string(rows) + "x" + std::to_string(cols));
  }
  body_ += "tensor " + std::string(key) + " " + std::to_string(rows) + " " +
           std::to_string(cols) + "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) body_ += ' ';
      body_ += hex(values[r * cols + c]);
    }
    body_ += '\n';
  }
}

void CheckpointWriter::put_text(std::string_view key, std::string_view text) {
  check_key(key);
  body_ += "text " + std::string(key) + " " + std::to_string(text.size()) + "\n";
  body_ += text;
  body_ += '\n';
}

std::string CheckpointWriter::str() const {
  return std::string(kMagic) + "\nversion " + std::to_string(kCheckpointVersion) + "\n" + body_ +
         "end\n";
}

void CheckpointWriter::save(const std::filesystem::path& path) const {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    const std::string s = str();
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw CheckpointError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

CheckpointReader CheckpointReader::parse(std::string_view content) {
  Cursor cur(content);
  if (cur.at_end()) throw CheckpointTruncatedError("empty checkpoint");
  if (cur.line() != kMagic) throw CheckpointFormatError("not a checkpoint file (bad magic)");
  {
    const auto tok = split(cur.line());
    if (tok.size() != 2 || tok[0] != "version") {
      throw CheckpointFormatError("missing checkpoint version header");
    }
    const std::uint64_t v = parse_u64(tok[1]);
    if (v != kCheckpointVersion) {
      throw CheckpointVersionError("checkpoint version " + std::to_string(v) +
                                   " is not supported (expected " +
                                   std::to_string(kCheckpointVersion) + ")");
    }
  }

  CheckpointReader r;
  for (;;) {
    const std::string_view line = cur.line();
    if (line == "end") break;
    const auto tok = split(line);
    if (tok.empty()) throw CheckpointFormatError("blank line in checkpoint");
    const std::string key = tok.size() > 1 ? std::string(tok[1]) : std::string();
    if (tok[0] == "u64" && tok.size() == 3) {
      r.u64_[key] = parse_u64(tok[2]);
    } else if (tok[0] == "f64" && tok.size() == 3) {
      double v = 0;
      if (!parse_f64(tok[2], v)) throw CheckpointFormatError("bad number for " + key);
      r.f64_[key] = v;
    } else if (tok[0] == "tensor" && tok.size() == 4) {
      Tensor t;
      t.rows = parse_u64(tok[2]);
      t.cols = parse_u64(tok[3]);
      t.values.reserve(t.rows * t.cols);
      for (std::size_t row = 0; row < t.rows; ++row) {
        const auto vals = split(cur.line());
        if (vals.size() != t.cols) {
          throw CheckpointShapeError("tensor " + key + " row " + std::to_string(row) + " has " +
                                     std::to_string(vals.size()) + " values, header says " +
                                     std::to_string(t.cols));
        }
        for (auto v : vals) {
          double x = 0;
          if (!parse_f64(v, x)) {
            throw CheckpointShapeError("tensor " + key + " holds fewer rows than its header");
          }
          t.values.push_back(x);
        }
      }
      r.tensors_[key] = std::move(t);
    } else if (tok[0] == "text" && tok.size() == 3) {
      r.text_[key] = std::string(cur.bytes(parse_u64(tok[2])));
    } else {
      throw CheckpointFormatError("unrecognized checkpoint record '" + std::string(line) + "'");
    }
  }
  if (!cur.at_end()) throw CheckpointFormatError("trailing data after end marker");
  return r;
}

CheckpointReader CheckpointReader::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool CheckpointReader::has(std::string_view key) const {
  return u64_.contains(key) || f64_.contains(key) || tensors_.contains(key) ||
         text_.contains(key);
}

std::uint64_t CheckpointReader::get_u64(std::string_view key) const {
  auto it = u64_.find(key);
  if (it == u64_.end()) throw CheckpointFormatError("checkpoint lacks u64 " + std::string(key));
  return it->second;
}

double CheckpointReader::get_f64(std::string_view key) const {
  auto it = f64_.find(key);
  if (it == f64_.end()) throw CheckpointFormatError("checkpoint lacks f64 " + std::string(key));
  return it->second;
}

std::vector<double> CheckpointReader::get_tensor(std::string_view key, std::size_t rows,
                                                 std::size_t cols) const {
  auto it = tensors_.find(key);
  if (it == tensors_.end()) {
    throw CheckpointFormatError("checkpoint lacks tensor " + std::string(key));
  }
  if (it->second.rows != rows || it->second.cols != cols) {
    throw CheckpointShapeError("tensor " + std::string(key) + " stored as " +
                               std::to_string(it->second.rows) + "x" +
                               std::to_string(it->second.cols) + ", expected " +
                               std::to_string(rows) + "x" + std::to_string(cols));
  }
  return it->second.values;
}

const std::string& CheckpointReader::get_text(std::string_view key) const {
  auto it = text_.find(key);
  if (it == text_.end()) throw CheckpointFormatError("checkpoint lacks text " + std::string(key));
  return it->second;
}

}  // namespace hacl
