// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unistd.h>

namespace svabench::testing {

// The two arbiter assertions of the worked example: P1 holds, P2 is refuted.
inline constexpr const char* kArbiterP1 =
    "assert property (@(posedge clk) (req1 == 1 && req2 == 0) |-> (gnt1 == 1));";
inline constexpr const char* kArbiterP2 =
    "assert property (@(posedge clk) (req2 == 0 && gnt_ == 1) ##1 (req1 == 1) |=> (gnt1 == 1));";

inline std::filesystem::path source_dir() { return SVABENCH_SOURCE_DIR; }
inline std::filesystem::path bundled_root() { return source_dir() / "benchmarks" / "bundled"; }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string test_design(const std::string& name) {
  return read_text(bundled_root() / "test" / name / (name + ".v"));
}

inline std::string train_design(const std::string& name) {
  return read_text(bundled_root() / "train" / name / (name + ".v"));
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("svabench-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace svabench::testing
