// SPDX-License-Identifier: Apache-2.0
//
// On-disk benchmark layout:
//
//   <root>/{train,test}/<name>/<name>.v      design
//                             /<name>.sva    golden assertions (optional in test/)
//                             /<name>.json   {kind, description, source}
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svabench/checker.hpp"
#include "svabench/errors.hpp"
#include "svabench/pipeline.hpp"

namespace svabench {

enum class DesignKind { Combinational, Sequential };

std::string_view to_string(DesignKind kind);

struct BenchmarkEntry {
  std::string name;
  std::filesystem::path design_path;
  DesignKind design_kind = DesignKind::Combinational;
  std::vector<std::string> golden_assertions;
  int line_count = 0;  // blank and comment-only lines excluded
  std::string description;
  std::string source;
  std::optional<DesignKind> declared_kind;  // from metadata
  std::string unsupported;                  // frontend error; empty when the design parses

  bool supported() const { return unsupported.empty(); }
  bool operator==(const BenchmarkEntry&) const = default;
};

struct Benchmark {
  std::filesystem::path root;
  std::vector<BenchmarkEntry> train;  // sorted by name
  std::vector<BenchmarkEntry> test;   // sorted by name

  const BenchmarkEntry* find(std::string_view name) const;
  bool operator==(const Benchmark&) const = default;
};

/// Throws MissingDirectory, DuplicateName, UnreadableFile.
Benchmark load_benchmark(const std::filesystem::path& root);

/// Lines with code after removing `//` and `/* */` comments.
int count_code_lines(std::string_view source);

struct AssertionStats {
  std::string scope;
  int designs = 0;
  int min = 0;
  int max = 0;
  double mean = 0;
};

struct Violation {
  std::string design;
  std::string message;
};

struct EntryReport {
  std::string name;
  std::string split;
  DesignKind kind = DesignKind::Combinational;
  int line_count = 0;
  int golden = 0;
  int pass = 0;
  std::vector<std::string> notes;  // e.g. "verify-skipped: budget"
};

struct ValidationReport {
  std::vector<EntryReport> entries;
  std::vector<Violation> violations;
  AssertionStats ice_pool;     // train designs
  AssertionStats all_golden;   // every design with a golden set

  bool ok() const { return violations.empty(); }
  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

inline constexpr int kMinGoldenPerDesign = 2;
inline constexpr int kMaxGoldenPerDesign = 10;
inline constexpr double kReferenceMeanGolden = 4.8;

ValidationReport validate(const Benchmark& b, const CheckConfig& cfg = {});

/// k training designs chosen with `seed`, returned in name order.
/// Throws InsufficientExamples when k exceeds the pool.
std::vector<IceTuple> select_ices(const Benchmark& b, std::size_t k, std::uint64_t seed);

IceTuple make_ice(const BenchmarkEntry& entry);

/// Seeded Fisher-Yates on a 64-bit Mersenne Twister (portable, unlike
/// std::shuffle).
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

/// Seeded shuffle, then the first floor(fraction * N) items go to train.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::vector<T> entries, double train_fraction, std::uint64_t seed) {
  if (entries.empty()) throw EmptyInput("nothing to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  seeded_shuffle(entries, seed);
  // Tolerance keeps e.g. 0.29 * 100 from flooring to 28.
  auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(entries.size()) + 1e-9));
  std::vector<T> test(std::make_move_iterator(entries.begin() + static_cast<std::ptrdiff_t>(n_train)),
                      std::make_move_iterator(entries.end()));
  entries.resize(n_train);
  return {std::move(entries), std::move(test)};
}

}  // namespace svabench
