// SPDX-License-Identifier: Apache-2.0
//
// Pass/Fail/Error metrics over evaluation records, with CSV, JSON and
// grouped-bar plot data output.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "svabench/pipeline.hpp"

namespace svabench {

struct OutcomeCounts {
  int pass = 0;
  int fail = 0;
  int error = 0;

  int total() const { return pass + fail + error; }
  void add(Outcome o);
  bool operator==(const OutcomeCounts&) const = default;
};

struct MetricsSummary {
  std::string model_id;
  int k = 0;
  OutcomeCounts counts;
  double pass_frac = 0;
  double fail_frac = 0;
  double error_frac = 0;
  std::map<std::string, OutcomeCounts> per_design;
  std::vector<std::string> no_output;  // designs that yielded no assertions, sorted

  bool operator==(const MetricsSummary&) const = default;
};

/// One summary per (model, k), ordered by model then k. Fractions are over
/// extracted assertions; Vacuous counts as pass.
std::vector<MetricsSummary> aggregate(const std::vector<EvalRecord>& records);

inline constexpr std::string_view kCsvHeader = "model,k,pass,fail,error,pass_frac,fail_frac,error_frac";

/// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

std::string to_csv(const std::vector<MetricsSummary>& summaries);
nlohmann::ordered_json to_json(const std::vector<MetricsSummary>& summaries);
/// Grouped bars: category = model, group = k, series = pass/fail/error.
nlohmann::ordered_json to_plotdata(const std::vector<MetricsSummary>& summaries);

enum class ReportFormat { Json, Csv, PlotData };

/// Writes `metrics.json`, `metrics.csv` or `plotdata.json` under `dir`
/// atomically. Throws IoError.
std::filesystem::path emit(const std::vector<MetricsSummary>& summaries, ReportFormat format,
                           const std::filesystem::path& dir);

/// Writes via a sibling temporary file and rename. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct Delta {
  double baseline = 0;
  double candidate = 0;
  std::optional<double> relative_pct;  // nullopt when the baseline is 0

  std::string describe() const;
};

struct DeltaEntry {
  std::string model_id;  // candidate model
  std::string baseline_model_id;
  int k = 0;
  Delta pass;
  Delta fail;
  Delta error;
};

struct DeltaReport {
  std::vector<DeltaEntry> entries;

  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

Delta relative_delta(double baseline, double candidate);

/// Pairs summaries by (model, k); `pairing` maps a candidate model id to the
/// baseline model id it should be compared against (e.g. a fine-tuned
/// model and its base). Throws KeyMismatch unless the key sets agree.
DeltaReport compare(const std::vector<MetricsSummary>& baseline, const std::vector<MetricsSummary>& candidate,
                    const std::map<std::string, std::string>& pairing = {});

/// Reads `records.jsonl`. Throws IoError on unreadable or malformed input.
std::vector<EvalRecord> read_records(const std::filesystem::path& path);

}  // namespace svabench
