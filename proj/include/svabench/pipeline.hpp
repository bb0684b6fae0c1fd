// SPDX-License-Identifier: Apache-2.0
//
// k-shot prompting, generation with retry, one-round syntax correction and
// per-design evaluation records.
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "svabench/checker.hpp"
#include "svabench/llm_client.hpp"

namespace svabench {

/// One in-context example: a stripped design and its verified assertions.
struct IceTuple {
  std::string name;
  std::string design_text;
  std::vector<std::string> assertions;

  bool operator==(const IceTuple&) const = default;
};

extern const std::string_view kDefaultTaskDescription;
extern const std::string_view kCorrectionInstruction;

struct Prompt {
  std::string task_description;
  std::vector<IceTuple> examples;
  std::string test_program;

  /// Description, then `Program i:` / `Assertions i:` per example, then
  /// `Test Program:`. Sections are separated by a blank line.
  std::string render() const;
};

/// Throws EmptyExampleSet for k = 0 unless `allow_zero_shot`.
Prompt build_prompt(std::string task_description, std::vector<IceTuple> ices, std::string test_design,
                    bool allow_zero_shot = false);

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleep_for
  std::function<void(int attempt, const std::string& error)> on_retry;
};

struct Completion {
  std::string text;
  int attempts = 0;
  std::optional<TokenUsage> usage;
};

/// Sends `request`, retrying retryable TransportErrors with exponential
/// backoff. Throws ModelRefusal on an empty (all-whitespace) completion.
Completion complete_with_retry(ChatClient& client, const ChatRequest& request, const RetryPolicy& retry);

Completion generate(ChatClient& client, const Prompt& prompt, const GenParams& params, const std::string& tag,
                    const RetryPolicy& retry = {});

struct Correction {
  std::string text;      // first assertion in the reply, or the input
  bool extracted = false;
  Completion completion;
};

/// One correction round: instruction, assertion and parser message.
Correction correct_syntax(ChatClient& client, const std::string& assertion_text, const std::string& parser_error,
                          const GenParams& params, const std::string& tag, const RetryPolicy& retry = {});

struct EvaluatedAssertion {
  std::string text;      // text that was checked
  std::string original;  // extracted text; differs from `text` only if corrected
  bool corrected = false;
  Verdict verdict;
};

struct StageTimings {
  double strip_ms = 0;
  double prompt_ms = 0;
  double generate_ms = 0;
  double correct_ms = 0;
  double check_ms = 0;
};

enum class RecordStatus {
  Ok,
  NoOutput,        // empty completion
  TransportError,  // generation failed after retries; design skipped
  Unsupported,     // design did not parse or elaborate
};

std::string_view to_string(RecordStatus status);
std::optional<RecordStatus> record_status_from_string(std::string_view text);

struct EvalRecord {
  std::string design;
  std::string model_id;
  int k = 0;
  RecordStatus status = RecordStatus::Ok;
  std::string error;
  std::string raw_output;
  std::vector<EvaluatedAssertion> assertions;
  int llm_calls = 0;
  TokenUsage tokens;
  StageTimings timings;
};

nlohmann::ordered_json to_json(const EvalRecord& record);
/// Inverse of to_json, except Cex traces are not restored.
EvalRecord record_from_json(const nlohmann::json& doc);

struct PipelineConfig {
  std::string task_description{kDefaultTaskDescription};
  GenParams params;
  CheckConfig check;
  RetryPolicy retry;
  bool allow_zero_shot = false;
  bool record_timings = true;  // off for bit-reproducible replay runs
};

/// strip -> prompt -> generate -> extract -> parse (correct once on a
/// syntax error) -> desugar -> check. Transport failures and unusable
/// designs come back as records with a non-Ok status.
EvalRecord run_pipeline(const std::string& design_name, std::string_view design_source,
                        const std::vector<IceTuple>& ices, ChatClient& client, const PipelineConfig& cfg);

std::string generation_tag(std::string_view design, int k);
std::string correction_tag(std::string_view design, int k, std::size_t index);

}  // namespace svabench
