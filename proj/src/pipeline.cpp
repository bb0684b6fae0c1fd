// SPDX-License-Identifier: Apache-2.0
#include "svabench/pipeline.hpp"

#include <cctype>
#include <thread>
#include <variant>

#include "svabench/assertion.hpp"
#include "svabench/errors.hpp"
#include "svabench/transition_system.hpp"
#include "svabench/verilog.hpp"

namespace svabench {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

bool blank(std::string_view text) {
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

class StageClock {
 public:
  explicit StageClock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  /// Milliseconds since construction or the previous lap.
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return enabled_ ? ms : 0.0;
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

void add_usage(TokenUsage& total, const std::optional<TokenUsage>& usage) {
  if (!usage) return;
  total.prompt_tokens += usage->prompt_tokens;
  total.completion_tokens += usage->completion_tokens;
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json out;
  out["kind"] = to_string(v.kind);
  out["outcome"] = to_string(classify(v));
  out["error"] = to_string(v.error);
  out["detail"] = v.detail;
  if (v.trace) out["trace"] = ordered_json::parse(trace_to_json(*v.trace));
  return out;
}

Verdict verdict_from_json(const json& doc) {
  Verdict v;
  auto kind = verdict_kind_from_string(doc.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown verdict kind " + doc.at("kind").dump());
  v.kind = *kind;
  v.error = error_class_from_string(doc.value("error", "none")).value_or(ErrorClass::Internal);
  v.detail = doc.value("detail", "");
  return v;
}

}  // namespace

std::string generation_tag(std::string_view design, int k) {
  return "gen/" + std::string(design) + "/k" + std::to_string(k);
}

std::string correction_tag(std::string_view design, int k, std::size_t index) {
  return "fix/" + std::string(design) + "/k" + std::to_string(k) + "/" + std::to_string(index);
}

Completion complete_with_retry(ChatClient& client, const ChatRequest& request, const RetryPolicy& retry) {
  auto backoff = retry.initial_backoff;
  const int attempts = std::max(1, retry.attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      ChatResponse res = client.complete(request);
      if (blank(res.text)) throw ModelRefusal("empty completion for " + request.tag);
      return {std::move(res.text), attempt, res.usage};
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= attempts) {
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt) + " attempt" +
                                 (attempt == 1 ? "" : "s") + ")",
                             false, e.status());
      }
      if (retry.on_retry) retry.on_retry(attempt, e.what());
      if (retry.sleep) {
        retry.sleep(backoff);
      } else {
        std::this_thread::sleep_for(backoff);
      }
      backoff = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(backoff.count()) * retry.multiplier));
    }
  }
}

Completion generate(ChatClient& client, const Prompt& prompt, const GenParams& params, const std::string& tag,
                    const RetryPolicy& retry) {
  return complete_with_retry(client, {tag, prompt.render(), params}, retry);
}

Correction correct_syntax(ChatClient& client, const std::string& assertion_text, const std::string& parser_error,
                          const GenParams& params, const std::string& tag, const RetryPolicy& retry) {
  std::string prompt = std::string(kCorrectionInstruction) + "\n\nAssertion:\n" + assertion_text +
                       "\n\nParser error:\n" + parser_error + "\n";
  Correction out;
  out.completion = complete_with_retry(client, {tag, std::move(prompt), params}, retry);
  auto found = extract_assertions(out.completion.text);
  if (found.empty()) {
    out.text = assertion_text;
  } else {
    out.text = found.front();
    out.extracted = true;
  }
  return out;
}

std::string_view to_string(RecordStatus status) {
  switch (status) {
    case RecordStatus::Ok: return "ok";
    case RecordStatus::NoOutput: return "no-output";
    case RecordStatus::TransportError: return "transport-error";
    case RecordStatus::Unsupported: return "unsupported";
  }
  return "ok";
}

std::optional<RecordStatus> record_status_from_string(std::string_view text) {
  for (auto s : {RecordStatus::Ok, RecordStatus::NoOutput, RecordStatus::TransportError, RecordStatus::Unsupported}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

ordered_json to_json(const EvalRecord& r) {
  ordered_json out;
  out["design"] = r.design;
  out["model"] = r.model_id;
  out["k"] = r.k;
  out["status"] = to_string(r.status);
  out["error"] = r.error;
  out["raw_output"] = r.raw_output;
  ordered_json list = ordered_json::array();
  for (const auto& a : r.assertions) {
    ordered_json item;
    item["text"] = a.text;
    item["original"] = a.original;
    item["corrected"] = a.corrected;
    item["verdict"] = verdict_json(a.verdict);
    list.push_back(std::move(item));
  }
  out["assertions"] = std::move(list);
  out["llm_calls"] = r.llm_calls;
  out["tokens"] = {{"prompt", r.tokens.prompt_tokens}, {"completion", r.tokens.completion_tokens}};
  out["timing_ms"] = {{"strip", r.timings.strip_ms},
                      {"prompt", r.timings.prompt_ms},
                      {"generate", r.timings.generate_ms},
                      {"correct", r.timings.correct_ms},
                      {"check", r.timings.check_ms}};
  return out;
}

EvalRecord record_from_json(const json& doc) {
  EvalRecord r;
  r.design = doc.at("design").get<std::string>();
  r.model_id = doc.at("model").get<std::string>();
  r.k = doc.at("k").get<int>();
  auto status = record_status_from_string(doc.value("status", "ok"));
  if (!status) throw std::invalid_argument("unknown record status " + doc.at("status").dump());
  r.status = *status;
  r.error = doc.value("error", "");
  r.raw_output = doc.value("raw_output", "");
  for (const auto& item : doc.value("assertions", json::array())) {
    EvaluatedAssertion a;
    a.text = item.at("text").get<std::string>();
    a.original = item.value("original", a.text);
    a.corrected = item.value("corrected", false);
    a.verdict = verdict_from_json(item.at("verdict"));
    r.assertions.push_back(std::move(a));
  }
  r.llm_calls = doc.value("llm_calls", 0);
  if (auto t = doc.find("tokens"); t != doc.end()) {
    r.tokens = {t->value("prompt", 0), t->value("completion", 0)};
  }
  if (auto t = doc.find("timing_ms"); t != doc.end()) {
    r.timings = {t->value("strip", 0.0), t->value("prompt", 0.0), t->value("generate", 0.0),
                 t->value("correct", 0.0), t->value("check", 0.0)};
  }
  return r;
}

EvalRecord run_pipeline(const std::string& design_name, std::string_view design_source,
                        const std::vector<IceTuple>& ices, ChatClient& client, const PipelineConfig& cfg) {
  EvalRecord record;
  record.design = design_name;
  record.model_id = cfg.params.model_id;
  record.k = static_cast<int>(ices.size());
  StageClock clock(cfg.record_timings);

  std::optional<TransitionSystem> ts;
  std::string stripped;
  try {
    stripped = strip_for_prompt(design_source);
    ts = elaborate(parse_design(design_source));
  } catch (const Error& e) {
    record.status = RecordStatus::Unsupported;
    record.error = e.what();
    return record;
  }
  record.timings.strip_ms = clock.lap();

  Prompt prompt = build_prompt(cfg.task_description, ices, std::move(stripped), cfg.allow_zero_shot);
  record.timings.prompt_ms = clock.lap();

  try {
    ++record.llm_calls;
    Completion c = generate(client, prompt, cfg.params, generation_tag(design_name, record.k), cfg.retry);
    add_usage(record.tokens, c.usage);
    record.raw_output = std::move(c.text);
  } catch (const ModelRefusal& e) {
    record.status = RecordStatus::NoOutput;
    record.error = e.what();
    record.timings.generate_ms = clock.lap();
    return record;
  } catch (const TransportError& e) {
    record.status = RecordStatus::TransportError;
    record.error = e.what();
    record.timings.generate_ms = clock.lap();
    return record;
  }
  record.timings.generate_ms = clock.lap();

  const Checker checker(std::move(*ts), cfg.check);
  const auto extracted = extract_assertions(record.raw_output);
  for (std::size_t i = 0; i < extracted.size(); ++i) {
    EvaluatedAssertion item;
    item.original = extracted[i];
    item.text = extracted[i];
    auto parsed = parse_assertion(item.text);

    if (const auto* err = std::get_if<SyntaxError>(&parsed)) {
      StageClock fix_clock(cfg.record_timings);
      try {
        ++record.llm_calls;
        Correction fix = correct_syntax(client, item.text, describe(*err), cfg.params,
                                        correction_tag(design_name, record.k, i), cfg.retry);
        add_usage(record.tokens, fix.completion.usage);
        if (fix.extracted) {
          item.text = std::move(fix.text);
          item.corrected = true;
          parsed = parse_assertion(item.text);
        }
      } catch (const ModelRefusal&) {
      } catch (const TransportError&) {
        // The assertion keeps its syntax error.
      }
      record.timings.correct_ms += fix_clock.lap();
    }

    StageClock check_clock(cfg.record_timings);
    if (const auto* a = std::get_if<Assertion>(&parsed)) {
      item.verdict = checker.check(desugar(*a));
    } else if (const auto* err = std::get_if<SyntaxError>(&parsed)) {
      item.verdict = Verdict::failure(ErrorClass::Syntax, describe(*err));
    } else {
      item.verdict = Verdict::failure(ErrorClass::OutOfFragment, describe(std::get<OutOfFragment>(parsed)));
    }
    record.timings.check_ms += check_clock.lap();
    record.assertions.push_back(std::move(item));
  }
  return record;
}

}  // namespace svabench
