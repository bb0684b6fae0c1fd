// SPDX-License-Identifier: Apache-2.0
//
// Explicit-state property checker for the G(A -> C) fragment.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svabench/assertion.hpp"
#include "svabench/transition_system.hpp"

namespace svabench {

enum class CheckMode { Exhaustive, Random };

struct CheckConfig {
  CheckMode mode = CheckMode::Exhaustive;
  int bit_budget = 24;
  std::uint64_t random_trials = 100000;
  int reachability_depth = 64;
  std::uint64_t seed = 50;

  bool operator==(const CheckConfig&) const = default;
};

enum class VerdictKind { Valid, Cex, Vacuous, Error };

enum class ErrorClass {
  None,
  Syntax,
  OutOfFragment,
  SignalNotFound,
  WidthMismatch,
  BudgetExceeded,
  Inconclusive,
  Internal,
};

/// The three reporting buckets. Vacuous counts as Pass.
enum class Outcome { Pass, Fail, Error };

/// Per-cycle values of every signal (clock excluded). Cycle 0 is the
/// post-reset state; the refuting window starts at `window_start`.
struct Trace {
  std::vector<SignalInfo> signals;
  std::vector<Valuation> cycles;
  int window_start = 0;

  bool operator==(const Trace&) const = default;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Error;
  std::optional<Trace> trace;  // present iff kind == Cex
  std::string detail;
  ErrorClass error = ErrorClass::None;

  bool operator==(const Verdict&) const = default;

  static Verdict valid(std::string detail = {});
  static Verdict vacuous(std::string detail = "pre-condition unreachable");
  static Verdict cex(Trace trace, std::string detail = {});
  static Verdict failure(ErrorClass error, std::string detail);
};

std::string_view to_string(VerdictKind kind);
std::string_view to_string(ErrorClass error);
std::string_view to_string(Outcome outcome);
std::optional<VerdictKind> verdict_kind_from_string(std::string_view text);
std::optional<ErrorClass> error_class_from_string(std::string_view text);

Outcome classify(const Verdict& verdict);

/// Register valuations reachable from reset with the reset input held low.
struct ReachableSet {
  std::vector<Valuation> states;   // BFS discovery order, states[0] is reset
  std::vector<int> parent;         // -1 for the reset state
  std::vector<Valuation> via;      // input valuation taken from the parent
  std::vector<int> depth;
  bool fixed_point = false;
  int depth_explored = 0;

  std::optional<int> find(const Valuation& state) const;
  /// (state, input) steps from reset leading to states[index].
  std::vector<std::pair<Valuation, Valuation>> path_to(int index) const;
};

/// BFS over all free-input valuations, stopping after `depth` steps or at a
/// fixed point. Throws BudgetExceeded when the visited set or the per-state
/// input fan-out would exceed 2^bit_budget.
ReachableSet reachable_states(const TransitionSystem& ts, int depth, int bit_budget = 24);

/// Free-input valuation number `code`; the first free input is the most
/// significant field. The reset input, if any, is zero.
Valuation decode_inputs(const TransitionSystem& ts, std::uint64_t code);

/// Checks one assertion. Errors (unknown signal, width, budget) come back as
/// Error verdicts; nothing throws for user input.
Verdict check(const TransitionSystem& ts, const NormalAssertion& assertion, const CheckConfig& cfg);

/// Re-simulates a Cex trace through the transition functions. Returns an
/// explanation when the trace is not a genuine refutation.
std::optional<std::string> replay_trace(const TransitionSystem& ts, const NormalAssertion& assertion,
                                        const Trace& trace);

struct CheckedAssertion {
  std::string text;
  Verdict verdict;
};

/// Checker bound to one design. The reachable set is computed on first use
/// and shared by every later check; safe to use from several threads.
class Checker {
 public:
  Checker(TransitionSystem ts, CheckConfig cfg);

  const TransitionSystem& system() const { return ts_; }
  const CheckConfig& config() const { return cfg_; }

  Verdict check(const NormalAssertion& assertion) const;
  /// Parse, desugar and check. Parse failures become Error verdicts.
  Verdict check_text(std::string_view text) const;
  std::vector<CheckedAssertion> check_batch(const std::vector<std::string>& texts) const;

 private:
  struct Cache;
  TransitionSystem ts_;
  CheckConfig cfg_;
  std::shared_ptr<Cache> cache_;
};

std::vector<CheckedAssertion> check_batch(const TransitionSystem& ts, const std::vector<std::string>& texts,
                                          const CheckConfig& cfg);

/// `b0101`-style rendering of a value of the given width.
std::string format_bits(std::uint32_t value, int width);

/// JSON array `[{"cycle": k, "signals": {name: "b0101"}}]`.
std::string trace_to_json(const Trace& trace);
/// Fixed-width column dump, one row per cycle.
std::string dump_trace(const Trace& trace);

}  // namespace svabench
