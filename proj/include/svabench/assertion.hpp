// SPDX-License-Identifier: Apache-2.0
//
// The sequential assertion fragment G(A -> C):
//
//   assert property (@(posedge clk) [disable iff (r)]
//                    T0 ##d1 T1 ##d2 ... |-> [##k] C);
//
// where every T and C is a conjunction of (signal == constant) propositions.
// `|->` evaluates C in the cycle the antecedent match ends, `|=>` one cycle
// later.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace svabench {

struct Proposition {
  std::string signal;
  std::uint32_t value = 1;
  int width = 0;  // literal width; 0 = unsized

  bool operator==(const Proposition&) const = default;
};

struct TemporalTerm {
  int delay = 0;
  std::vector<Proposition> props;  // conjunction, nonempty

  /// True when two propositions bind the same signal to different values.
  bool contradictory() const;
  bool operator==(const TemporalTerm&) const = default;
};

enum class Implication { Overlapped, NonOverlapped };

/// Parsed assertion.
///
/// Antecedent delays are absolute offsets from the first cycle. For
/// overlapped implication the consequent delay is absolute as well (so it is
/// never below the antecedent's max delay); for non-overlapped implication it
/// is the `##k` offset written after `|=>`.
struct Assertion {
  std::vector<TemporalTerm> antecedent;  // strictly increasing delays
  TemporalTerm consequent;
  Implication implication = Implication::Overlapped;
  std::string clock = "clk";
  std::string disable_iff;  // empty when absent
  std::string label;        // `name:` prefix, empty when absent
  std::string source_text;  // not compared

  int antecedent_depth() const;  // m
  bool operator==(const Assertion& other) const;
};

/// Overlapped assertion with every delay explicit and absolute.
struct NormalAssertion {
  std::vector<TemporalTerm> antecedent;
  TemporalTerm consequent;  // delay n >= antecedent_depth()
  std::string clock = "clk";
  std::string disable_iff;
  std::string label;
  std::string source_text;

  int antecedent_depth() const;
  int consequent_delay() const { return consequent.delay; }
  bool operator==(const NormalAssertion& other) const;
};

/// Syntax problem in the assertion text.
struct SyntaxError {
  std::size_t offset = 0;
  std::string message;
};

/// Well-formed SVA outside the supported fragment.
struct OutOfFragment {
  std::size_t offset = 0;
  std::string construct;
};

using AssertionParseResult = std::variant<Assertion, SyntaxError, OutOfFragment>;

AssertionParseResult parse_assertion(std::string_view text);

/// Human-readable message for a failed parse ("offset N: ...").
std::string describe(const SyntaxError& e);
std::string describe(const OutOfFragment& e);

NormalAssertion desugar(const Assertion& a);

std::string render(const Assertion& a);
std::string render(const NormalAssertion& a);

/// Every `assert property (...)` statement in free-form text, verbatim and in
/// order. A missing `;` is tolerated; an unbalanced statement ends at the
/// next `;` or the end of text.
std::vector<std::string> extract_assertions(std::string_view text);

/// Splits a golden assertion file: `#` comment lines, one statement per line
/// or `;`-terminated blocks.
std::vector<std::string> split_assertion_file(std::string_view text);

}  // namespace svabench
