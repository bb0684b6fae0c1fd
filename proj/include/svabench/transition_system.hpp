// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svabench/verilog.hpp"

namespace svabench {

/// Values of an ordered list of signals, one entry per signal.
using Valuation = std::vector<std::uint32_t>;

struct SignalInfo {
  std::string name;
  int width = 1;
  SignalKind kind = SignalKind::Wire;

  bool operator==(const SignalInfo&) const = default;
};

namespace detail {
struct CompiledDesign;
}

/// Finite-state model of an elaborated design over 2-valued bit-vectors.
///
/// The clock is implicit time and never appears among the signals. Register
/// valuations follow `registers()` order and input valuations follow
/// `inputs()` order; `observe()` returns every signal in `signals()` order.
///
/// next_state() applies all clocked processes simultaneously (every right
/// hand side reads pre-edge values). Combinational logic is evaluated in a
/// fixed topological order computed at elaboration, so both functions are
/// total and deterministic. Immutable and cheap to copy.
class TransitionSystem {
 public:
  const std::string& name() const;
  const std::vector<SignalInfo>& signals() const;
  const std::vector<SignalInfo>& registers() const;
  const std::vector<SignalInfo>& inputs() const;
  const std::vector<SignalInfo>& outputs() const;

  /// Index into signals(), or nullopt when the name is unknown (or the clock).
  std::optional<int> signal_index(std::string_view name) const;
  /// Index into inputs() of the reset input, if the design has one.
  std::optional<int> reset_input() const;
  const std::string& clock() const;

  int state_bits() const;
  int input_bits() const;
  /// Input bits excluding the reset, which is held low during checking.
  int free_input_bits() const;

  const Valuation& reset_state() const;

  Valuation next_state(const Valuation& regs, const Valuation& inputs) const;
  Valuation outputs(const Valuation& regs, const Valuation& inputs) const;
  Valuation observe(const Valuation& regs, const Valuation& inputs) const;

  /// Allocation-free variant used by the checker: fills `observed` (all
  /// signals) and `next` (registers).
  void step(const Valuation& regs, const Valuation& inputs, Valuation& observed,
            Valuation& next) const;

  /// Position of register i / input i inside signals().
  int register_signal(int i) const;
  int input_signal(int i) const;

 private:
  friend TransitionSystem elaborate(const Design& design);
  std::shared_ptr<const detail::CompiledDesign> impl_;
};

/// Throws CombinationalLoop, MultipleDrivers, WidthMismatch or
/// UnsupportedConstruct (latch inference).
TransitionSystem elaborate(const Design& design);

}  // namespace svabench
