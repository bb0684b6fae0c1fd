// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference semantics for G(A -> C), written without any of the
// checker's machinery: no pruning, no memoization, and both implication
// forms are interpreted directly rather than through desugar().
#pragma once

#include <set>
#include <string>
#include <vector>

#include "svabench/assertion.hpp"
#include "svabench/checker.hpp"
#include "svabench/transition_system.hpp"

namespace svabench::testing {

/// Every input valuation with the reset input held at 0, as an odometer
/// over the declared input widths.
inline std::vector<Valuation> all_input_valuations(const TransitionSystem& ts) {
  std::vector<Valuation> out;
  Valuation v(ts.inputs().size(), 0);
  auto reset = ts.reset_input();
  for (;;) {
    out.push_back(v);
    std::size_t i = 0;
    for (; i < v.size(); ++i) {
      if (reset && static_cast<std::size_t>(*reset) == i) continue;
      if (++v[i] < (1u << ts.inputs()[i].width)) break;
      v[i] = 0;
    }
    if (i == v.size()) return out;
  }
}

struct OracleReach {
  std::set<Valuation> states;
  bool fixed_point = false;
};

/// States reachable within `depth` steps by repeated image computation.
inline OracleReach oracle_reach(const TransitionSystem& ts, int depth) {
  auto inputs = all_input_valuations(ts);
  OracleReach r;
  r.states.insert(ts.reset_state());
  std::set<Valuation> frontier = r.states;
  for (int step = 0; step < depth && !frontier.empty(); ++step) {
    std::set<Valuation> fresh;
    for (const auto& s : frontier) {
      for (const auto& in : inputs) {
        Valuation n = ts.next_state(s, in);
        if (!r.states.count(n)) fresh.insert(n);
      }
    }
    r.states.insert(fresh.begin(), fresh.end());
    frontier = std::move(fresh);
  }
  r.fixed_point = frontier.empty();
  return r;
}

/// Cycle at which the consequent is sampled, from the surface form.
inline int oracle_consequent_cycle(const Assertion& a) {
  int antecedent_end = 0;
  for (const auto& t : a.antecedent) antecedent_end = std::max(antecedent_end, t.delay);
  if (a.implication == Implication::Overlapped) return a.consequent.delay;
  // |=> samples one cycle after the antecedent match ends, then ##k more.
  return antecedent_end + 1 + a.consequent.delay;
}

inline bool oracle_term_holds(const TransitionSystem& ts, const std::vector<Proposition>& props,
                              const Valuation& observed) {
  for (const auto& p : props) {
    auto idx = ts.signal_index(p.signal);
    if (!idx || observed[static_cast<std::size_t>(*idx)] != p.value) return false;
  }
  return true;
}

/// Reference verdict kind. Mirrors the checker's contract: a refutation
/// within the explored states is a Cex even without a fixed point, and a
/// missing fixed point otherwise leaves the result undecided (Error).
inline VerdictKind oracle_verdict(const TransitionSystem& ts, const Assertion& a, int depth = 64) {
  const int last = oracle_consequent_cycle(a);
  const auto inputs = all_input_valuations(ts);
  const OracleReach reach = oracle_reach(ts, depth);
  std::optional<int> disable;
  if (!a.disable_iff.empty()) disable = ts.signal_index(a.disable_iff);

  bool matched = false;
  const std::size_t len = static_cast<std::size_t>(last) + 1;
  std::vector<std::size_t> choice(len, 0);
  for (const auto& start : reach.states) {
    std::fill(choice.begin(), choice.end(), 0);
    for (;;) {
      Valuation state = start;
      bool ok = true;
      bool disabled = false;
      Valuation observed;
      for (std::size_t j = 0; j < len; ++j) {
        const Valuation& in = inputs[choice[j]];
        observed = ts.observe(state, in);
        for (const auto& t : a.antecedent) {
          if (static_cast<std::size_t>(t.delay) == j && !oracle_term_holds(ts, t.props, observed)) ok = false;
        }
        if (disable && observed[static_cast<std::size_t>(*disable)] != 0) disabled = true;
        state = ts.next_state(state, in);
      }
      if (ok && !disabled) {
        matched = true;
        if (!oracle_term_holds(ts, a.consequent.props, observed)) return VerdictKind::Cex;
      }
      std::size_t k = 0;
      for (; k < len; ++k) {
        if (++choice[k] < inputs.size()) break;
        choice[k] = 0;
      }
      if (k == len) break;
    }
  }
  if (!reach.fixed_point) return VerdictKind::Error;
  return matched ? VerdictKind::Valid : VerdictKind::Vacuous;
}

/// Bits the exhaustive checker needs for this assertion on this design.
inline int window_bits(const TransitionSystem& ts, const Assertion& a) {
  return ts.state_bits() + ts.free_input_bits() * (oracle_consequent_cycle(a) + 1);
}

}  // namespace svabench::testing
