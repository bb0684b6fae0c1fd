// SPDX-License-Identifier: Apache-2.0
#include "svabench/checker.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <variant>

#include "json.hpp"

#include "svabench/errors.hpp"

namespace svabench {

Verdict Verdict::valid(std::string detail) { return Verdict{VerdictKind::Valid, std::nullopt, std::move(detail), ErrorClass::None}; }

Verdict Verdict::vacuous(std::string detail) {
  return Verdict{VerdictKind::Vacuous, std::nullopt, std::move(detail), ErrorClass::None};
}

Verdict Verdict::cex(Trace trace, std::string detail) {
  return Verdict{VerdictKind::Cex, std::move(trace), std::move(detail), ErrorClass::None};
}

Verdict Verdict::failure(ErrorClass error, std::string detail) {
  return Verdict{VerdictKind::Error, std::nullopt, std::move(detail), error};
}

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Valid: return "Valid";
    case VerdictKind::Cex: return "Cex";
    case VerdictKind::Vacuous: return "Vacuous";
    case VerdictKind::Error: return "Error";
  }
  return "Error";
}

std::string_view to_string(ErrorClass error) {
  switch (error) {
    case ErrorClass::None: return "none";
    case ErrorClass::Syntax: return "syntax";
    case ErrorClass::OutOfFragment: return "out-of-fragment";
    case ErrorClass::SignalNotFound: return "signal-not-found";
    case ErrorClass::WidthMismatch: return "width-mismatch";
    case ErrorClass::BudgetExceeded: return "budget-exceeded";
    case ErrorClass::Inconclusive: return "inconclusive";
    case ErrorClass::Internal: return "internal";
  }
  return "internal";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Error: return "error";
  }
  return "error";
}

std::optional<VerdictKind> verdict_kind_from_string(std::string_view text) {
  for (auto k : {VerdictKind::Valid, VerdictKind::Cex, VerdictKind::Vacuous, VerdictKind::Error}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<ErrorClass> error_class_from_string(std::string_view text) {
  for (auto e : {ErrorClass::None, ErrorClass::Syntax, ErrorClass::OutOfFragment, ErrorClass::SignalNotFound,
                 ErrorClass::WidthMismatch, ErrorClass::BudgetExceeded, ErrorClass::Inconclusive,
                 ErrorClass::Internal}) {
    if (to_string(e) == text) return e;
  }
  return std::nullopt;
}

Outcome classify(const Verdict& verdict) {
  switch (verdict.kind) {
    case VerdictKind::Valid:
    case VerdictKind::Vacuous: return Outcome::Pass;
    case VerdictKind::Cex: return Outcome::Fail;
    case VerdictKind::Error: return Outcome::Error;
  }
  return Outcome::Error;
}

namespace {

struct ValuationHash {
  std::size_t operator()(const Valuation& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint32_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

std::uint32_t width_mask(int width) { return width >= 32 ? 0xffffffffu : ((1u << width) - 1u); }

}  // namespace

std::optional<int> ReachableSet::find(const Valuation& state) const {
  auto it = std::find(states.begin(), states.end(), state);
  if (it == states.end()) return std::nullopt;
  return static_cast<int>(it - states.begin());
}

std::vector<std::pair<Valuation, Valuation>> ReachableSet::path_to(int index) const {
  std::vector<std::pair<Valuation, Valuation>> path;
  int cur = index;
  while (parent[static_cast<std::size_t>(cur)] >= 0) {
    int p = parent[static_cast<std::size_t>(cur)];
    path.emplace_back(states[static_cast<std::size_t>(p)], via[static_cast<std::size_t>(cur)]);
    cur = p;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Valuation decode_inputs(const TransitionSystem& ts, std::uint64_t code) {
  const auto& inputs = ts.inputs();
  Valuation v(inputs.size(), 0);
  auto reset = ts.reset_input();
  for (int i = static_cast<int>(inputs.size()) - 1; i >= 0; --i) {
    if (reset && *reset == i) continue;
    int w = inputs[static_cast<std::size_t>(i)].width;
    v[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(code & width_mask(w));
    code >>= w;
  }
  return v;
}

ReachableSet reachable_states(const TransitionSystem& ts, int depth, int bit_budget) {
  int free_bits = ts.free_input_bits();
  if (free_bits > bit_budget) {
    throw BudgetExceeded("input space of " + std::to_string(free_bits) + " bits exceeds the budget of " +
                         std::to_string(bit_budget) + " bits");
  }
  const std::uint64_t limit = bit_budget >= 63 ? ~0ull : (1ull << bit_budget);
  const std::uint64_t codes = 1ull << free_bits;

  ReachableSet r;
  std::unordered_map<Valuation, int, ValuationHash> index;
  r.states.push_back(ts.reset_state());
  r.parent.push_back(-1);
  r.via.emplace_back();
  r.depth.push_back(0);
  index.emplace(ts.reset_state(), 0);

  std::vector<int> frontier{0};
  Valuation observed, next;
  int level = 0;
  while (!frontier.empty() && level < depth) {
    std::vector<int> discovered;
    for (int s : frontier) {
      for (std::uint64_t code = 0; code < codes; ++code) {
        Valuation in = decode_inputs(ts, code);
        ts.step(r.states[static_cast<std::size_t>(s)], in, observed, next);
        if (index.count(next)) continue;
        if (r.states.size() >= limit) {
          throw BudgetExceeded("reachable state set exceeds 2^" + std::to_string(bit_budget) + " states");
        }
        int id = static_cast<int>(r.states.size());
        index.emplace(next, id);
        r.states.push_back(next);
        r.parent.push_back(s);
        r.via.push_back(in);
        r.depth.push_back(level + 1);
        discovered.push_back(id);
      }
    }
    ++level;
    frontier = std::move(discovered);
  }
  r.fixed_point = frontier.empty();
  r.depth_explored = level;
  return r;
}

namespace {

struct Literal {
  int signal = 0;
  std::uint32_t value = 0;
};

struct Resolved {
  std::vector<std::vector<Literal>> antecedent;  // by cycle, 0..m
  std::vector<Literal> consequent;
  std::optional<int> disable;
  int m = 0;
  int n = 0;
};

bool holds(const std::vector<Literal>& lits, const Valuation& observed) {
  for (const auto& l : lits) {
    if (observed[static_cast<std::size_t>(l.signal)] != l.value) return false;
  }
  return true;
}

std::variant<Resolved, Verdict> resolve(const TransitionSystem& ts, const NormalAssertion& a) {
  if (!ts.clock().empty() && a.clock != ts.clock()) {
    return Verdict::failure(ErrorClass::SignalNotFound, "clock '" + a.clock + "' not found in design");
  }
  auto lit = [&](const Proposition& p) -> std::variant<Literal, Verdict> {
    auto idx = ts.signal_index(p.signal);
    if (!idx) return Verdict::failure(ErrorClass::SignalNotFound, "signal '" + p.signal + "' not found in design");
    int w = ts.signals()[static_cast<std::size_t>(*idx)].width;
    if (p.width != 0 && p.width != w) {
      return Verdict::failure(ErrorClass::WidthMismatch, "literal width " + std::to_string(p.width) + " for '" +
                                                             p.signal + "' of width " + std::to_string(w));
    }
    if ((static_cast<std::uint64_t>(p.value) >> w) != 0) {
      return Verdict::failure(ErrorClass::WidthMismatch, "value " + std::to_string(p.value) + " does not fit '" +
                                                             p.signal + "' of width " + std::to_string(w));
    }
    return Literal{*idx, p.value};
  };
  Resolved r;
  r.m = a.antecedent_depth();
  r.n = a.consequent_delay();
  if (r.n < r.m) return Verdict::failure(ErrorClass::Internal, "consequent delay below antecedent depth");
  r.antecedent.resize(static_cast<std::size_t>(r.m) + 1);
  for (const auto& term : a.antecedent) {
    for (const auto& p : term.props) {
      auto l = lit(p);
      if (auto* v = std::get_if<Verdict>(&l)) return *v;
      r.antecedent[static_cast<std::size_t>(term.delay)].push_back(std::get<Literal>(l));
    }
  }
  for (const auto& p : a.consequent.props) {
    auto l = lit(p);
    if (auto* v = std::get_if<Verdict>(&l)) return *v;
    r.consequent.push_back(std::get<Literal>(l));
  }
  if (!a.disable_iff.empty()) {
    auto idx = ts.signal_index(a.disable_iff);
    if (!idx) return Verdict::failure(ErrorClass::SignalNotFound, "signal '" + a.disable_iff + "' not found in design");
    r.disable = *idx;
  }
  return r;
}

Trace make_trace(const TransitionSystem& ts, const std::vector<std::pair<Valuation, Valuation>>& prefix,
                 const Valuation& start, const std::vector<Valuation>& window_inputs) {
  Trace t;
  t.signals = ts.signals();
  Valuation observed, next;
  for (const auto& [state, in] : prefix) {
    ts.step(state, in, observed, next);
    t.cycles.push_back(observed);
  }
  t.window_start = static_cast<int>(t.cycles.size());
  Valuation state = start;
  for (const auto& in : window_inputs) {
    ts.step(state, in, observed, next);
    t.cycles.push_back(observed);
    state = next;
  }
  return t;
}

enum class Walk { None, Matched, Failed };

class WindowSearch {
 public:
  WindowSearch(const TransitionSystem& ts, const Resolved& r)
      : ts_(ts), r_(r), codes_(1ull << ts.free_input_bits()) {
    std::size_t len = static_cast<std::size_t>(r.n) + 1;
    inputs_.resize(len);
    observed_.resize(len);
    next_.resize(len);
    memo_.resize(len);
  }

  /// Explores every window starting at `state` in lexicographic input order.
  Walk run(const Valuation& state) { return visit(0, state); }

  const std::vector<Valuation>& failing_inputs() const { return failing_; }

 private:
  Walk visit(int j, const Valuation& state) {
    auto& memo = memo_[static_cast<std::size_t>(j)];
    if (j > 0) {
      auto it = memo.find(state);
      if (it != memo.end()) return it->second ? Walk::Matched : Walk::None;
    }
    auto ju = static_cast<std::size_t>(j);
    bool matched = false;
    for (std::uint64_t code = 0; code < codes_; ++code) {
      inputs_[ju] = decode_inputs(ts_, code);
      ts_.step(state, inputs_[ju], observed_[ju], next_[ju]);
      if (j <= r_.m && !holds(r_.antecedent[ju], observed_[ju])) continue;
      if (r_.disable && observed_[ju][static_cast<std::size_t>(*r_.disable)] != 0) continue;
      if (j == r_.n) {
        matched = true;
        if (!holds(r_.consequent, observed_[ju])) {
          failing_.assign(inputs_.begin(), inputs_.end());
          return Walk::Failed;
        }
        continue;
      }
      Walk w = visit(j + 1, next_[ju]);
      if (w == Walk::Failed) return w;
      if (w == Walk::Matched) matched = true;
    }
    if (j > 0) memo.emplace(state, matched);
    return matched ? Walk::Matched : Walk::None;
  }

  const TransitionSystem& ts_;
  const Resolved& r_;
  std::uint64_t codes_;
  std::vector<Valuation> inputs_, observed_, next_;
  std::vector<std::unordered_map<Valuation, bool, ValuationHash>> memo_;
  std::vector<Valuation> failing_;
};

std::vector<int> lexicographic_order(const ReachableSet& reach) {
  std::vector<int> order(reach.states.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return reach.states[static_cast<std::size_t>(a)] < reach.states[static_cast<std::size_t>(b)];
  });
  return order;
}

Verdict check_exhaustive(const TransitionSystem& ts, const Resolved& r, const NormalAssertion& a,
                         const ReachableSet& reach, const std::vector<int>& order) {
  WindowSearch search(ts, r);
  bool matched = false;
  for (int idx : order) {
    const Valuation& s = reach.states[static_cast<std::size_t>(idx)];
    Walk w = search.run(s);
    if (w == Walk::Failed) {
      Trace t = make_trace(ts, reach.path_to(idx), s, search.failing_inputs());
      if (auto problem = replay_trace(ts, a, t)) {
        return Verdict::failure(ErrorClass::Internal, "counterexample failed replay: " + *problem);
      }
      std::string detail = "consequent violated at cycle " + std::to_string(t.window_start + r.n);
      return Verdict::cex(std::move(t), std::move(detail));
    }
    if (w == Walk::Matched) matched = true;
  }
  if (!reach.fixed_point) {
    return Verdict::failure(ErrorClass::Inconclusive, "no violation within reachability depth " +
                                                          std::to_string(reach.depth_explored) +
                                                          " but no fixed point reached");
  }
  if (!matched) return Verdict::vacuous();
  return Verdict::valid(std::to_string(reach.states.size()) + " reachable states");
}

Verdict check_random(const TransitionSystem& ts, const Resolved& r, const NormalAssertion& a,
                     const CheckConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const auto& ins = ts.inputs();
  auto reset = ts.reset_input();
  auto draw = [&] {
    Valuation v(ins.size(), 0);
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if (reset && static_cast<std::size_t>(*reset) == i) continue;
      v[i] = static_cast<std::uint32_t>(rng()) & width_mask(ins[i].width);
    }
    return v;
  };
  Valuation observed, next;
  std::vector<std::pair<Valuation, Valuation>> prefix;
  std::vector<Valuation> window;
  for (std::uint64_t trial = 0; trial < cfg.random_trials; ++trial) {
    auto len = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.reachability_depth + 1));
    prefix.clear();
    Valuation state = ts.reset_state();
    for (int i = 0; i < len; ++i) {
      Valuation in = draw();
      prefix.emplace_back(state, in);
      state = ts.next_state(state, in);
    }
    Valuation start = state;
    window.clear();
    bool alive = true;
    for (int j = 0; j <= r.n && alive; ++j) {
      window.push_back(draw());
      ts.step(state, window.back(), observed, next);
      auto ju = static_cast<std::size_t>(j);
      if (j <= r.m && !holds(r.antecedent[ju], observed)) alive = false;
      if (r.disable && observed[static_cast<std::size_t>(*r.disable)] != 0) alive = false;
      if (alive && j == r.n && !holds(r.consequent, observed)) {
        Trace t = make_trace(ts, prefix, start, window);
        if (auto problem = replay_trace(ts, a, t)) {
          return Verdict::failure(ErrorClass::Internal, "counterexample failed replay: " + *problem);
        }
        return Verdict::cex(std::move(t), "found by random simulation, trial " + std::to_string(trial));
      }
      state = next;
    }
  }
  return Verdict::failure(ErrorClass::Inconclusive, "inconclusive: random mode");
}

}  // namespace

struct Checker::Cache {
  std::once_flag once;
  std::optional<ReachableSet> reach;
  std::vector<int> order;
  std::string error;
};

namespace {

Verdict check_impl(const TransitionSystem& ts, const NormalAssertion& a, const CheckConfig& cfg,
                   const std::function<const ReachableSet*(std::string&, const std::vector<int>*&)>& reach) {
  auto resolved = resolve(ts, a);
  if (auto* v = std::get_if<Verdict>(&resolved)) return *v;
  const Resolved& r = std::get<Resolved>(resolved);
  if (cfg.mode == CheckMode::Random) return check_random(ts, r, a, cfg);

  long long needed = ts.state_bits() + static_cast<long long>(ts.free_input_bits()) * (r.n + 1);
  if (needed > cfg.bit_budget) {
    return Verdict::failure(ErrorClass::BudgetExceeded, "needs " + std::to_string(needed) +
                                                            " bits, budget is " + std::to_string(cfg.bit_budget));
  }
  std::string error;
  const std::vector<int>* order = nullptr;
  const ReachableSet* set = reach(error, order);
  if (!set) return Verdict::failure(ErrorClass::BudgetExceeded, error);
  return check_exhaustive(ts, r, a, *set, *order);
}

}  // namespace

Verdict check(const TransitionSystem& ts, const NormalAssertion& assertion, const CheckConfig& cfg) {
  std::optional<ReachableSet> set;
  std::vector<int> order;
  return check_impl(ts, assertion, cfg, [&](std::string& error, const std::vector<int>*& ord) -> const ReachableSet* {
    try {
      set = reachable_states(ts, cfg.reachability_depth, cfg.bit_budget);
    } catch (const BudgetExceeded& e) {
      error = e.what();
      return nullptr;
    }
    order = lexicographic_order(*set);
    ord = &order;
    return &*set;
  });
}

Checker::Checker(TransitionSystem ts, CheckConfig cfg)
    : ts_(std::move(ts)), cfg_(cfg), cache_(std::make_shared<Cache>()) {}

Verdict Checker::check(const NormalAssertion& assertion) const {
  return check_impl(ts_, assertion, cfg_, [this](std::string& error, const std::vector<int>*& ord) -> const ReachableSet* {
    std::call_once(cache_->once, [this] {
      try {
        cache_->reach = reachable_states(ts_, cfg_.reachability_depth, cfg_.bit_budget);
        cache_->order = lexicographic_order(*cache_->reach);
      } catch (const BudgetExceeded& e) {
        cache_->error = e.what();
      }
    });
    if (!cache_->reach) {
      error = cache_->error;
      return nullptr;
    }
    ord = &cache_->order;
    return &*cache_->reach;
  });
}

Verdict Checker::check_text(std::string_view text) const {
  auto parsed = parse_assertion(text);
  if (auto* e = std::get_if<SyntaxError>(&parsed)) return Verdict::failure(ErrorClass::Syntax, describe(*e));
  if (auto* e = std::get_if<OutOfFragment>(&parsed)) return Verdict::failure(ErrorClass::OutOfFragment, describe(*e));
  return check(desugar(std::get<Assertion>(parsed)));
}

std::vector<CheckedAssertion> Checker::check_batch(const std::vector<std::string>& texts) const {
  std::vector<CheckedAssertion> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back({t, check_text(t)});
  return out;
}

std::vector<CheckedAssertion> check_batch(const TransitionSystem& ts, const std::vector<std::string>& texts,
                                          const CheckConfig& cfg) {
  return Checker(ts, cfg).check_batch(texts);
}

std::optional<std::string> replay_trace(const TransitionSystem& ts, const NormalAssertion& a, const Trace& trace) {
  if (trace.signals != ts.signals()) return "signal list differs from the design";
  auto resolved = resolve(ts, a);
  if (std::holds_alternative<Verdict>(resolved)) return std::get<Verdict>(resolved).detail;
  const Resolved& r = std::get<Resolved>(resolved);
  auto expected = static_cast<std::size_t>(trace.window_start) + static_cast<std::size_t>(r.n) + 1;
  if (trace.window_start < 0 || trace.cycles.size() != expected) return "trace length does not match the window";

  auto regs_of = [&](const Valuation& cycle) {
    Valuation v;
    for (std::size_t i = 0; i < ts.registers().size(); ++i) {
      v.push_back(cycle[static_cast<std::size_t>(ts.register_signal(static_cast<int>(i)))]);
    }
    return v;
  };
  auto inputs_of = [&](const Valuation& cycle) {
    Valuation v;
    for (std::size_t i = 0; i < ts.inputs().size(); ++i) {
      v.push_back(cycle[static_cast<std::size_t>(ts.input_signal(static_cast<int>(i)))]);
    }
    return v;
  };
  Valuation state = ts.reset_state();
  Valuation observed, next;
  auto reset = ts.reset_input();
  for (std::size_t k = 0; k < trace.cycles.size(); ++k) {
    const Valuation& cycle = trace.cycles[k];
    if (cycle.size() != ts.signals().size()) return "cycle " + std::to_string(k) + " has the wrong arity";
    if (regs_of(cycle) != state) return "cycle " + std::to_string(k) + " registers do not follow next_state";
    Valuation in = inputs_of(cycle);
    if (reset && in[static_cast<std::size_t>(*reset)] != 0) return "reset asserted at cycle " + std::to_string(k);
    ts.step(state, in, observed, next);
    if (observed != cycle) return "cycle " + std::to_string(k) + " values disagree with the design";
    state = next;
  }
  for (int j = 0; j <= r.n; ++j) {
    const Valuation& cycle = trace.cycles[static_cast<std::size_t>(trace.window_start + j)];
    if (j <= r.m && !holds(r.antecedent[static_cast<std::size_t>(j)], cycle)) {
      return "antecedent does not hold at window cycle " + std::to_string(j);
    }
    if (r.disable && cycle[static_cast<std::size_t>(*r.disable)] != 0) return "window is disabled";
  }
  if (holds(r.consequent, trace.cycles.back())) return "consequent holds at the end of the window";
  return std::nullopt;
}

std::string format_bits(std::uint32_t value, int width) {
  std::string out = "b";
  for (int i = width - 1; i >= 0; --i) out += ((value >> i) & 1u) ? '1' : '0';
  return out;
}

std::string trace_to_json(const Trace& trace) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < trace.cycles.size(); ++k) {
    nlohmann::ordered_json signals = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < trace.signals.size(); ++i) {
      signals[trace.signals[i].name] = format_bits(trace.cycles[k][i], trace.signals[i].width);
    }
    arr.push_back({{"cycle", k}, {"signals", std::move(signals)}});
  }
  return arr.dump();
}

std::string dump_trace(const Trace& trace) {
  std::vector<std::size_t> widths;
  std::ostringstream out;
  out << "cycle ";
  for (const auto& s : trace.signals) {
    std::size_t w = std::max(s.name.size(), static_cast<std::size_t>(s.width) + 1);
    widths.push_back(w);
    out << ' ' << std::setw(static_cast<int>(w)) << s.name;
  }
  out << '\n';
  for (std::size_t k = 0; k < trace.cycles.size(); ++k) {
    char mark = static_cast<int>(k) >= trace.window_start ? '*' : ' ';
    out << std::setw(4) << k << mark << ' ';
    for (std::size_t i = 0; i < trace.signals.size(); ++i) {
      out << ' ' << std::setw(static_cast<int>(widths[i])) << format_bits(trace.cycles[k][i], trace.signals[i].width);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace svabench
