// SPDX-License-Identifier: Apache-2.0
//
// Random generators for subset designs and fragment assertions.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "svabench/assertion.hpp"
#include "svabench/transition_system.hpp"
#include "svabench/verilog.hpp"

namespace svabench::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(engine_); }
  std::uint32_t bits(int width) {
    return static_cast<std::uint32_t>(engine_()) & (width >= 32 ? 0xffffffffu : ((1u << width) - 1u));
  }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(between(0, static_cast<int>(items.size()) - 1))];
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct DesignShape {
  int max_inputs = 3;
  int max_input_bits = 4;  // excluding clk and rst
  int max_registers = 2;
  int max_state_bits = 6;
  int max_wires = 3;
  int max_width = 4;
  int max_expr_depth = 3;
};

/// Builds random elaboratable designs directly as ASTs, in the canonical form
/// the parser produces (ports first, kinds resolved, clock and reset set).
class DesignGenerator {
 public:
  explicit DesignGenerator(std::uint64_t seed) : rng_(seed) {}

  Design next(const DesignShape& shape) {
    design_ = Design{};
    design_.name = "gen" + std::to_string(counter_++);
    readable_.clear();

    bool clocked = rng_.chance(0.75);
    bool reset = clocked && rng_.chance(0.7);
    std::vector<SignalDecl> inputs;
    int budget = shape.max_input_bits;
    int n_inputs = rng_.between(1, shape.max_inputs);
    for (int i = 0; i < n_inputs && budget > 0; ++i) {
      int w = std::min(budget, rng_.between(1, shape.max_width));
      budget -= w;
      inputs.push_back(decl("in" + std::to_string(i), w, PortDirection::Input));
    }
    std::vector<SignalDecl> regs;
    if (clocked) {
      int state = shape.max_state_bits;
      int n = rng_.between(1, shape.max_registers);
      for (int i = 0; i < n && state > 0; ++i) {
        int w = std::min(state, rng_.between(1, shape.max_width));
        state -= w;
        regs.push_back(decl("r" + std::to_string(i), w, PortDirection::None));
      }
    }
    std::vector<SignalDecl> wires;
    int n_wires = rng_.between(regs.empty() ? 1 : 0, shape.max_wires);
    for (int i = 0; i < n_wires; ++i) {
      wires.push_back(decl("w" + std::to_string(i), rng_.between(1, shape.max_width), PortDirection::None));
    }
    bool any_output = false;
    for (auto* group : {&regs, &wires}) {
      for (auto& s : *group) {
        if (rng_.chance(0.5)) {
          s.direction = PortDirection::Output;
          any_output = true;
        }
      }
    }
    if (!any_output) (wires.empty() ? regs : wires).back().direction = PortDirection::Output;

    for (auto& s : inputs) s.kind = SignalKind::Input;
    for (auto& s : regs) s.kind = SignalKind::Register;
    for (auto& s : wires) s.kind = s.direction == PortDirection::Output ? SignalKind::Output : SignalKind::Wire;

    std::vector<SignalDecl> ports;
    if (clocked) ports.push_back(decl("clk", 1, PortDirection::Input, SignalKind::Input));
    if (reset) ports.push_back(decl("rst", 1, PortDirection::Input, SignalKind::Input));
    for (const auto& s : inputs) ports.push_back(s);
    std::vector<SignalDecl> outputs, internal;
    for (const auto* group : {&regs, &wires}) {
      for (const auto& s : *group) (s.direction == PortDirection::Output ? outputs : internal).push_back(s);
    }
    std::shuffle(outputs.begin(), outputs.end(), rng_.engine());
    ports.insert(ports.end(), outputs.begin(), outputs.end());
    std::shuffle(internal.begin(), internal.end(), rng_.engine());
    for (const auto& s : ports) design_.ports.push_back(s.name);
    design_.signals = ports;
    design_.signals.insert(design_.signals.end(), internal.begin(), internal.end());
    if (clocked) design_.clock = "clk";
    if (reset) design_.reset = "rst";

    // Registers and inputs are readable everywhere; wires only after their
    // driver so that combinational logic stays acyclic.
    for (const auto& s : inputs) readable_.push_back(s);
    if (reset && rng_.chance(0.3)) readable_.push_back(*design_.find("rst"));
    for (const auto& s : regs) readable_.push_back(s);

    std::vector<Process> comb;
    for (std::size_t i = 0; i < wires.size();) {
      std::size_t group = std::min<std::size_t>(wires.size() - i, static_cast<std::size_t>(rng_.between(1, 2)));
      std::vector<SignalDecl> targets(wires.begin() + static_cast<long>(i),
                                      wires.begin() + static_cast<long>(i + group));
      comb.push_back(combinational(targets, shape));
      for (const auto& t : targets) readable_.push_back(t);
      i += group;
    }
    std::vector<Process> seq;
    if (!regs.empty()) {
      std::size_t split = regs.size() > 1 && rng_.chance(0.4) ? 1 : regs.size();
      seq.push_back(clocked_process({regs.begin(), regs.begin() + static_cast<long>(split)}, reset, shape));
      if (split < regs.size()) {
        seq.push_back(clocked_process({regs.begin() + static_cast<long>(split), regs.end()}, reset, shape));
      }
    }
    // Textual order of processes is free; interleave to exercise the sort.
    for (auto& p : comb) design_.processes.push_back(std::move(p));
    for (auto& p : seq) {
      auto at = design_.processes.begin() + rng_.between(0, static_cast<int>(design_.processes.size()));
      design_.processes.insert(at, std::move(p));
    }
    return design_;
  }

  Expr expression(int depth) { return expr(depth); }

 private:
  SignalDecl decl(std::string name, int width, PortDirection dir, SignalKind kind = SignalKind::Wire) {
    SignalDecl s;
    s.name = std::move(name);
    s.width = width;
    s.lsb = width > 1 && rng_.chance(0.15) ? rng_.between(1, 3) : 0;
    s.direction = dir;
    s.kind = kind;
    return s;
  }

  Expr leaf() {
    int roll = rng_.between(0, 9);
    if (roll < 6 && !readable_.empty()) {
      const SignalDecl& s = rng_.pick(readable_);
      if (s.width > 1 && roll == 0) return Expr::bit_select(s.name, rng_.between(s.lsb, s.msb()));
      if (s.width > 1 && roll == 1) {
        int lo = rng_.between(s.lsb, s.msb());
        return Expr::part_select(s.name, rng_.between(lo, s.msb()), lo);
      }
      return Expr::identifier(s.name);
    }
    if (rng_.chance(0.6)) {
      int w = rng_.between(1, 6);
      return Expr::number(rng_.bits(w), w);
    }
    return Expr::number(static_cast<std::uint64_t>(rng_.between(0, 9)));
  }

  Expr sized_leaf() {
    Expr e = leaf();
    if (e.kind == ExprKind::Number && e.width == 0) e.width = 4, e.value &= 0xf;
    return e;
  }

  Expr expr(int depth) {
    if (depth <= 0 || rng_.chance(0.3)) return leaf();
    switch (rng_.between(0, 5)) {
      case 0: {
        static const UnaryOp ops[] = {UnaryOp::LogicalNot, UnaryOp::BitNot, UnaryOp::ReduceAnd,
                                      UnaryOp::ReduceOr, UnaryOp::ReduceXor, UnaryOp::Negate};
        return Expr::unary_op(ops[rng_.between(0, 5)], expr(depth - 1));
      }
      case 1:
      case 2:
      case 3: {
        static const BinaryOp ops[] = {
            BinaryOp::Add,  BinaryOp::Sub,    BinaryOp::ShiftLeft, BinaryOp::ShiftRight, BinaryOp::Less,
            BinaryOp::LessEqual, BinaryOp::Greater, BinaryOp::GreaterEqual, BinaryOp::Equal, BinaryOp::NotEqual,
            BinaryOp::BitAnd, BinaryOp::BitXor, BinaryOp::BitOr, BinaryOp::LogicalAnd, BinaryOp::LogicalOr};
        BinaryOp op = ops[rng_.between(0, 14)];
        if (op == BinaryOp::ShiftLeft || op == BinaryOp::ShiftRight) {
          return Expr::binary_op(op, expr(depth - 1), leaf());
        }
        return Expr::binary_op(op, expr(depth - 1), expr(depth - 1));
      }
      case 4: return Expr::ternary(expr(depth - 1), expr(depth - 1), expr(depth - 1));
      default: {
        std::vector<Expr> parts;
        int n = rng_.between(2, 3);
        for (int i = 0; i < n; ++i) parts.push_back(sized_leaf());
        return Expr::concat(std::move(parts));
      }
    }
  }

  Expr target(const SignalDecl& s) { return Expr::identifier(s.name); }

  /// Block assigning every target once, optionally reading earlier targets.
  Stmt assign_all(const std::vector<SignalDecl>& targets, const DesignShape& shape, bool nonblocking) {
    std::vector<Stmt> body;
    std::size_t before = readable_.size();
    if (!nonblocking && targets.size() == 2 && rng_.chance(0.2)) {
      body.push_back(Stmt::assign(Expr::concat({target(targets[0]), target(targets[1])}),
                                  expr(shape.max_expr_depth), false));
    } else {
      for (const auto& t : targets) {
        body.push_back(Stmt::assign(target(t), expr(shape.max_expr_depth), nonblocking));
        if (!nonblocking) readable_.push_back(t);
      }
    }
    readable_.resize(before);
    return Stmt::block(std::move(body));
  }

  Process combinational(const std::vector<SignalDecl>& targets, const DesignShape& shape) {
    Process p;
    if (targets.size() == 1 && rng_.chance(0.5)) {
      p.kind = ProcessKind::Continuous;
      p.body = Stmt::assign(target(targets[0]), expr(shape.max_expr_depth), false);
      return p;
    }
    p.kind = ProcessKind::Combinational;
    if (rng_.chance(0.5)) {
      p.body = assign_all(targets, shape, false);
    } else {
      Stmt then_branch = assign_all(targets, shape, false);
      Stmt else_branch = rng_.chance(0.3)
                             ? Stmt::if_else(expr(1), assign_all(targets, shape, false), assign_all(targets, shape, false))
                             : assign_all(targets, shape, false);
      p.body = Stmt::block({Stmt::if_else(expr(2), std::move(then_branch), std::move(else_branch))});
    }
    return p;
  }

  Stmt update(const std::vector<SignalDecl>& regs, const DesignShape& shape) {
    std::vector<Stmt> body;
    for (const auto& r : regs) {
      int roll = rng_.between(1, 3);
      Stmt a = Stmt::assign(target(r), expr(shape.max_expr_depth), true);
      if (roll == 1) {
        body.push_back(Stmt::if_else(expr(2), std::move(a)));
      } else if (roll == 2) {
        body.push_back(Stmt::if_else(expr(2), Stmt::block({std::move(a)}),
                                     Stmt::assign(target(r), expr(shape.max_expr_depth), true)));
      } else {
        body.push_back(std::move(a));
      }
    }
    return Stmt::block(std::move(body));
  }

  Process clocked_process(const std::vector<SignalDecl>& regs, bool reset, const DesignShape& shape) {
    Process p;
    p.kind = ProcessKind::Clocked;
    p.clock = "clk";
    if (reset) {
      if (rng_.chance(0.3)) p.reset_edge = "rst";
      std::vector<Stmt> init;
      for (const auto& r : regs) init.push_back(Stmt::assign(target(r), Expr::number(rng_.bits(r.width), r.width), true));
      p.body = Stmt::block(
          {Stmt::if_else(Expr::identifier("rst"), Stmt::block(std::move(init)), update(regs, shape))});
    } else {
      p.body = update(regs, shape);
    }
    return p;
  }

  Rng rng_;
  Design design_;
  std::vector<SignalDecl> readable_;
  int counter_ = 0;
};

struct AssertionShape {
  int max_antecedent_depth = 2;
  int max_terms = 3;
  int max_props = 2;
  int max_offset = 2;
  double non_overlapped = 0.5;
  double contradiction = 0.0;
  double disable = 0.0;
  double label = 0.0;
};

/// Random fragment assertions over a given signal list (clock excluded).
class AssertionGenerator {
 public:
  explicit AssertionGenerator(std::uint64_t seed) : rng_(seed) {}

  Assertion next(const std::vector<SignalInfo>& signals, const AssertionShape& shape) {
    Assertion a;
    a.implication = rng_.chance(shape.non_overlapped) ? Implication::NonOverlapped : Implication::Overlapped;
    int m = rng_.between(0, shape.max_antecedent_depth);
    std::vector<int> delays{m};
    int terms = rng_.between(1, std::min(shape.max_terms, m + 1));
    while (static_cast<int>(delays.size()) < terms) {
      int d = rng_.between(0, m);
      if (std::find(delays.begin(), delays.end(), d) == delays.end()) delays.push_back(d);
    }
    std::sort(delays.begin(), delays.end());
    for (int d : delays) a.antecedent.push_back(TemporalTerm{d, props(signals, shape)});
    if (rng_.chance(shape.contradiction)) {
      auto& term = a.antecedent[static_cast<std::size_t>(rng_.between(0, static_cast<int>(delays.size()) - 1))];
      const SignalInfo& s = rng_.pick(signals);
      std::uint32_t v = rng_.bits(s.width);
      std::uint32_t other = v ^ (1u << rng_.between(0, s.width - 1));
      term.props.push_back({s.name, v, 0});
      term.props.push_back({s.name, other, 0});
    }
    int offset = rng_.between(0, shape.max_offset);
    a.consequent = TemporalTerm{a.implication == Implication::Overlapped ? m + offset : offset, props(signals, shape)};
    if (rng_.chance(shape.disable)) a.disable_iff = rng_.pick(signals).name;
    if (rng_.chance(shape.label)) a.label = "p" + std::to_string(rng_.between(0, 999));
    a.source_text = render(a);
    return a;
  }

  std::vector<SignalInfo> random_signals(int count) {
    std::vector<SignalInfo> out;
    static const std::vector<std::string> pool = {"req", "gnt", "valid", "ready", "data", "cnt", "q", "en",
                                                  "sel", "busy", "ack", "state", "x_1", "y$", "done_"};
    for (int i = 0; i < count; ++i) {
      out.push_back({rng_.pick(pool) + std::to_string(i), rng_.between(1, 16), SignalKind::Wire});
    }
    return out;
  }

 private:
  std::vector<Proposition> props(const std::vector<SignalInfo>& signals, const AssertionShape& shape) {
    std::vector<Proposition> out;
    int n = rng_.between(1, shape.max_props);
    for (int i = 0; i < n; ++i) {
      const SignalInfo& s = rng_.pick(signals);
      out.push_back({s.name, rng_.bits(s.width), rng_.chance(0.3) ? s.width : 0});
    }
    return out;
  }

  Rng rng_;
};

}  // namespace svabench::testing
