// SPDX-License-Identifier: Apache-2.0
#include "svabench/transition_system.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "svabench/errors.hpp"

namespace svabench {
namespace detail {

struct CExpr {
  ExprKind kind = ExprKind::Number;
  int width = 1;              // result width after context propagation
  std::uint64_t value = 0;    // Number
  int signal = -1;            // Identifier / selects
  int shift = 0;              // selects: bit offset of the low bit
  UnaryOp unary = UnaryOp::LogicalNot;
  BinaryOp binary = BinaryOp::Add;
  std::vector<CExpr> args;
  std::vector<int> arg_widths;  // Concat: self width of each part
};

struct Target {
  int slot = 0;   // signal index (combinational) or register index (clocked)
  int width = 1;
};

struct CStmt {
  StmtKind kind = StmtKind::Block;
  CExpr cond;
  CExpr rhs;
  std::vector<Target> targets;  // msb-first, as written
  std::vector<CStmt> body;
};

struct CompiledDesign {
  std::string name;
  std::string clock;
  std::vector<SignalInfo> signals;
  std::vector<SignalInfo> registers;
  std::vector<SignalInfo> inputs;
  std::vector<SignalInfo> outputs;
  std::vector<int> register_signal;
  std::vector<int> input_signal;
  std::vector<int> output_signal;
  std::optional<int> reset_input;
  std::vector<CStmt> combinational;  // topological order
  std::vector<CStmt> clocked;
  Valuation reset_state;
  int state_bits = 0;
  int input_bits = 0;
};

}  // namespace detail

namespace {

using detail::CExpr;
using detail::CompiledDesign;
using detail::CStmt;
using detail::Target;

inline std::uint64_t mask(int width) {
  return width >= 64 ? ~0ull : ((1ull << width) - 1);
}

std::uint64_t eval(const CExpr& e, const Valuation& env) {
  switch (e.kind) {
    case ExprKind::Number: return e.value & mask(e.width);
    case ExprKind::Identifier: return env[static_cast<std::size_t>(e.signal)];
    case ExprKind::BitSelect: return (env[static_cast<std::size_t>(e.signal)] >> e.shift) & 1u;
    case ExprKind::PartSelect:
      return (env[static_cast<std::size_t>(e.signal)] >> e.shift) & mask(e.args.empty() ? e.width : e.width);
    case ExprKind::Unary: {
      std::uint64_t a = eval(e.args[0], env);
      int aw = e.args[0].width;
      switch (e.unary) {
        case UnaryOp::LogicalNot: return a == 0;
        case UnaryOp::BitNot: return ~a & mask(e.width);
        case UnaryOp::Negate: return (0 - a) & mask(e.width);
        case UnaryOp::ReduceAnd: return a == mask(aw);
        case UnaryOp::ReduceOr: return a != 0;
        case UnaryOp::ReduceXor: return static_cast<std::uint64_t>(__builtin_popcountll(a) & 1);
      }
      return 0;
    }
    case ExprKind::Binary: {
      if (e.binary == BinaryOp::LogicalAnd) {
        return eval(e.args[0], env) != 0 && eval(e.args[1], env) != 0;
      }
      if (e.binary == BinaryOp::LogicalOr) {
        return eval(e.args[0], env) != 0 || eval(e.args[1], env) != 0;
      }
      std::uint64_t a = eval(e.args[0], env);
      std::uint64_t b = eval(e.args[1], env);
      std::uint64_t m = mask(e.width);
      switch (e.binary) {
        case BinaryOp::Add: return (a + b) & m;
        case BinaryOp::Sub: return (a - b) & m;
        case BinaryOp::ShiftLeft: return b >= 64 ? 0 : (a << b) & m;
        case BinaryOp::ShiftRight: return b >= 64 ? 0 : (a >> b) & m;
        case BinaryOp::Less: return a < b;
        case BinaryOp::LessEqual: return a <= b;
        case BinaryOp::Greater: return a > b;
        case BinaryOp::GreaterEqual: return a >= b;
        case BinaryOp::Equal: return a == b;
        case BinaryOp::NotEqual: return a != b;
        case BinaryOp::BitAnd: return a & b;
        case BinaryOp::BitXor: return a ^ b;
        case BinaryOp::BitOr: return a | b;
        default: return 0;
      }
    }
    case ExprKind::Ternary:
      return eval(e.args[0], env) != 0 ? eval(e.args[1], env) : eval(e.args[2], env);
    case ExprKind::Concat: {
      std::uint64_t v = 0;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        int w = e.arg_widths[i];
        v = (w >= 64 ? 0 : v << w) | (eval(e.args[i], env) & mask(w));
      }
      return v & mask(e.width);
    }
  }
  return 0;
}

void write_targets(const std::vector<Target>& targets, std::uint64_t value, Valuation& dst) {
  for (auto it = targets.rbegin(); it != targets.rend(); ++it) {
    dst[static_cast<std::size_t>(it->slot)] = static_cast<std::uint32_t>(value & mask(it->width));
    value = it->width >= 64 ? 0 : value >> it->width;
  }
}

void exec(const CStmt& s, const Valuation& read, Valuation& write) {
  switch (s.kind) {
    case StmtKind::Block:
      for (const auto& child : s.body) exec(child, read, write);
      break;
    case StmtKind::If:
      if (eval(s.cond, read) != 0) {
        exec(s.body[0], read, write);
      } else if (s.body.size() == 2) {
        exec(s.body[1], read, write);
      }
      break;
    case StmtKind::Assign:
      write_targets(s.targets, eval(s.rhs, read), write);
      break;
  }
}

// ---------------------------------------------------------------------------
// Compilation

class Compiler {
 public:
  explicit Compiler(const Design& design) : design_(design) {
    for (const auto& s : design.signals) {
      if (s.name == design.clock) continue;
      index_[s.name] = static_cast<int>(decls_.size());
      decls_.push_back(&s);
    }
  }

  int signal(const std::string& name) const { return index_.at(name); }
  const SignalDecl& decl(const std::string& name) const { return *decls_[static_cast<std::size_t>(signal(name))]; }

  int self_width(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Identifier: return decl(e.name).width;
      case ExprKind::Number: return e.width == 0 ? 32 : e.width;
      case ExprKind::BitSelect: return 1;
      case ExprKind::PartSelect: return e.msb - e.lsb + 1;
      case ExprKind::Unary:
        return e.unary == UnaryOp::BitNot || e.unary == UnaryOp::Negate ? self_width(e.operands[0]) : 1;
      case ExprKind::Binary:
        switch (e.binary) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::BitAnd:
          case BinaryOp::BitOr:
          case BinaryOp::BitXor:
            return std::max(self_width(e.operands[0]), self_width(e.operands[1]));
          case BinaryOp::ShiftLeft:
          case BinaryOp::ShiftRight: return self_width(e.operands[0]);
          default: return 1;
        }
      case ExprKind::Ternary: return std::max(self_width(e.operands[1]), self_width(e.operands[2]));
      case ExprKind::Concat: {
        int w = 0;
        for (const auto& part : e.operands) w += self_width(part);
        if (w > 64) throw WidthMismatch("concatenation wider than 64 bits");
        return w;
      }
    }
    return 1;
  }

  CExpr compile(const Expr& e, int context) const {
    CExpr c;
    c.kind = e.kind;
    int self = self_width(e);
    switch (e.kind) {
      case ExprKind::Identifier:
        c.signal = signal(e.name);
        c.width = std::max(self, context);
        break;
      case ExprKind::Number:
        c.value = e.value;
        c.width = std::max(self, context);
        break;
      case ExprKind::BitSelect:
      case ExprKind::PartSelect: {
        const SignalDecl& d = decl(e.name);
        int hi = e.msb;
        int lo = e.kind == ExprKind::BitSelect ? e.msb : e.lsb;
        if (hi < lo) throw WidthMismatch("reversed part-select on '" + e.name + "'");
        if (lo < d.lsb || hi > d.msb()) {
          throw WidthMismatch("select [" + std::to_string(hi) + ":" + std::to_string(lo) +
                              "] out of range for '" + e.name + "' [" + std::to_string(d.msb()) +
                              ":" + std::to_string(d.lsb) + "]");
        }
        c.signal = signal(e.name);
        c.shift = lo - d.lsb;
        c.width = hi - lo + 1;
        // Zero extension is implicit; widen for masking in a larger context.
        if (context > c.width) {
          CExpr wrapped;
          wrapped.kind = ExprKind::Concat;
          wrapped.width = context;
          wrapped.arg_widths = {c.width};
          wrapped.args.push_back(std::move(c));
          return wrapped;
        }
        break;
      }
      case ExprKind::Unary:
        c.unary = e.unary;
        if (e.unary == UnaryOp::BitNot || e.unary == UnaryOp::Negate) {
          c.width = std::max(self, context);
          c.args.push_back(compile(e.operands[0], c.width));
        } else {
          c.width = std::max(1, context);
          c.args.push_back(compile(e.operands[0], self_width(e.operands[0])));
        }
        break;
      case ExprKind::Binary:
        c.binary = e.binary;
        switch (e.binary) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::BitAnd:
          case BinaryOp::BitOr:
          case BinaryOp::BitXor:
            c.width = std::max(self, context);
            c.args.push_back(compile(e.operands[0], c.width));
            c.args.push_back(compile(e.operands[1], c.width));
            break;
          case BinaryOp::ShiftLeft:
          case BinaryOp::ShiftRight:
            c.width = std::max(self, context);
            c.args.push_back(compile(e.operands[0], c.width));
            c.args.push_back(compile(e.operands[1], self_width(e.operands[1])));
            break;
          case BinaryOp::LogicalAnd:
          case BinaryOp::LogicalOr:
            c.width = std::max(1, context);
            c.args.push_back(compile(e.operands[0], self_width(e.operands[0])));
            c.args.push_back(compile(e.operands[1], self_width(e.operands[1])));
            break;
          default: {
            int common = std::max(self_width(e.operands[0]), self_width(e.operands[1]));
            c.width = std::max(1, context);
            c.args.push_back(compile(e.operands[0], common));
            c.args.push_back(compile(e.operands[1], common));
            break;
          }
        }
        break;
      case ExprKind::Ternary:
        c.width = std::max(self, context);
        c.args.push_back(compile(e.operands[0], self_width(e.operands[0])));
        c.args.push_back(compile(e.operands[1], c.width));
        c.args.push_back(compile(e.operands[2], c.width));
        break;
      case ExprKind::Concat:
        c.width = std::max(self, context);
        for (const auto& part : e.operands) {
          int w = self_width(part);
          c.arg_widths.push_back(w);
          c.args.push_back(compile(part, w));
        }
        break;
    }
    if (c.width > 64) throw WidthMismatch("expression wider than 64 bits");
    return c;
  }

  CStmt compile_stmt(const Stmt& s, const std::map<std::string, int>* register_slots) const {
    CStmt c;
    c.kind = s.kind;
    switch (s.kind) {
      case StmtKind::Block:
        for (const auto& child : s.body) c.body.push_back(compile_stmt(child, register_slots));
        break;
      case StmtKind::If:
        c.cond = compile(s.condition, self_width(s.condition));
        for (const auto& child : s.body) c.body.push_back(compile_stmt(child, register_slots));
        break;
      case StmtKind::Assign: {
        std::vector<std::string> names;
        if (s.lhs.kind == ExprKind::Identifier) {
          names.push_back(s.lhs.name);
        } else {
          for (const auto& part : s.lhs.operands) names.push_back(part.name);
        }
        int total = 0;
        for (const auto& n : names) {
          Target t;
          t.width = decl(n).width;
          t.slot = register_slots ? register_slots->at(n) : signal(n);
          total += t.width;
          c.targets.push_back(t);
        }
        c.rhs = compile(s.rhs, total);
        break;
      }
    }
    return c;
  }

 private:
  const Design& design_;
  std::map<std::string, int> index_;
  std::vector<const SignalDecl*> decls_;
};

// ---------------------------------------------------------------------------
// Dataflow analysis of combinational processes

void expr_reads(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Identifier || e.kind == ExprKind::BitSelect || e.kind == ExprKind::PartSelect) {
    out.insert(e.name);
  }
  for (const auto& op : e.operands) expr_reads(op, out);
}

std::vector<std::string> assign_targets(const Stmt& s) {
  if (s.lhs.kind == ExprKind::Identifier) return {s.lhs.name};
  std::vector<std::string> out;
  for (const auto& part : s.lhs.operands) out.push_back(part.name);
  return out;
}

void stmt_writes(const Stmt& s, std::set<std::string>& out) {
  if (s.kind == StmtKind::Assign) {
    for (auto& n : assign_targets(s)) out.insert(n);
  }
  for (const auto& child : s.body) stmt_writes(child, out);
}

struct Flow {
  const std::set<std::string>& own;  // signals this process writes
  std::set<std::string> external;    // reads of signals driven elsewhere
};

/// Walks blocking statements; returns the set of own signals definitely
/// assigned afterwards. Reading an own signal before it is definitely
/// assigned is a zero-delay feedback path.
std::set<std::string> walk(const Stmt& s, std::set<std::string> defined, Flow& flow) {
  auto check_reads = [&](const Expr& e) {
    std::set<std::string> reads;
    expr_reads(e, reads);
    for (const auto& r : reads) {
      if (!flow.own.count(r)) {
        flow.external.insert(r);
      } else if (!defined.count(r)) {
        throw CombinationalLoop({r, r});
      }
    }
  };
  switch (s.kind) {
    case StmtKind::Block:
      for (const auto& child : s.body) defined = walk(child, std::move(defined), flow);
      return defined;
    case StmtKind::If: {
      check_reads(s.condition);
      std::set<std::string> then_defs = walk(s.body[0], defined, flow);
      if (s.body.size() < 2) return defined;
      std::set<std::string> else_defs = walk(s.body[1], defined, flow);
      std::set<std::string> both;
      std::set_intersection(then_defs.begin(), then_defs.end(), else_defs.begin(), else_defs.end(),
                            std::inserter(both, both.begin()));
      return both;
    }
    case StmtKind::Assign:
      check_reads(s.rhs);
      for (auto& n : assign_targets(s)) defined.insert(n);
      return defined;
  }
  return defined;
}

}  // namespace

// ---------------------------------------------------------------------------
// TransitionSystem

const std::string& TransitionSystem::name() const { return impl_->name; }
const std::vector<SignalInfo>& TransitionSystem::signals() const { return impl_->signals; }
const std::vector<SignalInfo>& TransitionSystem::registers() const { return impl_->registers; }
const std::vector<SignalInfo>& TransitionSystem::inputs() const { return impl_->inputs; }
const std::vector<SignalInfo>& TransitionSystem::outputs() const { return impl_->outputs; }
std::optional<int> TransitionSystem::reset_input() const { return impl_->reset_input; }
const std::string& TransitionSystem::clock() const { return impl_->clock; }
int TransitionSystem::state_bits() const { return impl_->state_bits; }
int TransitionSystem::input_bits() const { return impl_->input_bits; }
int TransitionSystem::free_input_bits() const {
  return impl_->input_bits - (impl_->reset_input ? 1 : 0);
}
const Valuation& TransitionSystem::reset_state() const { return impl_->reset_state; }
int TransitionSystem::register_signal(int i) const {
  return impl_->register_signal[static_cast<std::size_t>(i)];
}
int TransitionSystem::input_signal(int i) const {
  return impl_->input_signal[static_cast<std::size_t>(i)];
}

std::optional<int> TransitionSystem::signal_index(std::string_view name) const {
  for (std::size_t i = 0; i < impl_->signals.size(); ++i) {
    if (impl_->signals[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

void TransitionSystem::step(const Valuation& regs, const Valuation& inputs, Valuation& observed,
                            Valuation& next) const {
  const CompiledDesign& d = *impl_;
  observed.assign(d.signals.size(), 0);
  for (std::size_t i = 0; i < d.inputs.size(); ++i) {
    observed[static_cast<std::size_t>(d.input_signal[i])] = inputs[i] & static_cast<std::uint32_t>(mask(d.inputs[i].width));
  }
  for (std::size_t i = 0; i < d.registers.size(); ++i) {
    observed[static_cast<std::size_t>(d.register_signal[i])] = regs[i];
  }
  for (const auto& p : d.combinational) exec(p, observed, observed);
  next = regs;
  for (const auto& p : d.clocked) exec(p, observed, next);
}

Valuation TransitionSystem::observe(const Valuation& regs, const Valuation& inputs) const {
  Valuation observed, next;
  step(regs, inputs, observed, next);
  return observed;
}

Valuation TransitionSystem::next_state(const Valuation& regs, const Valuation& inputs) const {
  Valuation observed, next;
  step(regs, inputs, observed, next);
  return next;
}

Valuation TransitionSystem::outputs(const Valuation& regs, const Valuation& inputs) const {
  Valuation observed = observe(regs, inputs);
  Valuation out;
  for (int s : impl_->output_signal) out.push_back(observed[static_cast<std::size_t>(s)]);
  return out;
}

TransitionSystem elaborate(const Design& design) {
  auto d = std::make_shared<CompiledDesign>();
  d->name = design.name;
  d->clock = design.clock;
  Compiler compiler(design);

  std::map<std::string, int> register_slots;
  for (const auto& s : design.signals) {
    if (s.name == design.clock) continue;
    int idx = static_cast<int>(d->signals.size());
    d->signals.push_back({s.name, s.width, s.kind});
    if (s.direction == PortDirection::Input) {
      if (s.name == design.reset) d->reset_input = static_cast<int>(d->inputs.size());
      d->inputs.push_back(d->signals.back());
      d->input_signal.push_back(idx);
      d->input_bits += s.width;
    }
    if (s.kind == SignalKind::Register) {
      register_slots[s.name] = static_cast<int>(d->registers.size());
      d->registers.push_back(d->signals.back());
      d->register_signal.push_back(idx);
      d->state_bits += s.width;
    }
    if (s.direction == PortDirection::Output) {
      d->outputs.push_back(d->signals.back());
      d->output_signal.push_back(idx);
    }
  }

  // Drivers.
  std::map<std::string, std::size_t> driver;
  std::vector<std::set<std::string>> writes(design.processes.size());
  for (std::size_t i = 0; i < design.processes.size(); ++i) {
    stmt_writes(design.processes[i].body, writes[i]);
    for (const auto& w : writes[i]) {
      if (!driver.emplace(w, i).second) throw MultipleDrivers(w);
    }
  }

  // Combinational processes: latch check, dataflow, topological order.
  std::vector<std::size_t> comb;
  std::map<std::size_t, std::set<std::string>> external;
  for (std::size_t i = 0; i < design.processes.size(); ++i) {
    const Process& p = design.processes[i];
    if (p.kind == ProcessKind::Clocked) continue;
    comb.push_back(i);
    Flow flow{writes[i], {}};
    std::set<std::string> defined = walk(p.body, {}, flow);
    for (const auto& w : writes[i]) {
      if (!defined.count(w)) throw UnsupportedConstruct("latch inferred for '" + w + "'");
    }
    external[i] = std::move(flow.external);
  }
  std::map<std::size_t, std::set<std::size_t>> succ;
  std::map<std::size_t, int> indegree;
  for (std::size_t p : comb) indegree[p] = 0;
  for (std::size_t p : comb) {
    for (const auto& r : external[p]) {
      auto it = driver.find(r);
      if (it == driver.end()) continue;
      std::size_t q = it->second;
      if (design.processes[q].kind == ProcessKind::Clocked) continue;
      if (succ[q].insert(p).second) ++indegree[p];
    }
  }
  std::set<std::size_t> ready;
  for (auto [p, deg] : indegree) {
    if (deg == 0) ready.insert(p);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t p = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(p);
    for (std::size_t q : succ[p]) {
      if (--indegree[q] == 0) ready.insert(q);
    }
  }
  if (order.size() != comb.size()) {
    // Walk predecessors among the unresolved processes until one repeats.
    std::set<std::size_t> left;
    for (auto [p, deg] : indegree) {
      if (deg > 0) left.insert(p);
    }
    std::size_t at = *left.begin();
    std::vector<std::size_t> path;
    std::vector<std::string> via;
    std::map<std::size_t, std::size_t> seen;
    while (!seen.count(at)) {
      seen[at] = path.size();
      path.push_back(at);
      for (const auto& r : external[at]) {
        auto it = driver.find(r);
        if (it != driver.end() && left.count(it->second)) {
          via.push_back(r);
          at = it->second;
          break;
        }
      }
    }
    std::vector<std::string> cycle(via.begin() + static_cast<std::ptrdiff_t>(seen[at]), via.end());
    std::reverse(cycle.begin(), cycle.end());
    cycle.push_back(cycle.front());
    throw CombinationalLoop(cycle);
  }

  for (std::size_t p : order) d->combinational.push_back(compiler.compile_stmt(design.processes[p].body, nullptr));
  for (std::size_t i = 0; i < design.processes.size(); ++i) {
    if (design.processes[i].kind == ProcessKind::Clocked) {
      d->clocked.push_back(compiler.compile_stmt(design.processes[i].body, &register_slots));
    }
  }

  TransitionSystem ts;
  ts.impl_ = d;
  d->reset_state.assign(d->registers.size(), 0);
  if (d->reset_input) {
    Valuation in(d->inputs.size(), 0);
    in[static_cast<std::size_t>(*d->reset_input)] = 1;
    d->reset_state = ts.next_state(d->reset_state, in);
  }
  return ts;
}

}  // namespace svabench
