// SPDX-License-Identifier: Apache-2.0
//
// AST, parser and printer for the synthesizable Verilog subset:
// a single flat module with scalar/vector signals of at most 16 bits,
// continuous assigns, `always @(posedge clk)` and `always @(*)` blocks,
// if/else, begin/end and 2-valued expressions.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svabench {

inline constexpr int kMaxSignalWidth = 16;

enum class UnaryOp { LogicalNot, BitNot, ReduceAnd, ReduceOr, ReduceXor, Negate };

enum class BinaryOp {
  Add,
  Sub,
  ShiftLeft,
  ShiftRight,
  Less,
  LessEqual,
  Greater,
  GreaterEqual,
  Equal,
  NotEqual,
  BitAnd,
  BitXor,
  BitOr,
  LogicalAnd,
  LogicalOr,
};

enum class ExprKind { Identifier, Number, Unary, Binary, Ternary, Concat, BitSelect, PartSelect };

/// Expression node. Only the fields relevant to `kind` are meaningful; the
/// others keep their defaults so that defaulted equality is structural.
struct Expr {
  ExprKind kind = ExprKind::Number;
  std::string name;             // Identifier, BitSelect, PartSelect
  std::uint64_t value = 0;      // Number
  int width = 0;                // Number: 0 = unsized (32-bit)
  UnaryOp unary = UnaryOp::LogicalNot;
  BinaryOp binary = BinaryOp::Add;
  int msb = 0;                  // BitSelect index / PartSelect msb
  int lsb = 0;                  // PartSelect lsb
  std::vector<Expr> operands;   // Unary: 1, Binary: 2, Ternary: 3, Concat: n

  bool operator==(const Expr&) const = default;

  static Expr identifier(std::string name);
  static Expr number(std::uint64_t value, int width = 0);
  static Expr unary_op(UnaryOp op, Expr operand);
  static Expr binary_op(BinaryOp op, Expr lhs, Expr rhs);
  static Expr ternary(Expr cond, Expr then_expr, Expr else_expr);
  static Expr concat(std::vector<Expr> parts);
  static Expr bit_select(std::string name, int index);
  static Expr part_select(std::string name, int msb, int lsb);
};

enum class StmtKind { Block, If, Assign };

struct Stmt {
  StmtKind kind = StmtKind::Block;
  Expr condition;               // If
  Expr lhs;                     // Assign: Identifier or Concat of Identifiers
  Expr rhs;                     // Assign
  bool nonblocking = false;     // Assign
  std::vector<Stmt> body;       // Block: children; If: then [, else]

  bool operator==(const Stmt&) const = default;

  bool has_else() const { return kind == StmtKind::If && body.size() == 2; }

  static Stmt block(std::vector<Stmt> children);
  static Stmt if_else(Expr condition, Stmt then_stmt,
                      std::optional<Stmt> else_stmt = std::nullopt);
  static Stmt assign(Expr lhs, Expr rhs, bool nonblocking);
};

enum class ProcessKind { Continuous, Combinational, Clocked };

struct Process {
  ProcessKind kind = ProcessKind::Continuous;
  std::string clock;        // Clocked only
  std::string reset_edge;   // Clocked only: `or posedge <reset_edge>`
  Stmt body;

  bool operator==(const Process&) const = default;
};

enum class PortDirection { None, Input, Output };
enum class SignalKind { Input, Output, Register, Wire };

struct SignalDecl {
  std::string name;
  int width = 1;
  int lsb = 0;  // declared range is [lsb + width - 1 : lsb]
  SignalKind kind = SignalKind::Wire;
  PortDirection direction = PortDirection::None;

  int msb() const { return lsb + width - 1; }
  bool operator==(const SignalDecl&) const = default;
};

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Design {
  std::string name;
  std::vector<std::string> ports;       // header order
  std::vector<SignalDecl> signals;      // ports first, then internal decls
  std::vector<Process> processes;
  std::string clock;                    // empty for purely combinational designs
  std::string reset;                    // `rst` when present
  std::map<std::string, SourceSpan> spans;  // per declaration; not compared

  const SignalDecl* find(std::string_view signal) const;
  std::vector<std::string> inputs() const;
  std::vector<std::string> outputs() const;
  std::vector<std::string> registers() const;
  bool is_sequential() const { return !registers().empty(); }

  bool operator==(const Design& other) const;
};

/// Parses one module. Throws ParseError or UnsupportedConstruct.
Design parse_design(std::string_view source);

/// Canonical source text; parse_design(render_design(d)) == d.
std::string render_design(const Design& design);
std::string render_expr(const Expr& expr);

std::string_view to_string(SignalKind kind);

/// Drops `//` and `/* */` comments and collapses whitespace runs (newlines
/// included) to one space; leading and trailing whitespace is trimmed. A
/// comment between two tokens still separates them. String literals are
/// copied untouched. Throws UnterminatedComment.
std::string strip_for_prompt(std::string_view source);

}  // namespace svabench
