// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "svabench/errors.hpp"
#include "svabench/verilog.hpp"

namespace svabench {

// ---------------------------------------------------------------------------
// Node constructors

Expr Expr::identifier(std::string name) {
  Expr e;
  e.kind = ExprKind::Identifier;
  e.name = std::move(name);
  return e;
}

Expr Expr::number(std::uint64_t value, int width) {
  Expr e;
  e.kind = ExprKind::Number;
  e.value = value;
  e.width = width;
  return e;
}

Expr Expr::unary_op(UnaryOp op, Expr operand) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.unary = op;
  e.operands.push_back(std::move(operand));
  return e;
}

Expr Expr::binary_op(BinaryOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.binary = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

Expr Expr::ternary(Expr cond, Expr then_expr, Expr else_expr) {
  Expr e;
  e.kind = ExprKind::Ternary;
  e.operands.push_back(std::move(cond));
  e.operands.push_back(std::move(then_expr));
  e.operands.push_back(std::move(else_expr));
  return e;
}

Expr Expr::concat(std::vector<Expr> parts) {
  Expr e;
  e.kind = ExprKind::Concat;
  e.operands = std::move(parts);
  return e;
}

Expr Expr::bit_select(std::string name, int index) {
  Expr e;
  e.kind = ExprKind::BitSelect;
  e.name = std::move(name);
  e.msb = index;
  return e;
}

Expr Expr::part_select(std::string name, int msb, int lsb) {
  Expr e;
  e.kind = ExprKind::PartSelect;
  e.name = std::move(name);
  e.msb = msb;
  e.lsb = lsb;
  return e;
}

Stmt Stmt::block(std::vector<Stmt> children) {
  Stmt s;
  s.kind = StmtKind::Block;
  s.body = std::move(children);
  return s;
}

Stmt Stmt::if_else(Expr condition, Stmt then_stmt, std::optional<Stmt> else_stmt) {
  Stmt s;
  s.kind = StmtKind::If;
  s.condition = std::move(condition);
  s.body.push_back(std::move(then_stmt));
  if (else_stmt) s.body.push_back(std::move(*else_stmt));
  return s;
}

Stmt Stmt::assign(Expr lhs, Expr rhs, bool nonblocking) {
  Stmt s;
  s.kind = StmtKind::Assign;
  s.lhs = std::move(lhs);
  s.rhs = std::move(rhs);
  s.nonblocking = nonblocking;
  return s;
}

// ---------------------------------------------------------------------------
// Design queries

const SignalDecl* Design::find(std::string_view signal) const {
  for (const auto& s : signals) {
    if (s.name == signal) return &s;
  }
  return nullptr;
}

std::vector<std::string> Design::inputs() const {
  std::vector<std::string> out;
  for (const auto& s : signals) {
    if (s.direction == PortDirection::Input) out.push_back(s.name);
  }
  return out;
}

std::vector<std::string> Design::outputs() const {
  std::vector<std::string> out;
  for (const auto& s : signals) {
    if (s.direction == PortDirection::Output) out.push_back(s.name);
  }
  return out;
}

std::vector<std::string> Design::registers() const {
  std::vector<std::string> out;
  for (const auto& s : signals) {
    if (s.kind == SignalKind::Register) out.push_back(s.name);
  }
  return out;
}

bool Design::operator==(const Design& other) const {
  return name == other.name && ports == other.ports && signals == other.signals &&
         processes == other.processes && clock == other.clock && reset == other.reset;
}

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Input: return "input";
    case SignalKind::Output: return "output";
    case SignalKind::Register: return "register";
    case SignalKind::Wire: return "wire";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Identifier, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t value = 0;
  int width = 0;
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

const std::set<std::string, std::less<>> kUnsupportedKeywords = {
    "initial",  "generate",  "endgenerate", "genvar",    "for",       "while",
    "repeat",   "forever",   "case",        "casez",     "casex",     "function",
    "task",     "parameter", "localparam",  "integer",   "real",      "time",
    "realtime", "defparam",  "specify",     "inout",     "always_ff", "always_comb",
    "always_latch", "logic", "supply0",     "supply1",   "tri",       "wand",
    "wor",      "signed",    "automatic",   "fork",      "join",      "wait",
    "disable",  "force",     "release",     "deassign",  "primitive", "table",
    "event",    "tri0",      "tri1",        "trireg",    "byte",      "int",
    "bit",      "struct",    "typedef",     "interface", "package",   "import",
};

const std::set<std::string, std::less<>> kMultiCharPuncts = {
    "<<<", ">>>", "===", "!==", "<=", ">=", "==", "!=", "&&", "||",
    "<<",  ">>",  "~&",  "~|",  "~^", "^~", "**", "->", "+:", "-:",
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.line = line_;
      t.column = col_;
      t.offset = pos_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Identifier;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                src_[pos_] == '$')) {
          advance();
        }
        t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
      } else if (c == '\\') {
        throw UnsupportedConstruct("escaped identifier", line_, col_);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
        lex_number(t);
      } else if (c == '$') {
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        throw UnsupportedConstruct("system task " + std::string(src_.substr(start, pos_ - start)),
                                   t.line, t.column);
      } else if (c == '"') {
        throw UnsupportedConstruct("string literal", line_, col_);
      } else if (c == '`') {
        lex_directive();
        continue;
      } else if (c == '(' && peek(1) == '*' && !closes_star_paren()) {
        throw UnsupportedConstruct("attribute instance", line_, col_);
      } else {
        t.kind = Tok::Punct;
        std::size_t len = 1;
        for (std::size_t n : {3u, 2u}) {
          if (pos_ + n <= src_.size() && kMultiCharPuncts.count(src_.substr(pos_, n))) {
            len = n;
            break;
          }
        }
        t.text = std::string(src_.substr(pos_, len));
        for (std::size_t i = 0; i < len; ++i) advance();
        if (std::string_view("()[]{};:,.=<>!~&|^+-*/%?@#").find(t.text[0]) == std::string_view::npos) {
          throw ParseError("unexpected character '" + t.text + "'", t.line, t.column);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  // `(*)` or `( * )` is an event list, anything else starting `(*` is an attribute.
  bool closes_star_paren() const {
    std::size_t i = pos_ + 2;
    while (i < src_.size() && std::isspace(static_cast<unsigned char>(src_[i]))) ++i;
    return i < src_.size() && src_[i] == ')';
  }

  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) throw ParseError("unterminated block comment", line, col);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_directive() {
    int line = line_, col = col_;
    std::size_t start = pos_;
    advance();
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) advance();
    std::string name(src_.substr(start, pos_ - start));
    if (name != "`timescale" && name != "`default_nettype" && name != "`resetall") {
      throw UnsupportedConstruct("compiler directive " + name, line, col);
    }
    while (pos_ < src_.size() && src_[pos_] != '\n') advance();
  }

  void lex_number(Token& t) {
    t.kind = Tok::Number;
    std::string size_digits;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      if (src_[pos_] != '_') size_digits += src_[pos_];
      advance();
    }
    if (pos_ < src_.size() && src_[pos_] == '\'') {
      advance();
      if (pos_ < src_.size() && (src_[pos_] == 's' || src_[pos_] == 'S')) {
        throw UnsupportedConstruct("signed literal", t.line, t.column);
      }
      if (pos_ >= src_.size()) throw ParseError("incomplete based literal", t.line, t.column);
      char base_char = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[pos_])));
      int base = 0;
      switch (base_char) {
        case 'b': base = 2; break;
        case 'o': base = 8; break;
        case 'd': base = 10; break;
        case 'h': base = 16; break;
        default:
          if (base_char == '0' || base_char == '1' || base_char == 'x' || base_char == 'z') {
            throw UnsupportedConstruct("fill literal", t.line, t.column);
          }
          throw ParseError("invalid number base", line_, col_, {"b", "o", "d", "h"});
      }
      advance();
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      std::string digits;
      while (pos_ < src_.size() &&
             (std::isxdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == 'x' || src_[pos_] == 'X' || src_[pos_] == 'z' || src_[pos_] == 'Z' ||
              src_[pos_] == '?')) {
        char d = src_[pos_];
        if (d == 'x' || d == 'X' || d == 'z' || d == 'Z' || d == '?') {
          throw UnsupportedConstruct("4-state literal", t.line, t.column);
        }
        if (d != '_') digits += d;
        advance();
      }
      if (digits.empty()) throw ParseError("based literal has no digits", line_, col_);
      std::uint64_t value = 0;
      for (char d : digits) {
        int v = std::isdigit(static_cast<unsigned char>(d))
                    ? d - '0'
                    : std::tolower(static_cast<unsigned char>(d)) - 'a' + 10;
        if (v >= base) throw ParseError("digit out of range for base", t.line, t.column);
        value = value * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(v);
        if (value > 0xffffffffull) throw UnsupportedConstruct("literal wider than 32 bits", t.line, t.column);
      }
      int width = 0;
      if (!size_digits.empty()) {
        width = std::stoi(size_digits.size() > 3 ? std::string("999") : size_digits);
        if (width == 0) throw ParseError("zero-width literal", t.line, t.column);
        if (width > 32) throw UnsupportedConstruct("literal wider than 32 bits", t.line, t.column);
        if (width < 64 && (value >> width) != 0) {
          throw ParseError("literal value does not fit in " + std::to_string(width) + " bits",
                           t.line, t.column);
        }
      }
      t.value = value;
      t.width = width;
    } else {
      if (size_digits.size() > 10 || std::stoull(size_digits) > 0xffffffffull) {
        throw UnsupportedConstruct("literal wider than 32 bits", t.line, t.column);
      }
      t.value = std::stoull(size_digits);
      t.width = 0;
    }
    t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

struct Reference {
  std::string name;
  int line;
  int column;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(Lexer(src).run()) {}

  Design parse() {
    while (is_punct(";")) next();
    expect_keyword("module");
    design_.name = expect_identifier("module name");
    if (is_punct("#")) unsupported("module parameters");
    bool ansi = false;
    if (accept_punct("(")) {
      if (!is_punct(")")) {
        if (is_keyword("input") || is_keyword("output") || is_keyword("inout")) {
          ansi = true;
          parse_ansi_ports();
        } else {
          for (;;) {
            const Token& t = cur();
            std::string name = expect_identifier("port name");
            if (std::find(design_.ports.begin(), design_.ports.end(), name) != design_.ports.end()) {
              throw ParseError("duplicate port '" + name + "'", t.line, t.column);
            }
            design_.ports.push_back(name);
            if (!accept_punct(",")) break;
          }
        }
      }
      expect_punct(")");
    }
    expect_punct(";");
    (void)ansi;

    while (!is_keyword("endmodule")) {
      if (cur().kind == Tok::End) error("unexpected end of input", {"endmodule"});
      parse_item();
    }
    next();
    if (cur().kind != Tok::End) {
      if (is_keyword("module")) unsupported("multiple modules");
      error("unexpected text after endmodule", {"end of input"});
    }
    finish();
    return std::move(design_);
  }

 private:
  // -- token helpers --------------------------------------------------------
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek_tok(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  void next() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_keyword(std::string_view k) const {
    return cur().kind == Tok::Identifier && cur().text == k;
  }
  bool accept_punct(std::string_view p) {
    if (is_punct(p)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_keyword(std::string_view k) {
    if (is_keyword(k)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& message, std::vector<std::string> expected = {}) const {
    throw ParseError(message + describe_found(), cur().line, cur().column, std::move(expected));
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedConstruct(what, cur().line, cur().column);
  }
  std::string describe_found() const {
    if (cur().kind == Tok::End) return ", found end of input";
    return ", found '" + cur().text + "'";
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) error("syntax error", {"'" + std::string(p) + "'"});
  }
  void expect_keyword(std::string_view k) {
    if (!accept_keyword(k)) error("syntax error", {"'" + std::string(k) + "'"});
  }
  void check_not_reserved(const Token& t) const {
    static const std::set<std::string, std::less<>> reserved = {
        "module", "endmodule", "input", "output", "wire", "reg", "assign", "always",
        "begin", "end", "if", "else", "posedge", "negedge", "or"};
    if (reserved.count(t.text)) {
      throw ParseError("unexpected keyword '" + t.text + "'", t.line, t.column, {"identifier"});
    }
    if (kUnsupportedKeywords.count(t.text)) throw UnsupportedConstruct(t.text, t.line, t.column);
  }
  std::string expect_identifier(const std::string& what) {
    if (cur().kind != Tok::Identifier) error("syntax error", {what});
    check_not_reserved(cur());
    std::string name = cur().text;
    next();
    return name;
  }

  // -- declarations ---------------------------------------------------------
  struct Range {
    int width = 1;
    int lsb = 0;
  };

  Range parse_optional_range() {
    Range r;
    if (!is_punct("[")) return r;
    next();
    if (cur().kind != Tok::Number) unsupported("non-constant range");
    int msb = static_cast<int>(cur().value);
    next();
    expect_punct(":");
    if (cur().kind != Tok::Number) unsupported("non-constant range");
    int lsb = static_cast<int>(cur().value);
    next();
    expect_punct("]");
    if (msb < lsb) unsupported("ascending range [" + std::to_string(msb) + ":" + std::to_string(lsb) + "]");
    r.width = msb - lsb + 1;
    r.lsb = lsb;
    if (r.width > kMaxSignalWidth) unsupported("signal wider than 16 bits");
    return r;
  }

  SignalDecl* find_signal(const std::string& name) {
    for (auto& s : design_.signals) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  void declare(const Token& at, const std::string& name, PortDirection dir, Range range,
               std::size_t span_begin) {
    if (SignalDecl* existing = find_signal(name)) {
      // `output q; reg q;` style redeclaration of a port as a variable.
      bool port_redecl = existing->direction != PortDirection::None &&
                         dir == PortDirection::None && existing->width == range.width &&
                         existing->lsb == range.lsb && !redeclared_.count(name);
      if (!port_redecl) {
        throw ParseError("'" + name + "' is already declared", at.line, at.column);
      }
      redeclared_.insert(name);
      return;
    }
    if (dir == PortDirection::None &&
        std::find(design_.ports.begin(), design_.ports.end(), name) != design_.ports.end()) {
      throw ParseError("port '" + name + "' needs a direction before its type", at.line, at.column);
    }
    SignalDecl decl;
    decl.name = name;
    decl.width = range.width;
    decl.lsb = range.lsb;
    decl.direction = dir;
    design_.signals.push_back(decl);
    design_.spans[name] = SourceSpan{span_begin, span_begin};
    pending_spans_.push_back(name);
  }

  void close_spans() {
    std::size_t end = toks_[pos_ > 0 ? pos_ - 1 : 0].offset + toks_[pos_ > 0 ? pos_ - 1 : 0].text.size();
    for (const auto& n : pending_spans_) design_.spans[n].end = end;
    pending_spans_.clear();
  }

  PortDirection parse_direction() {
    if (accept_keyword("input")) return PortDirection::Input;
    if (accept_keyword("output")) return PortDirection::Output;
    if (is_keyword("inout")) unsupported("inout port");
    error("syntax error", {"'input'", "'output'"});
  }

  void parse_ansi_ports() {
    PortDirection dir = PortDirection::None;
    Range range;
    for (;;) {
      std::size_t begin = cur().offset;
      if (is_keyword("input") || is_keyword("output") || is_keyword("inout")) {
        dir = parse_direction();
        (void)(accept_keyword("wire") || accept_keyword("reg"));
        if (is_keyword("signed")) unsupported("signed");
        range = parse_optional_range();
      }
      const Token& at = cur();
      std::string name = expect_identifier("port name");
      design_.ports.push_back(name);
      declare(at, name, dir, range, begin);
      close_spans();
      if (!accept_punct(",")) break;
    }
  }

  void parse_item() {
    const Token& t = cur();
    std::size_t begin = t.offset;
    if (t.kind != Tok::Identifier) error("syntax error", {"module item"});
    if (kUnsupportedKeywords.count(t.text)) unsupported(t.text);
    if (is_keyword("input") || is_keyword("output") || is_keyword("inout")) {
      PortDirection dir = parse_direction();
      (void)(accept_keyword("wire") || accept_keyword("reg"));
      if (is_keyword("signed")) unsupported("signed");
      Range range = parse_optional_range();
      for (;;) {
        const Token& at = cur();
        std::string name = expect_identifier("port name");
        if (std::find(design_.ports.begin(), design_.ports.end(), name) == design_.ports.end()) {
          throw ParseError("'" + name + "' is not in the port list", at.line, at.column);
        }
        declare(at, name, dir, range, begin);
        if (!accept_punct(",")) break;
      }
      expect_punct(";");
      close_spans();
      return;
    }
    if (is_keyword("wire") || is_keyword("reg")) {
      bool is_reg = cur().text == "reg";
      next();
      if (is_keyword("signed")) unsupported("signed");
      Range range = parse_optional_range();
      for (;;) {
        const Token& at = cur();
        std::string name = expect_identifier("signal name");
        if (is_punct("[")) unsupported("memory array");
        declare(at, name, PortDirection::None, range, begin);
        if (accept_punct("=")) {
          if (is_reg) unsupported("register initializer");
          Process p;
          p.kind = ProcessKind::Continuous;
          p.body = Stmt::assign(Expr::identifier(name), parse_expr(), false);
          note_assign_target(at, name, ProcessKind::Continuous, false);
          design_.processes.push_back(std::move(p));
        }
        if (!accept_punct(",")) break;
      }
      expect_punct(";");
      close_spans();
      return;
    }
    if (accept_keyword("assign")) {
      if (is_punct("#")) unsupported("delay control");
      for (;;) {
        Process p;
        p.kind = ProcessKind::Continuous;
        Expr lhs = parse_lvalue(ProcessKind::Continuous, false);
        expect_punct("=");
        p.body = Stmt::assign(std::move(lhs), parse_expr(), false);
        design_.processes.push_back(std::move(p));
        if (!accept_punct(",")) break;
      }
      expect_punct(";");
      return;
    }
    if (accept_keyword("always")) {
      parse_always();
      return;
    }
    if (is_keyword("module")) unsupported("nested module");
    if (t.kind == Tok::Identifier &&
        (peek_tok().kind == Tok::Identifier || (peek_tok().kind == Tok::Punct && peek_tok().text == "#"))) {
      unsupported("module instantiation");
    }
    error("syntax error", {"module item"});
  }

  void parse_always() {
    if (!accept_punct("@")) unsupported("always block without event control");
    Process p;
    if (accept_punct("*")) {
      p.kind = ProcessKind::Combinational;
    } else {
      expect_punct("(");
      if (accept_punct("*")) {
        p.kind = ProcessKind::Combinational;
      } else if (is_keyword("posedge") || is_keyword("negedge")) {
        p.kind = ProcessKind::Clocked;
        if (is_keyword("negedge")) unsupported("negedge clocking");
        next();
        const Token& clk_tok = cur();
        p.clock = expect_identifier("clock name");
        references_.push_back({p.clock, clk_tok.line, clk_tok.column});
        if (accept_keyword("or") || accept_punct(",")) {
          if (is_keyword("negedge")) unsupported("negedge reset");
          if (!accept_keyword("posedge")) unsupported("mixed edge/level sensitivity");
          const Token& rst_tok = cur();
          p.reset_edge = expect_identifier("reset name");
          references_.push_back({p.reset_edge, rst_tok.line, rst_tok.column});
          if (is_keyword("or") || is_punct(",")) unsupported("more than two edge events");
        }
      } else {
        // Level-sensitive list: treated as a combinational block.
        p.kind = ProcessKind::Combinational;
        for (;;) {
          const Token& at = cur();
          std::string name = expect_identifier("signal name");
          references_.push_back({name, at.line, at.column});
          if (!accept_keyword("or") && !accept_punct(",")) break;
        }
      }
      expect_punct(")");
    }
    p.body = parse_stmt(p.kind);
    design_.processes.push_back(std::move(p));
  }

  // -- statements -----------------------------------------------------------
  Stmt parse_stmt(ProcessKind context) {
    if (accept_keyword("begin")) {
      if (accept_punct(":")) expect_identifier("block label");
      std::vector<Stmt> children;
      while (!accept_keyword("end")) {
        if (cur().kind == Tok::End) error("unexpected end of input", {"'end'"});
        children.push_back(parse_stmt(context));
      }
      return Stmt::block(std::move(children));
    }
    if (accept_keyword("if")) {
      expect_punct("(");
      Expr cond = parse_expr();
      expect_punct(")");
      Stmt then_stmt = parse_stmt(context);
      if (accept_keyword("else")) {
        return Stmt::if_else(std::move(cond), std::move(then_stmt), parse_stmt(context));
      }
      return Stmt::if_else(std::move(cond), std::move(then_stmt));
    }
    if (accept_punct(";")) return Stmt::block({});
    if (is_punct("#")) unsupported("delay control");
    if (cur().kind == Tok::Identifier && kUnsupportedKeywords.count(cur().text)) unsupported(cur().text);
    const Token& start = cur();
    Expr lhs = parse_lvalue(context, true);
    bool nonblocking;
    if (accept_punct("<=")) {
      nonblocking = true;
    } else if (accept_punct("=")) {
      nonblocking = false;
    } else {
      error("syntax error", {"'='", "'<='"});
    }
    if (is_punct("#")) unsupported("intra-assignment delay");
    if (context == ProcessKind::Clocked && !nonblocking) {
      throw ParseError("blocking assignment in clocked process", start.line, start.column, {"'<='"});
    }
    if (context != ProcessKind::Clocked && nonblocking) {
      throw ParseError("nonblocking assignment in combinational process", start.line, start.column,
                       {"'='"});
    }
    for (const auto& target : lhs_names(lhs)) note_assign_target(start, target, context, nonblocking);
    Expr rhs = parse_expr();
    expect_punct(";");
    return Stmt::assign(std::move(lhs), std::move(rhs), nonblocking);
  }

  static std::vector<std::string> lhs_names(const Expr& lhs) {
    if (lhs.kind == ExprKind::Identifier) return {lhs.name};
    std::vector<std::string> out;
    for (const auto& part : lhs.operands) out.push_back(part.name);
    return out;
  }

  void note_assign_target(const Token& at, const std::string& name, ProcessKind context, bool nonblocking) {
    targets_.push_back({name, at.line, at.column});
    if (context == ProcessKind::Clocked && nonblocking) registered_.insert(name);
  }

  Expr parse_lvalue(ProcessKind context, bool in_process) {
    (void)in_process;
    if (accept_punct("{")) {
      std::vector<Expr> parts;
      for (;;) {
        const Token& at = cur();
        std::string name = expect_identifier("assignment target");
        if (is_punct("[")) unsupported("bit/part-select assignment target");
        references_.push_back({name, at.line, at.column});
        parts.push_back(Expr::identifier(name));
        if (!accept_punct(",")) break;
      }
      expect_punct("}");
      if (context == ProcessKind::Continuous) {
        for (const auto& p : parts) note_assign_target(cur(), p.name, context, false);
      }
      return Expr::concat(std::move(parts));
    }
    const Token& at = cur();
    std::string name = expect_identifier("assignment target");
    if (is_punct("[")) unsupported("bit/part-select assignment target");
    references_.push_back({name, at.line, at.column});
    if (context == ProcessKind::Continuous) note_assign_target(at, name, context, false);
    return Expr::identifier(name);
  }

  // -- expressions ----------------------------------------------------------
  struct BinInfo {
    BinaryOp op;
    int prec;
  };

  std::optional<BinInfo> binary_info() const {
    if (cur().kind != Tok::Punct) return std::nullopt;
    static const std::unordered_map<std::string, BinInfo> table = {
        {"||", {BinaryOp::LogicalOr, 2}},  {"&&", {BinaryOp::LogicalAnd, 3}},
        {"|", {BinaryOp::BitOr, 4}},       {"^", {BinaryOp::BitXor, 5}},
        {"&", {BinaryOp::BitAnd, 6}},      {"==", {BinaryOp::Equal, 7}},
        {"!=", {BinaryOp::NotEqual, 7}},   {"<", {BinaryOp::Less, 8}},
        {"<=", {BinaryOp::LessEqual, 8}},  {">", {BinaryOp::Greater, 8}},
        {">=", {BinaryOp::GreaterEqual, 8}}, {"<<", {BinaryOp::ShiftLeft, 9}},
        {">>", {BinaryOp::ShiftRight, 9}}, {"+", {BinaryOp::Add, 10}},
        {"-", {BinaryOp::Sub, 10}},
    };
    auto it = table.find(cur().text);
    if (it == table.end()) return std::nullopt;
    return it->second;
  }

  void reject_unsupported_operator() const {
    static const std::set<std::string, std::less<>> ops = {
        "*", "/", "%", "**", "===", "!==", "<<<", ">>>", "~&", "~|", "~^", "^~", "+:", "-:"};
    if (cur().kind == Tok::Punct && ops.count(cur().text)) {
      throw UnsupportedConstruct("operator " + cur().text, cur().line, cur().column);
    }
  }

  Expr parse_expr() {
    Expr cond = parse_binary(2);
    if (accept_punct("?")) {
      Expr then_expr = parse_expr();
      expect_punct(":");
      Expr else_expr = parse_expr();
      return Expr::ternary(std::move(cond), std::move(then_expr), std::move(else_expr));
    }
    return cond;
  }

  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    for (;;) {
      reject_unsupported_operator();
      auto info = binary_info();
      if (!info || info->prec < min_prec) return lhs;
      next();
      Expr rhs = parse_binary(info->prec + 1);
      lhs = Expr::binary_op(info->op, std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_unary() {
    reject_unsupported_operator();
    if (cur().kind == Tok::Punct) {
      static const std::unordered_map<std::string, UnaryOp> table = {
          {"!", UnaryOp::LogicalNot}, {"~", UnaryOp::BitNot},     {"&", UnaryOp::ReduceAnd},
          {"|", UnaryOp::ReduceOr},   {"^", UnaryOp::ReduceXor},  {"-", UnaryOp::Negate},
      };
      auto it = table.find(cur().text);
      if (it != table.end()) {
        next();
        return Expr::unary_op(it->second, parse_unary());
      }
      if (accept_punct("+")) return parse_unary();
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = cur();
    if (t.kind == Tok::Number) {
      Expr e = Expr::number(t.value, t.width);
      next();
      return e;
    }
    if (accept_punct("(")) {
      Expr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (accept_punct("{")) {
      if (cur().kind == Tok::Number && peek_tok().kind == Tok::Punct && peek_tok().text == "{") {
        unsupported("replication");
      }
      std::vector<Expr> parts;
      for (;;) {
        parts.push_back(parse_expr());
        if (!accept_punct(",")) break;
      }
      expect_punct("}");
      return Expr::concat(std::move(parts));
    }
    if (t.kind == Tok::Identifier) {
      const Token& at = cur();
      std::string name = expect_identifier("expression");
      if (is_punct("(")) unsupported("function call");
      references_.push_back({name, at.line, at.column});
      if (accept_punct("[")) {
        if (cur().kind != Tok::Number) unsupported("variable bit-select");
        int msb = static_cast<int>(cur().value);
        next();
        if (is_punct("+:") || is_punct("-:")) unsupported("indexed part-select");
        if (accept_punct(":")) {
          if (cur().kind != Tok::Number) unsupported("variable part-select");
          int lsb = static_cast<int>(cur().value);
          next();
          expect_punct("]");
          return Expr::part_select(std::move(name), msb, lsb);
        }
        expect_punct("]");
        return Expr::bit_select(std::move(name), msb);
      }
      return Expr::identifier(std::move(name));
    }
    error("syntax error", {"expression"});
  }

  // -- post-parse validation ------------------------------------------------
  void finish() {
    for (const auto& port : design_.ports) {
      const SignalDecl* s = find_signal(port);
      if (!s || s->direction == PortDirection::None) {
        throw ParseError("port '" + port + "' has no direction declaration", 1, 1);
      }
    }
    // Canonical order: header ports first, then internal declarations.
    std::vector<SignalDecl> ordered;
    for (const auto& port : design_.ports) ordered.push_back(*find_signal(port));
    for (const auto& s : design_.signals) {
      if (s.direction == PortDirection::None) ordered.push_back(s);
    }
    design_.signals = std::move(ordered);

    for (const auto& ref : references_) {
      if (!find_signal(ref.name)) {
        throw ParseError("undeclared identifier '" + ref.name + "'", ref.line, ref.column);
      }
    }
    for (const auto& t : targets_) {
      const SignalDecl* s = find_signal(t.name);
      if (s && s->direction == PortDirection::Input) {
        throw ParseError("assignment to input '" + t.name + "'", t.line, t.column);
      }
    }

    std::string clock;
    for (const auto& p : design_.processes) {
      if (p.kind != ProcessKind::Clocked) continue;
      if (!clock.empty() && p.clock != clock) throw UnsupportedConstruct("multiple clock domains");
      clock = p.clock;
      const SignalDecl* c = find_signal(p.clock);
      if (c->direction != PortDirection::Input) {
        throw UnsupportedConstruct("clock '" + p.clock + "' is not an input");
      }
      if (!p.reset_edge.empty() && find_signal(p.reset_edge)->direction != PortDirection::Input) {
        throw UnsupportedConstruct("reset '" + p.reset_edge + "' is not an input");
      }
    }
    if (clock.empty()) {
      const SignalDecl* c = find_signal("clk");
      if (c && c->direction == PortDirection::Input) clock = "clk";
    }
    design_.clock = clock;
    const SignalDecl* r = find_signal("rst");
    if (r && r->direction == PortDirection::Input && r->width == 1) design_.reset = "rst";

    if (!clock.empty()) {
      if (find_signal(clock)->width != 1) throw UnsupportedConstruct("vector clock");
      std::size_t clock_uses = 0;
      for (const auto& ref : references_) clock_uses += ref.name == clock;
      std::size_t edge_uses = 0;
      for (const auto& p : design_.processes) edge_uses += p.kind == ProcessKind::Clocked;
      if (clock_uses > edge_uses) throw UnsupportedConstruct("clock '" + clock + "' used as data");
    }

    for (auto& s : design_.signals) {
      if (s.direction == PortDirection::Input) {
        s.kind = SignalKind::Input;
      } else if (registered_.count(s.name)) {
        s.kind = SignalKind::Register;
      } else if (s.direction == PortDirection::Output) {
        s.kind = SignalKind::Output;
      } else {
        s.kind = SignalKind::Wire;
      }
    }
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Design design_;
  std::vector<Reference> references_;
  std::vector<Reference> targets_;
  std::set<std::string> registered_;
  std::set<std::string> redeclared_;
  std::vector<std::string> pending_spans_;
};

// ---------------------------------------------------------------------------
// Printer

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Ternary: return 1;
    case ExprKind::Binary:
      switch (e.binary) {
        case BinaryOp::LogicalOr: return 2;
        case BinaryOp::LogicalAnd: return 3;
        case BinaryOp::BitOr: return 4;
        case BinaryOp::BitXor: return 5;
        case BinaryOp::BitAnd: return 6;
        case BinaryOp::Equal:
        case BinaryOp::NotEqual: return 7;
        case BinaryOp::Less:
        case BinaryOp::LessEqual:
        case BinaryOp::Greater:
        case BinaryOp::GreaterEqual: return 8;
        case BinaryOp::ShiftLeft:
        case BinaryOp::ShiftRight: return 9;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 10;
      }
      return 0;
    case ExprKind::Unary: return 11;
    default: return 12;
  }
}

std::string_view op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::ShiftLeft: return "<<";
    case BinaryOp::ShiftRight: return ">>";
    case BinaryOp::Less: return "<";
    case BinaryOp::LessEqual: return "<=";
    case BinaryOp::Greater: return ">";
    case BinaryOp::GreaterEqual: return ">=";
    case BinaryOp::Equal: return "==";
    case BinaryOp::NotEqual: return "!=";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitXor: return "^";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::LogicalAnd: return "&&";
    case BinaryOp::LogicalOr: return "||";
  }
  return "?";
}

std::string_view op_text(UnaryOp op) {
  switch (op) {
    case UnaryOp::LogicalNot: return "!";
    case UnaryOp::BitNot: return "~";
    case UnaryOp::ReduceAnd: return "&";
    case UnaryOp::ReduceOr: return "|";
    case UnaryOp::ReduceXor: return "^";
    case UnaryOp::Negate: return "-";
  }
  return "?";
}

std::string render_number(std::uint64_t value, int width) {
  if (width == 0) return std::to_string(value);
  std::string out = std::to_string(width) + "'";
  if (width <= 4) {
    out += 'b';
    for (int i = width - 1; i >= 0; --i) out += ((value >> i) & 1u) ? '1' : '0';
  } else {
    std::ostringstream hex;
    hex << std::hex << value;
    out += 'h' + hex.str();
  }
  return out;
}

void render_expr_to(std::string& out, const Expr& e, int min_prec) {
  int prec = precedence(e);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case ExprKind::Identifier: out += e.name; break;
    case ExprKind::Number: out += render_number(e.value, e.width); break;
    case ExprKind::BitSelect: out += e.name + "[" + std::to_string(e.msb) + "]"; break;
    case ExprKind::PartSelect:
      out += e.name + "[" + std::to_string(e.msb) + ":" + std::to_string(e.lsb) + "]";
      break;
    case ExprKind::Unary:
      out += op_text(e.unary);
      render_expr_to(out, e.operands[0], 12);
      break;
    case ExprKind::Binary:
      render_expr_to(out, e.operands[0], prec);
      out += ' ';
      out += op_text(e.binary);
      out += ' ';
      render_expr_to(out, e.operands[1], prec + 1);
      break;
    case ExprKind::Ternary:
      render_expr_to(out, e.operands[0], 2);
      out += " ? ";
      render_expr_to(out, e.operands[1], 1);
      out += " : ";
      render_expr_to(out, e.operands[2], 1);
      break;
    case ExprKind::Concat:
      out += '{';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out += ", ";
        render_expr_to(out, e.operands[i], 1);
      }
      out += '}';
      break;
  }
  if (parens) out += ')';
}

void render_stmt(std::string& out, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case StmtKind::Block:
      out += pad + "begin\n";
      for (const auto& child : s.body) render_stmt(out, child, indent + 1);
      out += pad + "end\n";
      break;
    case StmtKind::If:
      out += pad + "if (" + render_expr(s.condition) + ")\n";
      render_stmt(out, s.body[0], indent + 1);
      if (s.has_else()) {
        out += pad + "else\n";
        render_stmt(out, s.body[1], indent + 1);
      }
      break;
    case StmtKind::Assign:
      out += pad + render_expr(s.lhs) + (s.nonblocking ? " <= " : " = ") + render_expr(s.rhs) + ";\n";
      break;
  }
}

void collect_targets(const Stmt& s, std::set<std::string>& out) {
  if (s.kind == StmtKind::Assign) {
    if (s.lhs.kind == ExprKind::Identifier) out.insert(s.lhs.name);
    for (const auto& part : s.lhs.operands) out.insert(part.name);
  }
  for (const auto& child : s.body) collect_targets(child, out);
}

std::string render_range(const SignalDecl& s) {
  if (s.width == 1 && s.lsb == 0) return "";
  return "[" + std::to_string(s.msb()) + ":" + std::to_string(s.lsb) + "] ";
}

}  // namespace

Design parse_design(std::string_view source) { return Parser(source).parse(); }

std::string render_expr(const Expr& expr) {
  std::string out;
  render_expr_to(out, expr, 1);
  return out;
}

std::string render_design(const Design& design) {
  std::set<std::string> procedural;
  for (const auto& p : design.processes) {
    if (p.kind != ProcessKind::Continuous) collect_targets(p.body, procedural);
  }
  std::string out = "module " + design.name + "(";
  for (std::size_t i = 0; i < design.ports.size(); ++i) {
    const SignalDecl* s = design.find(design.ports[i]);
    out += i ? ",\n  " : "\n  ";
    out += s->direction == PortDirection::Input ? "input " : "output ";
    if (s->direction == PortDirection::Output && procedural.count(s->name)) out += "reg ";
    out += render_range(*s) + s->name;
  }
  out += design.ports.empty() ? ");\n" : "\n);\n";
  for (const auto& s : design.signals) {
    if (s.direction != PortDirection::None) continue;
    out += std::string("  ") + (procedural.count(s.name) ? "reg " : "wire ") + render_range(s) + s.name + ";\n";
  }
  for (const auto& p : design.processes) {
    out += "\n";
    switch (p.kind) {
      case ProcessKind::Continuous:
        out += "  assign " + render_expr(p.body.lhs) + " = " + render_expr(p.body.rhs) + ";\n";
        break;
      case ProcessKind::Combinational:
        out += "  always @(*)\n";
        render_stmt(out, p.body, 2);
        break;
      case ProcessKind::Clocked:
        out += "  always @(posedge " + p.clock;
        if (!p.reset_edge.empty()) out += " or posedge " + p.reset_edge;
        out += ")\n";
        render_stmt(out, p.body, 2);
        break;
    }
  }
  out += "endmodule\n";
  return out;
}

}  // namespace svabench
