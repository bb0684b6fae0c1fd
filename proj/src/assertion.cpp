// SPDX-License-Identifier: Apache-2.0
#include "svabench/assertion.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace svabench {

bool TemporalTerm::contradictory() const {
  std::map<std::string, std::uint32_t> bound;
  for (const auto& p : props) {
    auto [it, inserted] = bound.emplace(p.signal, p.value);
    if (!inserted && it->second != p.value) return true;
  }
  return false;
}

namespace {

int max_delay(const std::vector<TemporalTerm>& terms) {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, t.delay);
  return m;
}

}  // namespace

int Assertion::antecedent_depth() const { return max_delay(antecedent); }
int NormalAssertion::antecedent_depth() const { return max_delay(antecedent); }

bool Assertion::operator==(const Assertion& other) const {
  return antecedent == other.antecedent && consequent == other.consequent &&
         implication == other.implication && clock == other.clock &&
         disable_iff == other.disable_iff && label == other.label;
}

bool NormalAssertion::operator==(const NormalAssertion& other) const {
  return antecedent == other.antecedent && consequent == other.consequent && clock == other.clock &&
         disable_iff == other.disable_iff && label == other.label;
}

std::string describe(const SyntaxError& e) {
  return "syntax error at offset " + std::to_string(e.offset) + ": " + e.message;
}

std::string describe(const OutOfFragment& e) {
  return "outside the supported fragment at offset " + std::to_string(e.offset) + ": " + e.construct;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Identifier, Number, System, Punct, End, Bad };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t value = 0;
  int width = 0;
  bool four_state = false;
  bool fill = false;
  std::size_t offset = 0;
};

std::vector<Token> lex(std::string_view s) {
  static const char* const multi[] = {"|->", "|=>", "===", "!==", "<->", "[->", "##", "==", "!=", "&&",
                                      "||",  "<=",  ">=",  "->",  "[*",  "[=",  "[+", "::", "<<", ">>"};
  std::vector<Token> out;
  std::size_t i = 0;
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    // Line and block comments inside an assertion are ignored.
    if (i + 1 < s.size() && s[i] == '/' && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (i + 1 < s.size() && s[i] == '/' && s[i + 1] == '*') {
      std::size_t end = s.find("*/", i + 2);
      i = end == std::string_view::npos ? s.size() : end + 2;
      continue;
    }
    Token t;
    t.offset = i;
    if (i >= s.size()) {
      t.kind = Tok::End;
      out.push_back(t);
      return out;
    }
    char c = s[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '$')) ++j;
      t.kind = Tok::Identifier;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '$') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::System;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      std::size_t j = i;
      std::string size;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
        if (s[j] != '_') size += s[j];
        ++j;
      }
      t.kind = Tok::Number;
      if (j < s.size() && s[j] == '\'') {
        ++j;
        if (j < s.size() && (s[j] == 's' || s[j] == 'S')) ++j;
        char base_char = j < s.size() ? static_cast<char>(std::tolower(static_cast<unsigned char>(s[j]))) : '\0';
        int base = base_char == 'b' ? 2 : base_char == 'o' ? 8 : base_char == 'd' ? 10 : base_char == 'h' ? 16 : 0;
        if (base == 0) {
          if (base_char == '0' || base_char == '1' || base_char == 'x' || base_char == 'z') {
            t.fill = true;
            ++j;
          } else {
            t.kind = Tok::Bad;
          }
        } else {
          ++j;
          std::uint64_t v = 0;
          bool any = false;
          bool overflow = false;
          while (j < s.size() && (std::isxdigit(static_cast<unsigned char>(s[j])) || s[j] == '_' ||
                                  std::strchr("xXzZ?", s[j]))) {
            char d = s[j++];
            if (d == '_') continue;
            if (std::strchr("xXzZ?", d)) {
              t.four_state = true;
              any = true;
              continue;
            }
            int dv = std::isdigit(static_cast<unsigned char>(d)) ? d - '0'
                                                                 : std::tolower(static_cast<unsigned char>(d)) - 'a' + 10;
            if (dv >= base) {
              t.kind = Tok::Bad;
              break;
            }
            v = v * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(dv);
            if (v > 0xffffffffull) overflow = true;
            any = true;
          }
          if (!any || overflow) t.kind = Tok::Bad;
          t.value = v;
          t.width = size.empty() ? 0 : (size.size() > 3 ? 999 : std::stoi(size));
          if (t.width > 32 || (t.width > 0 && t.width < 64 && (v >> t.width) != 0)) t.kind = Tok::Bad;
        }
      } else {
        if (size.size() > 10 || std::stoull(size) > 0xffffffffull) {
          t.kind = Tok::Bad;
        } else {
          t.value = std::stoull(size);
        }
      }
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"') j += s[j] == '\\' ? 2 : 1;
      j = std::min(j + 1, s.size());
      t.kind = Tok::Punct;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else {
      t.kind = Tok::Punct;
      std::size_t len = 1;
      for (const char* m : multi) {
        std::size_t n = std::char_traits<char>::length(m);
        if (s.substr(i, n) == m) {
          len = n;
          break;
        }
      }
      t.text = std::string(s.substr(i, len));
      if (len == 1 && std::string_view("()[]{};:,@!~&|^+-*/%<>=?.#'").find(c) == std::string_view::npos) {
        t.kind = Tok::Bad;
      }
      i += len;
    }
    out.push_back(std::move(t));
  }
}

// ---------------------------------------------------------------------------
// Parser

struct Syntax {
  SyntaxError error;
};
struct Fragment {
  OutOfFragment error;
};

const std::set<std::string, std::less<>> kSvaKeywords = {
    "s_eventually", "eventually", "always",   "s_always", "until",      "s_until",   "until_with",
    "s_until_with", "throughout", "within",   "intersect", "or",        "and",       "not",
    "first_match",  "nexttime",   "s_nexttime", "implies", "iff",       "if",        "else",
    "case",         "accept_on",  "reject_on", "sync_accept_on", "sync_reject_on", "strong",
    "weak",         "sequence",   "property",  "endproperty", "endsequence", "cover", "assume",
    "restrict",     "expect",     "inside",    "dist",     "matched",   "triggered", "default",
    "clocking",     "posedge",    "negedge",   "edge",     "disable",   "assert",    "final",
};

const std::set<std::string, std::less<>> kForeignOperators = {
    "||", "!=", "===", "!==", "<", ">", "<=", ">=", "&", "|", "^", "~", "+", "-", "*", "/", "%",
    "->", "<->", "[*", "[=", "[->", "[+", "?", ".", "[", "{", "<<", ">>", "::", "'"};

class AssertionParser {
 public:
  explicit AssertionParser(std::string_view text) : text_(text), toks_(lex(text)) {}

  Assertion parse() {
    Assertion a;
    a.source_text = std::string(text_);
    if (cur().kind == Tok::Identifier && peek().kind == Tok::Punct && peek().text == ":" &&
        !kSvaKeywords.count(cur().text)) {
      a.label = cur().text;
      next();
      next();
    }
    if (is_ident("assume") || is_ident("cover") || is_ident("restrict")) fragment(cur(), cur().text + " statement");
    if (!accept_ident("assert")) syntax(cur(), "expected 'assert'");
    if (is_ident("final") || is_punct("#")) fragment(cur(), "deferred assertion");
    if (is_punct("(")) fragment(cur(), "immediate assertion");
    if (!accept_ident("property")) syntax(cur(), "expected 'property'");
    expect_punct("(", "expected '(' after 'property'");

    if (accept_punct("@")) {
      expect_punct("(", "expected '(' after '@'");
      if (is_ident("negedge") || is_ident("edge")) fragment(cur(), cur().text + " clocking");
      if (!accept_ident("posedge")) syntax(cur(), "expected 'posedge'");
      if (cur().kind != Tok::Identifier) syntax(cur(), "expected clock name");
      a.clock = cur().text;
      next();
      if (is_ident("or") || is_punct(",")) fragment(cur(), "multiple clocking events");
      expect_punct(")", "expected ')' after clocking event");
    }
    if (accept_ident("disable")) {
      if (!accept_ident("iff")) syntax(cur(), "expected 'iff' after 'disable'");
      expect_punct("(", "expected '(' after 'disable iff'");
      bool negated = accept_punct("!");
      if (cur().kind != Tok::Identifier) syntax(cur(), "expected reset signal");
      if (negated) fragment(cur(), "active-low disable condition");
      a.disable_iff = cur().text;
      next();
      if (!is_punct(")")) {
        if (is_foreign()) fragment(cur(), "disable iff expression");
        syntax(cur(), "expected ')'");
      }
      next();
    }

    if (is_punct(")")) syntax(cur(), "empty property");
    a.antecedent = parse_sequence();
    if (is_punct("|->")) {
      a.implication = Implication::Overlapped;
    } else if (is_punct("|=>")) {
      a.implication = Implication::NonOverlapped;
    } else if (is_punct(")")) {
      fragment(cur(), "property without implication");
    } else {
      unexpected("expected '|->' or '|=>'");
    }
    next();
    if (is_punct(")") || is_punct(";") || cur().kind == Tok::End) syntax(cur(), "expected consequent expression");
    int offset = 0;
    if (is_punct("##")) offset = parse_delay();
    std::size_t cons_start = cur().offset;
    a.consequent.props = parse_conjunction();
    if (is_punct("##")) fragment(cur(), "multi-cycle consequent");
    int m = a.antecedent_depth();
    a.consequent.delay = a.implication == Implication::Overlapped ? m + offset : offset;
    (void)cons_start;

    if (!is_punct(")")) unexpected("expected ')' to close the property");
    next();
    if (is_ident("else")) fragment(cur(), "action block");
    if (!is_punct(";")) syntax(cur(), "expected ';'");
    next();
    if (cur().kind != Tok::End) syntax(cur(), "unexpected text after ';'");
    return a;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek() const { return toks_[std::min(pos_ + 1, toks_.size() - 1)]; }
  void next() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_ident(std::string_view p) const { return cur().kind == Tok::Identifier && cur().text == p; }
  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  bool accept_ident(std::string_view p) {
    if (!is_ident(p)) return false;
    next();
    return true;
  }
  void expect_punct(std::string_view p, const std::string& message) {
    if (!accept_punct(p)) unexpected(message);
  }
  bool is_foreign() const {
    if (cur().kind == Tok::System) return true;
    if (cur().kind == Tok::Identifier) return kSvaKeywords.count(cur().text) > 0;
    return cur().kind == Tok::Punct && kForeignOperators.count(cur().text) > 0;
  }
  [[noreturn]] void syntax(const Token& t, const std::string& message) const {
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Syntax{{t.offset, message + ", found " + found}};
  }
  [[noreturn]] void fragment(const Token& t, const std::string& construct) const {
    throw Fragment{{t.offset, construct}};
  }
  /// Out-of-fragment when the offending token is legal SVA, syntax error otherwise.
  [[noreturn]] void unexpected(const std::string& message) const {
    if (is_foreign()) {
      std::string what = cur().kind == Tok::Punct ? "operator '" + cur().text + "'" : "'" + cur().text + "'";
      if (cur().text == "[*" || cur().text == "[=" || cur().text == "[->" || cur().text == "[+") {
        what = "repetition '" + cur().text + "'";
      }
      fragment(cur(), what);
    }
    syntax(cur(), message);
  }

  int parse_delay() {
    next();  // ##
    if (is_punct("[")) fragment(cur(), "delay range '##['");
    if (cur().kind != Tok::Number || cur().width != 0 || cur().fill) {
      if (cur().kind == Tok::Identifier) fragment(cur(), "named delay");
      syntax(cur(), "expected cycle count after '##'");
    }
    if (cur().value > 1000) fragment(cur(), "delay beyond 1000 cycles");
    int d = static_cast<int>(cur().value);
    next();
    return d;
  }

  std::vector<TemporalTerm> parse_sequence() {
    std::vector<TemporalTerm> terms;
    int delay = 0;
    if (is_punct("##")) delay = parse_delay();
    for (;;) {
      std::vector<Proposition> props = parse_conjunction();
      if (!terms.empty() && terms.back().delay == delay) {
        // `a ##0 b` fuses into one cycle.
        terms.back().props.insert(terms.back().props.end(), props.begin(), props.end());
      } else {
        terms.push_back(TemporalTerm{delay, std::move(props)});
      }
      if (!is_punct("##")) break;
      delay += parse_delay();
    }
    return terms;
  }

  std::vector<Proposition> parse_conjunction(int depth = 0) {
    std::vector<Proposition> props;
    for (;;) {
      parse_atom(props, depth);
      if (accept_punct("&&")) continue;
      if (is_punct("##") && depth > 0) fragment(cur(), "parenthesized sequence");
      if (is_foreign() && !is_punct("|->") && !is_punct("|=>")) unexpected("");
      return props;
    }
  }

  void parse_atom(std::vector<Proposition>& props, int depth) {
    if (accept_punct("(")) {
      if (is_punct(")")) syntax(cur(), "empty parentheses");
      std::vector<Proposition> inner = parse_conjunction(depth + 1);
      if (!is_punct(")")) unexpected("expected ')'");
      next();
      props.insert(props.end(), inner.begin(), inner.end());
      return;
    }
    if (accept_punct("!")) {
      int parens = 0;
      while (accept_punct("(")) ++parens;
      if (cur().kind != Tok::Identifier || kSvaKeywords.count(cur().text)) unexpected("expected signal after '!'");
      Proposition p{cur().text, 0, 0};
      next();
      if (is_punct("==") || is_punct("[")) fragment(cur(), "negated comparison");
      for (int i = 0; i < parens; ++i) {
        if (!is_punct(")")) unexpected("expected ')'");
        next();
      }
      props.push_back(p);
      return;
    }
    if (cur().kind == Tok::System) fragment(cur(), "system function " + cur().text);
    if (cur().kind == Tok::Number) fragment(cur(), "constant expression");
    if (cur().kind == Tok::Identifier) {
      if (kSvaKeywords.count(cur().text)) fragment(cur(), "'" + cur().text + "'");
      Proposition p{cur().text, 1, 0};
      next();
      if (is_punct("[")) fragment(cur(), "bit-select");
      if (is_punct("(")) fragment(cur(), "function call");
      if (accept_punct("==")) {
        if (cur().kind == Tok::Number) {
          if (cur().four_state) fragment(cur(), "4-state literal");
          if (cur().fill) fragment(cur(), "fill literal");
          p.value = static_cast<std::uint32_t>(cur().value);
          p.width = cur().width;
          next();
        } else if (cur().kind == Tok::Identifier && !kSvaKeywords.count(cur().text)) {
          fragment(cur(), "signal-to-signal comparison");
        } else {
          unexpected("expected constant after '=='");
        }
      }
      props.push_back(p);
      return;
    }
    unexpected("expected proposition");
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string render_value(const Proposition& p) {
  if (p.width == 0) return std::to_string(p.value);
  std::string out = std::to_string(p.width) + "'";
  if (p.width <= 8) {
    out += 'b';
    for (int i = p.width - 1; i >= 0; --i) out += ((p.value >> i) & 1u) ? '1' : '0';
  } else {
    std::ostringstream hex;
    hex << std::hex << p.value;
    out += 'h' + hex.str();
  }
  return out;
}

std::string render_term(const TemporalTerm& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.props.size(); ++i) {
    if (i) out += " && ";
    out += t.props[i].signal + " == " + render_value(t.props[i]);
  }
  return out + ")";
}

std::string render_parts(const std::string& label, const std::string& clock, const std::string& disable_iff,
                         const std::vector<TemporalTerm>& antecedent, bool overlapped, int consequent_gap,
                         const TemporalTerm& consequent) {
  std::string out;
  if (!label.empty()) out += label + ": ";
  out += "assert property (@(posedge " + clock + ") ";
  if (!disable_iff.empty()) out += "disable iff (" + disable_iff + ") ";
  int prev = 0;
  for (std::size_t i = 0; i < antecedent.size(); ++i) {
    int gap = antecedent[i].delay - prev;
    if (i == 0) {
      if (gap > 0) out += "##" + std::to_string(gap) + " ";
    } else {
      out += " ##" + std::to_string(gap) + " ";
    }
    out += render_term(antecedent[i]);
    prev = antecedent[i].delay;
  }
  out += overlapped ? " |-> " : " |=> ";
  if (consequent_gap > 0) out += "##" + std::to_string(consequent_gap) + " ";
  out += render_term(consequent);
  out += ");";
  return out;
}

bool iequals_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) return false;
  }
  return true;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

AssertionParseResult parse_assertion(std::string_view text) {
  try {
    return AssertionParser(text).parse();
  } catch (const Syntax& e) {
    return e.error;
  } catch (const Fragment& e) {
    return e.error;
  }
}

NormalAssertion desugar(const Assertion& a) {
  NormalAssertion n;
  n.antecedent = a.antecedent;
  n.consequent = a.consequent;
  if (a.implication == Implication::NonOverlapped) {
    n.consequent.delay = a.antecedent_depth() + 1 + a.consequent.delay;
  }
  n.clock = a.clock;
  n.disable_iff = a.disable_iff;
  n.label = a.label;
  n.source_text = a.source_text;
  return n;
}

std::string render(const Assertion& a) {
  bool overlapped = a.implication == Implication::Overlapped;
  int gap = overlapped ? a.consequent.delay - a.antecedent_depth() : a.consequent.delay;
  return render_parts(a.label, a.clock, a.disable_iff, a.antecedent, overlapped, gap, a.consequent);
}

std::string render(const NormalAssertion& a) {
  return render_parts(a.label, a.clock, a.disable_iff, a.antecedent, true,
                      a.consequent.delay - a.antecedent_depth(), a.consequent);
}

std::vector<std::string> extract_assertions(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!iequals_at(text, i, "assert") || (i > 0 && is_word_char(text[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    std::size_t j = i + 6;
    if (j < text.size() && is_word_char(text[j])) {
      ++i;
      continue;
    }
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (!iequals_at(text, j, "property") || (j + 8 < text.size() && is_word_char(text[j + 8]))) {
      ++i;
      continue;
    }
    j += 8;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j >= text.size() || text[j] != '(') {
      ++i;
      continue;
    }
    int depth = 0;
    std::size_t end = text.size();
    bool closed = false;
    for (std::size_t k = j; k < text.size(); ++k) {
      char c = text[k];
      if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (--depth == 0) {
          end = k + 1;
          closed = true;
          break;
        }
      } else if (c == ';') {
        end = k + 1;
        break;
      }
    }
    if (closed) {
      std::size_t k = end;
      while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
      if (k < text.size() && text[k] == ';') {
        end = k + 1;
      } else if (iequals_at(text, k, "else") && (k + 4 >= text.size() || !is_word_char(text[k + 4]))) {
        int d = 0;
        for (std::size_t q = k; q < text.size(); ++q) {
          if (text[q] == '(') ++d;
          if (text[q] == ')') --d;
          if (text[q] == ';' && d <= 0) {
            end = q + 1;
            break;
          }
          if (q + 1 == text.size()) end = text.size();
        }
      }
    }
    std::size_t trimmed = end;
    while (trimmed > start && std::isspace(static_cast<unsigned char>(text[trimmed - 1]))) --trimmed;
    out.emplace_back(text.substr(start, trimmed - start));
    i = end;
  }
  return out;
}

std::vector<std::string> split_assertion_file(std::string_view text) {
  static const std::regex starts_statement(R"(^\s*([A-Za-z_]\w*\s*:\s*)?assert\b)", std::regex::icase);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    std::string t = trim(line);
    bool comment = (t.size() >= 1 && t[0] == '#' && (t.size() < 2 || t[1] != '#')) || t.rfind("//", 0) == 0;
    if (!comment) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  std::vector<std::string> out;
  std::string current;
  int depth = 0;
  auto flush = [&] {
    std::string t = trim(current);
    if (!t.empty()) out.push_back(t);
    current.clear();
    depth = 0;
  };
  for (const auto& line : lines) {
    if (depth == 0 && !trim(current).empty() && std::regex_search(line, starts_statement)) flush();
    for (char c : line) {
      current += c;
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ';' && depth <= 0) flush();
    }
    current += '\n';
  }
  flush();
  return out;
}

}  // namespace svabench
