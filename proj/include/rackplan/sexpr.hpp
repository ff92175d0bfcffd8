#ifndef RACKPLAN_SEXPR_HPP
#define RACKPLAN_SEXPR_HPP

// Reader and printer for the parenthesized description language shared by
// designators and scenario files.
//
//   EXPR   := "(" ITEM+ ")"
//   ITEM   := EXPR | SYMBOL | STRING | NUMBER
//   SYMBOL := [A-Za-z][A-Za-z0-9-]*
//   STRING := '"' ... '"'   with \" and \\ escapes
//   NUMBER := -?[0-9]+(.[0-9]+)?
//
// ``typographic'' and “...” quotes read as plain strings. A ';'
// starts a comment running to the end of the line.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rackplan/error.hpp"

namespace rackplan {

struct SExpr {
  enum class Kind { symbol, string, number, list };

  Kind kind = Kind::symbol;
  std::string text;  // symbol name or string contents
  double number = 0;
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;

  static SExpr symbol(std::string s) { return {Kind::symbol, std::move(s), 0, {}, 0, 0}; }
  static SExpr string(std::string s) { return {Kind::string, std::move(s), 0, {}, 0, 0}; }
  static SExpr num(double v) { return {Kind::number, {}, v, {}, 0, 0}; }
  static SExpr list(std::vector<SExpr> xs) { return {Kind::list, {}, 0, std::move(xs), 0, 0}; }

  bool is_symbol() const { return kind == Kind::symbol; }
  bool is_symbol(std::string_view s) const { return kind == Kind::symbol && text == s; }
  bool is_list() const { return kind == Kind::list; }
  bool is_atom() const { return kind != Kind::list; }

  /// Structural equality; source positions are ignored.
  friend bool operator==(const SExpr& a, const SExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::symbol:
      case Kind::string: return a.text == b.text;
      case Kind::number: return a.number == b.number;
      case Kind::list: return a.items == b.items;
    }
    return false;
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  SExpr read_one() {
    skip_space();
    if (eof()) fail({"("}, "empty input");
    if (peek() != '(') fail({"("}, "top-level form must be a parenthesized expression");
    SExpr e = read_list();
    skip_space();
    if (!eof()) fail({"end of input"}, "trailing content after expression");
    return e;
  }

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (!eof()) {
      if (peek() != '(') fail({"("}, "top-level form must be a parenthesized expression");
      out.push_back(read_list());
      skip_space();
    }
    return out;
  }

 private:
  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
        ++col_;
      }
      ++pos_;
    }
  }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) const {
    throw SyntaxError(line_, col_, std::move(expected), what);
  }

  void skip_space() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  SExpr read_list() {
    SExpr e = SExpr::list({});
    e.line = line_;
    e.column = col_;
    advance();  // '('
    for (;;) {
      skip_space();
      if (eof()) fail({"(", ")", "symbol", "string", "number"}, "unterminated list");
      if (peek() == ')') {
        if (e.items.empty()) fail({"(", "symbol"}, "empty list");
        advance();
        return e;
      }
      e.items.push_back(read_item());
    }
  }

  SExpr read_item() {
    int line = line_;
    int col = col_;
    SExpr e;
    char c = peek();
    if (c == '(') {
      e = read_list();
    } else if (c == '"') {
      advance();
      e = SExpr::string(read_string_body("\""));
    } else if (starts_with("``")) {
      advance(2);
      e = SExpr::string(read_string_body("''"));
    } else if (starts_with("\xE2\x80\x9C")) {
      advance(3);
      e = SExpr::string(read_string_body("\xE2\x80\x9D"));
    } else if (is_alpha(c)) {
      std::size_t start = pos_;
      while (!eof() && (is_alpha(peek()) || is_digit(peek()) || peek() == '-')) advance();
      e = SExpr::symbol(std::string(src_.substr(start, pos_ - start)));
      check_delimiter();
    } else if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      std::size_t start = pos_;
      if (c == '-') advance();
      while (!eof() && is_digit(peek())) advance();
      if (!eof() && peek() == '.') {
        advance();
        if (eof() || !is_digit(peek())) fail({"digit"}, "malformed number");
        while (!eof() && is_digit(peek())) advance();
      }
      std::string_view tok = src_.substr(start, pos_ - start);
      double v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || p != tok.data() + tok.size()) fail({"number"}, "malformed number");
      e = SExpr::num(v);
      check_delimiter();
    } else {
      fail({"(", ")", "symbol", "string", "number"}, std::string("unexpected character '") + c + "'");
    }
    e.line = line;
    e.column = col;
    return e;
  }

  void check_delimiter() const {
    if (eof()) return;
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == ')' || c == ';') return;
    fail({"whitespace", ")"}, std::string("unexpected character '") + c + "' in token");
  }

  std::string read_string_body(std::string_view close) {
    std::string out;
    for (;;) {
      if (eof()) fail({"closing quote"}, "unterminated string");
      if (starts_with(close)) {
        advance(close.size());
        return out;
      }
      // A typographic opening may also be closed by a plain quote.
      if (close != "\"" && peek() == '"') {
        advance();
        return out;
      }
      char c = peek();
      if (c == '\\') {
        advance();
        if (eof()) fail({"escape"}, "unterminated escape");
        char n = peek();
        if (n != '"' && n != '\\') fail({"\\\"", "\\\\"}, "unknown escape");
        out += n;
        advance();
        continue;
      }
      out += c;
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

inline std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[400];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, p);
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

inline void print_compact(const SExpr& e, std::string& out) {
  switch (e.kind) {
    case SExpr::Kind::symbol: out += e.text; break;
    case SExpr::Kind::string: out += quote(e.text); break;
    case SExpr::Kind::number: out += format_number(e.number); break;
    case SExpr::Kind::list:
      out += '(';
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ' ';
        print_compact(e.items[i], out);
      }
      out += ')';
      break;
  }
}

inline bool flat(const SExpr& e) {
  if (!e.is_list()) return true;
  for (const auto& x : e.items)
    if (x.is_list()) return false;
  return true;
}

inline void print_pretty(const SExpr& e, std::string& out, int indent) {
  if (flat(e)) {
    print_compact(e, out);
    return;
  }
  out += '(';
  bool first = true;
  for (const auto& x : e.items) {
    if (!first && x.is_list()) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent + 2), ' ');
    } else if (!first) {
      out += ' ';
    }
    if (x.is_list())
      print_pretty(x, out, indent + 2);
    else
      print_compact(x, out);
    first = false;
  }
  out += ')';
}

}  // namespace detail

/// Reads exactly one top-level expression.
inline SExpr read_sexpr(std::string_view text) { return detail::Reader(text).read_one(); }

/// Reads any number of top-level expressions.
inline std::vector<SExpr> read_sexprs(std::string_view text) { return detail::Reader(text).read_all(); }

inline std::string print_compact(const SExpr& e) {
  std::string out;
  detail::print_compact(e, out);
  return out;
}

/// Multi-line form: atoms stay on the head line, nested lists go one per
/// line, indented two spaces per level.
inline std::string print_pretty(const SExpr& e) {
  std::string out;
  detail::print_pretty(e, out, 0);
  return out;
}

}  // namespace rackplan

#endif  // RACKPLAN_SEXPR_HPP
