#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ptstl/error.hpp"
#include "ptstl/format.hpp"
#include "ptstl/formula.hpp"

namespace ptstl {

namespace detail {

/*
 * Grammar (binary operators never chain without parentheses):
 *
 *   formula  := unary [ ("and" | "or" | "S" interval) unary ]
 *   unary    := "not" unary | "P" interval unary | "A" interval unary | primary
 *   primary  := "true" | "(" formula ")" | IDENT ("<" | ">") value
 *   interval := "[" time "," time "]"
 *   value    := NUMBER | "?" IDENT        (parameters only in templates)
 *   time     := INTEGER | "?" IDENT
 */
class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& schema, bool allow_params)
      : text_(text), schema_(schema), allow_params_(allow_params) {}

  NodePtr parse() {
    auto root = formula();
    skip_ws();
    if (pos_ < text_.size()) {
      if (peek_binary_operator()) fail("binary operators must be parenthesized");
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  /// Next identifier-like word without consuming it.
  std::string_view peek_word() {
    skip_ws();
    std::size_t end = pos_;
    if (end < text_.size() && ident_start(text_[end])) {
      while (end < text_.size() && ident_char(text_[end])) ++end;
    }
    return text_.substr(pos_, end - pos_);
  }

  /// True when the upcoming token is a one-letter temporal operator `op` directly followed by `[`.
  bool peek_temporal(char op) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != op) return false;
    std::size_t i = pos_ + 1;
    while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
    return i < text_.size() && text_[i] == '[';
  }

  bool peek_binary_operator() {
    const auto w = peek_word();
    return w == "and" || w == "or" || peek_temporal('S');
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  NodePtr formula() {
    auto lhs = unary();
    const auto w = peek_word();
    if (w == "and" || w == "or") {
      pos_ += w.size();
      auto rhs = unary();
      return w == "and" ? node::make_and(lhs, rhs) : node::make_or(lhs, rhs);
    }
    if (peek_temporal('S')) {
      ++pos_;
      auto [lo, hi] = interval();
      auto rhs = unary();
      return node::make_since(lo, hi, lhs, rhs);
    }
    return lhs;
  }

  NodePtr unary() {
    const auto w = peek_word();
    if (w == "not") {
      pos_ += 3;
      return node::make_not(unary());
    }
    if (peek_temporal('P') || peek_temporal('A')) {
      const char op = text_[pos_++];
      auto [lo, hi] = interval();
      auto child = unary();
      return op == 'P' ? node::make_prev(lo, hi, child) : node::make_always(lo, hi, child);
    }
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '(') {
      ++pos_;
      auto inner = formula();
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] != ')' && peek_binary_operator()) {
        fail("binary operators must be parenthesized");
      }
      expect(')');
      return inner;
    }
    const auto w = peek_word();
    if (w.empty()) fail("expected a formula");
    if (w == "true") {
      pos_ += 4;
      return node::make_true();
    }
    if (w == "not" || w == "and" || w == "or") fail("unexpected keyword '" + std::string(w) + "'");
    const std::size_t var_pos = pos_;
    pos_ += w.size();
    const std::string name(w);
    skip_ws();
    if (pos_ >= text_.size() || (text_[pos_] != '<' && text_[pos_] != '>')) fail("expected '<' or '>'");
    const Cmp cmp = text_[pos_] == '<' ? Cmp::Less : Cmp::Greater;
    ++pos_;
    auto c = value();
    const auto it = std::find(schema_.begin(), schema_.end(), name);
    if (it == schema_.end()) {
      throw UnknownVariable(name, var_pos);
    }
    return node::make_pred(static_cast<std::size_t>(it - schema_.begin()), name, cmp, c);
  }

  std::string param_name() {
    ++pos_;  // '?'
    const std::size_t start = pos_;
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected parameter name after '?'");
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    if (!allow_params_) {
      pos_ = start - 1;
      fail("parameters are not allowed in a concrete formula");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view number_token() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == 'e' ||
            text_[pos_] == 'E' ||
            ((text_[pos_] == '-' || text_[pos_] == '+') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  ValueSlot value() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '?') return ParamRef{param_name()};
    const std::size_t start = pos_;
    const auto tok = number_token();
    const auto v = parse_number(tok);
    if (tok.empty() || !v) {
      pos_ = start;
      fail("expected a number");
    }
    return *v;
  }

  TimeSlot time_bound() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '?') return ParamRef{param_name()};
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a non-negative integer time bound");
    const auto digits = text_.substr(start, pos_ - start);
    if (digits.size() > 15) fail("time bound too large");
    return static_cast<std::int64_t>(std::stoll(std::string(digits)));
  }

  std::pair<TimeSlot, TimeSlot> interval() {
    expect('[');
    const std::size_t start = pos_;
    auto lo = time_bound();
    expect(',');
    auto hi = time_bound();
    expect(']');
    if (std::holds_alternative<std::int64_t>(lo) && std::holds_alternative<std::int64_t>(hi) &&
        std::get<std::int64_t>(lo) > std::get<std::int64_t>(hi)) {
      throw IntervalError("interval [" + std::to_string(std::get<std::int64_t>(lo)) + "," +
                          std::to_string(std::get<std::int64_t>(hi)) + "] has a > b at position " +
                          std::to_string(start));
    }
    return {std::move(lo), std::move(hi)};
  }

  std::string_view text_;
  const std::vector<std::string>& schema_;
  bool allow_params_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the concrete ptSTL syntax against a variable schema.
inline Formula parse_formula(std::string_view text, const std::vector<std::string>& schema) {
  return Formula(detail::Parser(text, schema, false).parse());
}

/// Parses text that may contain `?name` parameter slots. Template validation lives in parametric.hpp.
inline NodePtr parse_tree(std::string_view text, const std::vector<std::string>& schema) {
  return detail::Parser(text, schema, true).parse();
}

}  // namespace ptstl
