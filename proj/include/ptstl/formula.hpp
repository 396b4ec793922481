#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ptstl/error.hpp"
#include "ptstl/format.hpp"

namespace ptstl {

/// Integer window [a, b] in time steps, a <= b.
struct Interval {
  std::int64_t a = 0;
  std::int64_t b = 0;

  Interval() = default;
  Interval(std::int64_t lo, std::int64_t hi) : a(lo), b(hi) {
    if (lo < 0 || hi < 0) throw IntervalError("interval bounds must be non-negative");
    if (lo > hi) throw IntervalError("interval [" + std::to_string(lo) + "," + std::to_string(hi) + "] has a > b");
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Kind : std::uint8_t { True, Pred, Not, And, Or, Prev, Always, Since };
enum class Cmp : std::uint8_t { Less, Greater };

/// Named parameter occupying a constant or interval-bound position of a template.
struct ParamRef {
  std::string name;
  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

using ValueSlot = std::variant<double, ParamRef>;
using TimeSlot = std::variant<std::int64_t, ParamRef>;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Syntax tree node shared by formulas and parametric templates. Unary operators use `lhs`.
struct Node {
  Kind kind = Kind::True;
  // Pred
  std::size_t var = 0;
  std::string var_name;
  Cmp cmp = Cmp::Less;
  ValueSlot constant = 0.0;
  // Prev, Always, Since
  TimeSlot lo = std::int64_t{0};
  TimeSlot hi = std::int64_t{0};
  NodePtr lhs;
  NodePtr rhs;
};

namespace node {

inline NodePtr make_true() { return std::make_shared<const Node>(); }

inline NodePtr make_pred(std::size_t var, std::string name, Cmp cmp, ValueSlot c) {
  Node n;
  n.kind = Kind::Pred;
  n.var = var;
  n.var_name = std::move(name);
  n.cmp = cmp;
  n.constant = std::move(c);
  return std::make_shared<const Node>(std::move(n));
}

inline NodePtr make_unary(Kind k, NodePtr child) {
  Node n;
  n.kind = k;
  n.lhs = std::move(child);
  return std::make_shared<const Node>(std::move(n));
}

inline NodePtr make_not(NodePtr child) { return make_unary(Kind::Not, std::move(child)); }

inline NodePtr make_binary(Kind k, NodePtr l, NodePtr r) {
  Node n;
  n.kind = k;
  n.lhs = std::move(l);
  n.rhs = std::move(r);
  return std::make_shared<const Node>(std::move(n));
}

inline NodePtr make_and(NodePtr l, NodePtr r) { return make_binary(Kind::And, std::move(l), std::move(r)); }
inline NodePtr make_or(NodePtr l, NodePtr r) { return make_binary(Kind::Or, std::move(l), std::move(r)); }

inline NodePtr make_temporal(Kind k, TimeSlot lo, TimeSlot hi, NodePtr l, NodePtr r = nullptr) {
  Node n;
  n.kind = k;
  n.lo = std::move(lo);
  n.hi = std::move(hi);
  n.lhs = std::move(l);
  n.rhs = std::move(r);
  return std::make_shared<const Node>(std::move(n));
}

inline NodePtr make_prev(TimeSlot lo, TimeSlot hi, NodePtr child) {
  return make_temporal(Kind::Prev, std::move(lo), std::move(hi), std::move(child));
}
inline NodePtr make_always(TimeSlot lo, TimeSlot hi, NodePtr child) {
  return make_temporal(Kind::Always, std::move(lo), std::move(hi), std::move(child));
}
inline NodePtr make_since(TimeSlot lo, TimeSlot hi, NodePtr l, NodePtr r) {
  return make_temporal(Kind::Since, std::move(lo), std::move(hi), std::move(l), std::move(r));
}

inline bool is_unary(Kind k) { return k == Kind::Not || k == Kind::Prev || k == Kind::Always; }
inline bool is_binary(Kind k) { return k == Kind::And || k == Kind::Or || k == Kind::Since; }
inline bool is_temporal(Kind k) { return k == Kind::Prev || k == Kind::Always || k == Kind::Since; }

inline bool equal(const Node& x, const Node& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::True:
      return true;
    case Kind::Pred:
      return x.var_name == y.var_name && x.cmp == y.cmp && x.constant == y.constant;
    case Kind::Not:
      return equal(*x.lhs, *y.lhs);
    case Kind::And:
    case Kind::Or:
      return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
    case Kind::Prev:
    case Kind::Always:
      return x.lo == y.lo && x.hi == y.hi && equal(*x.lhs, *y.lhs);
    case Kind::Since:
      return x.lo == y.lo && x.hi == y.hi && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
  }
  return false;
}

/// Number of Not/And/Or/Prev/Always/Since nodes.
inline std::size_t operator_count(const Node& n) {
  switch (n.kind) {
    case Kind::True:
    case Kind::Pred:
      return 0;
    case Kind::Not:
    case Kind::Prev:
    case Kind::Always:
      return 1 + operator_count(*n.lhs);
    default:
      return 1 + operator_count(*n.lhs) + operator_count(*n.rhs);
  }
}

inline void append_slot(std::string& out, const ValueSlot& s) {
  if (const auto* p = std::get_if<ParamRef>(&s)) {
    out += '?';
    out += p->name;
  } else {
    out += format_number(std::get<double>(s));
  }
}

inline void append_slot(std::string& out, const TimeSlot& s) {
  if (const auto* p = std::get_if<ParamRef>(&s)) {
    out += '?';
    out += p->name;
  } else {
    out += std::to_string(std::get<std::int64_t>(s));
  }
}

inline void print(std::string& out, const Node& n);

inline void print_operand(std::string& out, const Node& n) {
  if (n.kind == Kind::True) {
    out += "true";
    return;
  }
  out += '(';
  print(out, n);
  out += ')';
}

inline void print_interval(std::string& out, char op, const Node& n) {
  out += op;
  out += '[';
  append_slot(out, n.lo);
  out += ',';
  append_slot(out, n.hi);
  out += ']';
}

/// Canonical text: every operand other than `true` is parenthesized.
inline void print(std::string& out, const Node& n) {
  switch (n.kind) {
    case Kind::True:
      out += "true";
      return;
    case Kind::Pred:
      out += n.var_name;
      out += n.cmp == Cmp::Less ? " < " : " > ";
      append_slot(out, n.constant);
      return;
    case Kind::Not:
      out += "not ";
      print_operand(out, *n.lhs);
      return;
    case Kind::And:
    case Kind::Or:
      print_operand(out, *n.lhs);
      out += n.kind == Kind::And ? " and " : " or ";
      print_operand(out, *n.rhs);
      return;
    case Kind::Prev:
    case Kind::Always:
      print_interval(out, n.kind == Kind::Prev ? 'P' : 'A', n);
      out += ' ';
      print_operand(out, *n.lhs);
      return;
    case Kind::Since:
      print_operand(out, *n.lhs);
      out += ' ';
      print_interval(out, 'S', n);
      out += ' ';
      print_operand(out, *n.rhs);
      return;
  }
}

inline std::string to_string(const Node& n) {
  std::string s;
  print(s, n);
  return s;
}

/// Visits every slot in textual (printed) order.
template <class OnValue, class OnTime>
void for_each_slot(const Node& n, OnValue&& on_value, OnTime&& on_time) {
  switch (n.kind) {
    case Kind::True:
      return;
    case Kind::Pred:
      on_value(n, n.constant);
      return;
    case Kind::Not:
    case Kind::And:
    case Kind::Or:
      for_each_slot(*n.lhs, on_value, on_time);
      if (n.rhs) for_each_slot(*n.rhs, on_value, on_time);
      return;
    case Kind::Prev:
    case Kind::Always:
      on_time(n, n.lo, true);
      on_time(n, n.hi, false);
      for_each_slot(*n.lhs, on_value, on_time);
      return;
    case Kind::Since:
      for_each_slot(*n.lhs, on_value, on_time);
      on_time(n, n.lo, true);
      on_time(n, n.hi, false);
      for_each_slot(*n.rhs, on_value, on_time);
      return;
  }
}

}  // namespace node

/// A concrete ptSTL formula: no parameter slots and every interval well formed.
class Formula {
 public:
  Formula() : root_(node::make_true()) {}
  explicit Formula(NodePtr root) : root_(std::move(root)) {
    node::for_each_slot(
        *root_,
        [](const Node&, const ValueSlot& s) {
          if (std::holds_alternative<ParamRef>(s)) throw ParameterError("formula contains parameter ?" + std::get<ParamRef>(s).name);
          if (!std::isfinite(std::get<double>(s))) throw Error("predicate constant must be finite");
        },
        [](const Node& n, const TimeSlot& s, bool is_lo) {
          if (std::holds_alternative<ParamRef>(s)) throw ParameterError("formula contains parameter ?" + std::get<ParamRef>(s).name);
          if (!is_lo) Interval(std::get<std::int64_t>(n.lo), std::get<std::int64_t>(n.hi));
        });
  }

  [[nodiscard]] const Node& root() const noexcept { return *root_; }
  [[nodiscard]] const NodePtr& ptr() const noexcept { return root_; }
  [[nodiscard]] std::string to_string() const { return node::to_string(*root_); }
  [[nodiscard]] std::size_t operator_count() const { return node::operator_count(*root_); }

  friend bool operator==(const Formula& x, const Formula& y) { return node::equal(*x.root_, *y.root_); }

  static Formula truth() { return Formula(); }
  static Formula falsity() { return Formula(node::make_not(node::make_true())); }

  friend Formula operator!(const Formula& f) { return Formula(node::make_not(f.root_)); }
  friend Formula operator&&(const Formula& x, const Formula& y) { return Formula(node::make_and(x.root_, y.root_)); }
  friend Formula operator||(const Formula& x, const Formula& y) { return Formula(node::make_or(x.root_, y.root_)); }

 private:
  NodePtr root_;
};

inline Formula prev(Interval iv, const Formula& f) { return Formula(node::make_prev(iv.a, iv.b, f.ptr())); }
inline Formula always(Interval iv, const Formula& f) { return Formula(node::make_always(iv.a, iv.b, f.ptr())); }
inline Formula since(const Formula& l, Interval iv, const Formula& r) {
  return Formula(node::make_since(iv.a, iv.b, l.ptr(), r.ptr()));
}
inline Formula pred(std::size_t var, std::string name, Cmp cmp, double c) {
  return Formula(node::make_pred(var, std::move(name), cmp, c));
}

inline std::string print_formula(const Formula& f) { return f.to_string(); }
inline std::size_t operator_count(const Formula& f) { return f.operator_count(); }

}  // namespace ptstl
