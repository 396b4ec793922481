#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ptstl/error.hpp"
#include "ptstl/formula.hpp"
#include "ptstl/parametric.hpp"

namespace ptstl {

namespace detail {

/// Copies `n` giving every parameter slot a fresh name p1, p2, ... in textual order.
inline NodePtr number_params(const Node& n, std::size_t& counter) {
  auto fresh = [&]() { return ParamRef{"p" + std::to_string(++counter)}; };
  auto value = [&](const ValueSlot& s) -> ValueSlot {
    return std::holds_alternative<ParamRef>(s) ? ValueSlot{fresh()} : s;
  };
  auto time = [&](const TimeSlot& s) -> TimeSlot { return std::holds_alternative<ParamRef>(s) ? TimeSlot{fresh()} : s; };
  switch (n.kind) {
    case Kind::True:
      return node::make_true();
    case Kind::Pred:
      return node::make_pred(n.var, n.var_name, n.cmp, value(n.constant));
    case Kind::Not:
      return node::make_not(number_params(*n.lhs, counter));
    case Kind::And:
    case Kind::Or: {
      auto l = number_params(*n.lhs, counter);
      auto r = number_params(*n.rhs, counter);
      return node::make_binary(n.kind, l, r);
    }
    case Kind::Prev:
    case Kind::Always: {
      auto lo = time(n.lo);
      auto hi = time(n.hi);
      return node::make_temporal(n.kind, lo, hi, number_params(*n.lhs, counter));
    }
    case Kind::Since: {
      auto l = number_params(*n.lhs, counter);
      auto lo = time(n.lo);
      auto hi = time(n.hi);
      auto r = number_params(*n.rhs, counter);
      return node::make_since(lo, hi, l, r);
    }
  }
  return nullptr;
}

inline NodePtr number_params(const NodePtr& n) {
  std::size_t counter = 0;
  return number_params(*n, counter);
}

/// Copy of `n` with every parameter name blanked, so structurally equal templates print equally.
inline NodePtr anonymize(const Node& n) {
  auto value = [](const ValueSlot& s) -> ValueSlot {
    return std::holds_alternative<ParamRef>(s) ? ValueSlot{ParamRef{""}} : s;
  };
  auto time = [](const TimeSlot& s) -> TimeSlot { return std::holds_alternative<ParamRef>(s) ? TimeSlot{ParamRef{""}} : s; };
  switch (n.kind) {
    case Kind::True:
      return node::make_true();
    case Kind::Pred:
      return node::make_pred(n.var, n.var_name, n.cmp, value(n.constant));
    case Kind::Not:
      return node::make_not(anonymize(*n.lhs));
    case Kind::And:
    case Kind::Or:
      return node::make_binary(n.kind, anonymize(*n.lhs), anonymize(*n.rhs));
    default:
      return node::make_temporal(n.kind, time(n.lo), time(n.hi), anonymize(*n.lhs), n.rhs ? anonymize(*n.rhs) : nullptr);
  }
}

}  // namespace detail

/// Syntactic simplification used for redundancy pruning: removes double negation, drops `true`
/// operands of `and`, collapses `or` with a `true` operand to `true`, and orders the operands of
/// `and`/`or` by their parameter-blind text. The result is equivalent to the input.
inline NodePtr simplify(const NodePtr& n) {
  auto key = [](const NodePtr& x) { return node::to_string(*detail::anonymize(*x)); };
  switch (n->kind) {
    case Kind::True:
    case Kind::Pred:
      return n;
    case Kind::Not: {
      auto c = simplify(n->lhs);
      if (c->kind == Kind::Not) return c->lhs;
      return node::make_not(c);
    }
    case Kind::And:
    case Kind::Or: {
      auto l = simplify(n->lhs);
      auto r = simplify(n->rhs);
      if (n->kind == Kind::And) {
        if (l->kind == Kind::True) return r;
        if (r->kind == Kind::True) return l;
      } else if (l->kind == Kind::True || r->kind == Kind::True) {
        return node::make_true();
      }
      if (key(r) < key(l)) std::swap(l, r);
      return node::make_binary(n->kind, l, r);
    }
    default:
      return node::make_temporal(n->kind, n->lo, n->hi, simplify(n->lhs), n->rhs ? simplify(n->rhs) : nullptr);
  }
}

/// Parameter-blind text of the simplified tree; equal keys mean syntactically redundant templates.
inline std::string canonical_key(const NodePtr& n) { return node::to_string(*detail::anonymize(*simplify(n))); }

/// Sorts by operator count, then canonical text, dropping duplicate texts.
inline void sort_templates(std::vector<Template>& templates) {
  std::vector<std::pair<std::pair<std::size_t, std::string>, Template>> keyed;
  keyed.reserve(templates.size());
  for (auto& t : templates) keyed.push_back({{t.operator_count(), t.to_string()}, std::move(t)});
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  templates.clear();
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first.second == keyed[i - 1].first.second) continue;
    templates.push_back(std::move(keyed[i].second));
  }
}

/// All parametric templates with at most `max_ops` operators over `vars`.
///
/// Level 0 holds `x < ?p`, `x > ?p` for every variable and `true`. Level k applies not, P[?a,?b]
/// and A[?a,?b] to level k-1, and and, or, S[?a,?b] to pairs from levels (i, k-1-i), i = 0..k-1.
/// Parameters are renamed p1, p2, ... in textual order.
inline std::vector<Template> formula_space(const std::vector<std::string>& vars, std::size_t max_ops) {
  const ParamRef slot{"_"};
  std::vector<std::vector<NodePtr>> levels(max_ops + 1);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    levels[0].push_back(node::make_pred(i, vars[i], Cmp::Less, slot));
    levels[0].push_back(node::make_pred(i, vars[i], Cmp::Greater, slot));
  }
  levels[0].push_back(node::make_true());

  for (std::size_t k = 1; k <= max_ops; ++k) {
    auto& level = levels[k];
    for (const auto& f : levels[k - 1]) {
      level.push_back(node::make_not(f));
      level.push_back(node::make_prev(slot, slot, f));
      level.push_back(node::make_always(slot, slot, f));
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& l : levels[i]) {
        for (const auto& r : levels[k - 1 - i]) {
          level.push_back(node::make_and(l, r));
          level.push_back(node::make_or(l, r));
          level.push_back(node::make_since(slot, slot, l, r));
        }
      }
    }
  }

  std::vector<Template> out;
  for (const auto& level : levels) {
    for (const auto& n : level) out.emplace_back(detail::number_params(n));
  }
  sort_templates(out);
  return out;
}

/// Wraps every template in P[s,s]: the template then describes what held s steps earlier.
inline std::vector<Template> shift_wrap(const std::vector<Template>& templates, std::int64_t s) {
  if (s < 1) throw ConfigError("shift must be a positive integer");
  std::vector<Template> out;
  out.reserve(templates.size());
  for (const auto& t : templates) out.emplace_back(node::make_prev(s, s, t.ptr()));
  return out;
}

/// Keeps one template per canonical_key class: the one with fewest operators, then smallest
/// text. Survivors keep their input order. Idempotent.
inline std::vector<Template> prune(const std::vector<Template>& templates) {
  std::map<std::string, std::size_t> chosen;
  auto rank = [&](std::size_t i) { return std::make_pair(templates[i].operator_count(), templates[i].to_string()); };
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto key = canonical_key(templates[i].ptr());
    auto [it, inserted] = chosen.try_emplace(key, i);
    if (!inserted && rank(i) < rank(it->second)) it->second = i;
  }
  std::vector<bool> keep(templates.size(), false);
  for (const auto& [key, i] : chosen) keep[i] = true;
  std::vector<Template> out;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    if (keep[i]) out.push_back(templates[i]);
  }
  return out;
}

}  // namespace ptstl
