#pragma once

// Independent reference implementations and random generators shared by the tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ptstl/ptstl.hpp"

namespace testing_support {

using ptstl::BitVector;
using ptstl::Dataset;
using ptstl::Formula;
using ptstl::Kind;
using ptstl::LabeledTrace;
using ptstl::Node;

// ---------------------------------------------------------------------------
// Direct recursion over the satisfaction relation, one (trace, t) at a time.

inline bool holds(const Node& n, const LabeledTrace& tr, std::int64_t t) {
  auto lo = [&] { return std::get<std::int64_t>(n.lo); };
  auto hi = [&] { return std::get<std::int64_t>(n.hi); };
  switch (n.kind) {
    case Kind::True:
      return true;
    case Kind::Pred: {
      const double x = tr.value(static_cast<std::size_t>(t), n.var);
      const double c = std::get<double>(n.constant);
      return n.cmp == ptstl::Cmp::Less ? x < c : x > c;
    }
    case Kind::Not:
      return !holds(*n.lhs, tr, t);
    case Kind::And:
      return holds(*n.lhs, tr, t) && holds(*n.rhs, tr, t);
    case Kind::Or:
      return holds(*n.lhs, tr, t) || holds(*n.rhs, tr, t);
    case Kind::Prev:
      for (std::int64_t s = t - hi(); s <= t - lo(); ++s) {
        if (s >= 0 && s <= t && holds(*n.lhs, tr, s)) return true;
      }
      return false;
    case Kind::Always:
      for (std::int64_t s = t - hi(); s <= t - lo(); ++s) {
        if (s >= 0 && s <= t && !holds(*n.lhs, tr, s)) return false;
      }
      return true;
    case Kind::Since:
      for (std::int64_t s = t - hi(); s <= t - lo(); ++s) {
        if (s < 0 || s > t || !holds(*n.rhs, tr, s)) continue;
        bool all = true;
        for (std::int64_t u = s; u <= t && all; ++u) all = holds(*n.lhs, tr, u);
        if (all) return true;
      }
      return false;
  }
  return false;
}

inline BitVector naive_labels(const Formula& f, const LabeledTrace& tr) {
  BitVector out(tr.length());
  for (std::size_t t = 0; t < tr.length(); ++t) out.set(t, holds(f.root(), tr, static_cast<std::int64_t>(t)));
  return out;
}

// ---------------------------------------------------------------------------
// Random data.

inline LabeledTrace random_trace(std::mt19937_64& rng, const std::vector<std::string>& schema, std::size_t length,
                                 const std::string& id = "0", int value_range = 3) {
  std::uniform_int_distribution<int> value(-value_range, value_range);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<double>> cols(schema.size(), std::vector<double>(length));
  for (auto& c : cols) {
    for (auto& v : c) v = value(rng);
  }
  BitVector labels(length);
  for (std::size_t t = 0; t < length; ++t) labels.set(t, coin(rng));
  return LabeledTrace(id, schema, std::move(cols), std::move(labels));
}

inline Dataset random_dataset(std::mt19937_64& rng, const std::vector<std::string>& schema, std::size_t traces,
                              std::size_t min_len, std::size_t max_len, int value_range = 3) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::vector<LabeledTrace> out;
  for (std::size_t i = 0; i < traces; ++i) out.push_back(random_trace(rng, schema, len(rng), std::to_string(i), value_range));
  return Dataset(std::move(out));
}

/// Random concrete formula with exactly `ops` operators. Constants are mostly integers near the
/// trace values so ties with data points occur; intervals may exceed the trace length.
inline ptstl::NodePtr random_tree(std::mt19937_64& rng, const std::vector<std::string>& schema, std::size_t ops,
                                  int max_bound = 6) {
  using namespace ptstl::node;
  if (ops == 0) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(2 * schema.size()));
    const int k = pick(rng);
    if (k == static_cast<int>(2 * schema.size())) return make_true();
    std::uniform_int_distribution<int> c(-4, 4);
    double constant = c(rng);
    if (std::bernoulli_distribution(0.25)(rng)) constant += 0.5;
    const auto var = static_cast<std::size_t>(k / 2);
    return make_pred(var, schema[var], k % 2 ? ptstl::Cmp::Greater : ptstl::Cmp::Less, constant);
  }
  auto interval = [&] {
    std::uniform_int_distribution<int> b(0, max_bound);
    std::int64_t x = b(rng);
    std::int64_t y = b(rng);
    if (x > y) std::swap(x, y);
    return std::pair<std::int64_t, std::int64_t>{x, y};
  };
  std::uniform_int_distribution<int> kind(0, 5);
  const int k = kind(rng);
  if (k <= 2) {
    auto child = random_tree(rng, schema, ops - 1, max_bound);
    if (k == 0) return make_not(child);
    const auto [a, b] = interval();
    return k == 1 ? make_prev(a, b, child) : make_always(a, b, child);
  }
  std::uniform_int_distribution<std::size_t> split(0, ops - 1);
  const std::size_t left = split(rng);
  auto l = random_tree(rng, schema, left, max_bound);
  auto r = random_tree(rng, schema, ops - 1 - left, max_bound);
  if (k == 3) return make_and(l, r);
  if (k == 4) return make_or(l, r);
  const auto [a, b] = interval();
  return make_since(a, b, l, r);
}

inline Formula random_formula(std::mt19937_64& rng, const std::vector<std::string>& schema, std::size_t max_ops,
                              int max_bound = 6) {
  std::uniform_int_distribution<std::size_t> ops(0, max_ops);
  return Formula(random_tree(rng, schema, ops(rng), max_bound));
}

// ---------------------------------------------------------------------------
// Exhaustive grid search.

struct GridOptimum {
  bool feasible = false;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t valid_cells = 0;
};

/// Visits every valuation of the grid product, skipping intervals with a > b.
inline void for_each_valuation(const ptstl::Template& tpl, const std::vector<ptstl::ParamDomain>& domains,
                               const std::function<void(const std::vector<double>&)>& fn) {
  const std::size_t n = domains.size();
  std::vector<std::vector<double>> grids;
  for (const auto& d : domains) grids.push_back(d.grid());
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> v(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) v[i] = grids[i][idx[i]];
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto& s = tpl.slot(i);
      if (s.kind != ptstl::SlotKind::Time || !s.is_lower) continue;
      const double b = s.partner ? v[*s.partner] : static_cast<double>(*s.partner_value);
      ok = v[i] <= b;
    }
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto& s = tpl.slot(i);
      if (s.kind == ptstl::SlotKind::Time && !s.is_lower && !s.partner) ok = static_cast<double>(*s.partner_value) <= v[i];
    }
    if (ok) fn(v);
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < grids[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (n == 0) return;
  }
}

inline GridOptimum brute_force(const ptstl::Template& tpl, std::size_t bound, const Dataset& d,
                               const std::vector<ptstl::ParamDomain>& domains) {
  GridOptimum best;
  for_each_valuation(tpl, domains, [&](const std::vector<double>& v) {
    ++best.valid_cells;
    const auto m = ptstl::metrics(ptstl::instantiate(tpl, v), d);
    if (m.fp > bound) return;
    if (!best.feasible || m.tp > best.tp || (m.tp == best.tp && m.fp < best.fp)) {
      best.feasible = true;
      best.tp = m.tp;
      best.fp = m.fp;
    }
  });
  return best;
}

/// Strict bitwise inclusion a <= b.
inline bool subset(const BitVector& a, const BitVector& b) { return BitVector::count_and_not(a, b) == 0; }

}  // namespace testing_support
