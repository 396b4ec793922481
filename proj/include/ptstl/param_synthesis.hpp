#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ptstl/error.hpp"
#include "ptstl/evaluator.hpp"
#include "ptstl/parallel.hpp"
#include "ptstl/parametric.hpp"
#include "ptstl/trace.hpp"

namespace ptstl {

/// TP and FP of one evaluated grid cell.
struct CellScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
};

/// Outcome of a staircase walk over two grid axes, in grid indices.
struct DiagonalOutcome {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t evaluations = 0;
  /// Feasible cells whose TP equals the final best TP.
  std::size_t ties = 0;
  /// Cells in visiting order, including ones skipped as invalid.
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

/// Staircase search for max TP subject to FP <= bound on an m1 x m2 grid.
///
/// Axis 1 starts at its TP-maximizing end and only moves toward lower TP; axis 2 starts at its
/// TP-minimizing end and only moves toward higher TP. On an infeasible cell axis 1 moves, on a
/// feasible cell the cell is a candidate (accepted when TP >= best so far) and axis 2 moves. The
/// walk stops as soon as either index leaves its grid, so at most m1 + m2 cells are scored.
///
/// `valid(i1, i2)` marks cells that must not be scored (an interval with a > b). Such a cell is
/// passed over along axis 1 when a valid cell remains further along that axis in the same row,
/// otherwise along axis 2. `score(i1, i2)` returns the cell's CellScore.
template <class Valid, class Score>
DiagonalOutcome diagonal_walk(std::size_t m1, std::size_t m2, MonotonicityTag tag1, MonotonicityTag tag2,
                              std::size_t bound, Valid&& valid, Score&& score) {
  DiagonalOutcome out;
  if (m1 == 0 || m2 == 0) return out;
  const bool down1 = tag1 == MonotonicityTag::I;  // I: start at upper end, step down
  const bool up2 = tag2 == MonotonicityTag::I;    // I: start at lower end, step up
  auto i1 = static_cast<std::int64_t>(down1 ? m1 - 1 : 0);
  auto i2 = static_cast<std::int64_t>(up2 ? 0 : m2 - 1);
  const std::int64_t d1 = down1 ? -1 : 1;
  const std::int64_t d2 = up2 ? 1 : -1;
  const auto n1 = static_cast<std::int64_t>(m1);
  const auto n2 = static_cast<std::int64_t>(m2);
  auto in_bounds = [&] { return i1 >= 0 && i1 < n1 && i2 >= 0 && i2 < n2; };

  while (in_bounds()) {
    const auto c1 = static_cast<std::size_t>(i1);
    const auto c2 = static_cast<std::size_t>(i2);
    out.path.emplace_back(c1, c2);
    if (!valid(c1, c2)) {
      bool valid_ahead = false;
      for (std::int64_t k = i1 + d1; k >= 0 && k < n1; k += d1) {
        if (valid(static_cast<std::size_t>(k), c2)) {
          valid_ahead = true;
          break;
        }
      }
      if (valid_ahead) {
        i1 += d1;
      } else {
        i2 += d2;
      }
      continue;
    }
    const CellScore s = score(c1, c2);
    ++out.evaluations;
    if (s.fp > bound) {
      i1 += d1;
      continue;
    }
    if (!out.best || s.tp >= out.tp) {
      out.ties = (out.best && s.tp == out.tp) ? out.ties + 1 : 1;
      out.best = {c1, c2};
      out.tp = s.tp;
      out.fp = s.fp;
    }
    i2 += d2;
  }
  return out;
}

/// Outcome of a one-axis search, in grid indices.
struct LineOutcome {
  std::optional<std::size_t> best;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t evaluations = 0;
};

/// Binary search for the TP-maximizing feasible index on one monotone axis. TP and FP move in the
/// same direction as the parameter, so the optimum is the feasibility boundary on the TP-maximizing
/// side.
template <class Score>
LineOutcome binary_search_line(std::size_t m, MonotonicityTag tag, std::size_t bound, Score&& score) {
  LineOutcome out;
  if (m == 0) return out;
  // position k along the search order: from the TP-maximizing end toward the other
  auto index_at = [&](std::size_t k) { return tag == MonotonicityTag::I ? m - 1 - k : k; };
  std::size_t lo = 0;
  std::size_t hi = m;  // first feasible position lies in [lo, hi]; hi == m means none
  std::optional<CellScore> hi_score;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const CellScore s = score(index_at(mid));
    ++out.evaluations;
    if (s.fp <= bound) {
      hi = mid;
      hi_score = s;
    } else {
      lo = mid + 1;
    }
  }
  if (hi < m) {
    out.best = index_at(hi);
    out.tp = hi_score->tp;
    out.fp = hi_score->fp;
  }
  return out;
}

/// Best valuation found for a template under FP <= bound.
struct SearchResult {
  /// Positional valuation; empty optional when no grid point is feasible.
  std::optional<std::vector<double>> values;
  std::size_t tp = 0;
  std::size_t fp = 0;
  /// Formula-over-dataset evaluations performed.
  std::size_t evaluations = 0;
  /// Exhaustive grid size the search replaces.
  std::uint64_t grid_size = 0;
  std::size_t ties = 0;

  [[nodiscard]] bool feasible() const noexcept { return values.has_value(); }
};

namespace detail {

inline CellScore score_bits(const BitVector& bits, const BitVector& labels) {
  const std::size_t tp = BitVector::count_and(bits, labels);
  return {tp, bits.count() - tp};
}

/// Grid values of parameter `i` that keep its interval well formed when its partner bound is
/// `partner` (a constant or a value fixed by the caller).
inline std::vector<double> restrict_time_grid(const SlotInfo& slot, const std::vector<double>& grid,
                                              std::optional<double> partner) {
  if (slot.kind != SlotKind::Time || !partner) return grid;
  std::vector<double> out;
  for (double v : grid) {
    if (slot.is_lower ? v <= *partner : v >= *partner) out.push_back(v);
  }
  return out;
}

struct Candidate {
  std::vector<double> values;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t ties = 0;
};

/// Strictly better: higher TP, then lower FP.
inline bool better(std::size_t tp, std::size_t fp, const Candidate& than) {
  return tp > than.tp || (tp == than.tp && fp < than.fp);
}

}  // namespace detail

/// One-parameter search over `domain` by binary search.
inline SearchResult binary_search_1p(const Template& tpl, std::size_t bound, const FlatData& data,
                                     const ParamDomain& domain) {
  if (tpl.arity() != 1) throw ParameterError("binary_search_1p needs exactly one parameter, template has " + std::to_string(tpl.arity()));
  const auto& slot = tpl.slot(0);
  std::optional<double> partner;
  if (slot.partner_value) partner = static_cast<double>(*slot.partner_value);
  const auto grid = detail::restrict_time_grid(slot, domain.grid(), partner);

  SearchResult r;
  r.grid_size = domain.size();
  Evaluator ev(tpl, data);
  std::vector<double> values(1);
  const auto line = binary_search_line(grid.size(), monotonicity(tpl, slot.name), bound, [&](std::size_t i) {
    values[0] = grid[i];
    return detail::score_bits(ev.evaluate(values), data.labels());
  });
  r.evaluations = line.evaluations;
  if (line.best) {
    r.values = std::vector<double>{grid[*line.best]};
    r.tp = line.tp;
    r.fp = line.fp;
    r.ties = 1;
  }
  return r;
}

namespace detail {

/// Diagonal search over parameters (p1, p2) of `tpl` with every other parameter fixed in `base`.
/// Grids must already be restricted against fixed partners.
inline DiagonalOutcome run_diagonal(Evaluator& ev, const Template& tpl, std::size_t p1, std::size_t p2,
                                    const std::vector<double>& grid1, const std::vector<double>& grid2,
                                    MonotonicityTag tag1, MonotonicityTag tag2, std::size_t bound,
                                    std::vector<double>& values) {
  const auto& s1 = tpl.slot(p1);
  const bool linked = s1.kind == SlotKind::Time && s1.partner == p2;
  const auto& labels = ev.data().labels();
  auto valid = [&](std::size_t i1, std::size_t i2) {
    if (!linked) return true;
    return s1.is_lower ? grid1[i1] <= grid2[i2] : grid2[i2] <= grid1[i1];
  };
  return diagonal_walk(grid1.size(), grid2.size(), tag1, tag2, bound, valid, [&](std::size_t i1, std::size_t i2) {
    values[p1] = grid1[i1];
    values[p2] = grid2[i2];
    return score_bits(ev.evaluate(values), labels);
  });
}

}  // namespace detail

/// Two-parameter search over the full grids of `dom1` x `dom2`.
inline SearchResult diagonal_search(const Template& tpl, std::size_t bound, const FlatData& data, const ParamDomain& dom1,
                                    const ParamDomain& dom2) {
  if (tpl.arity() != 2) throw ParameterError("diagonal_search needs exactly two parameters, template has " + std::to_string(tpl.arity()));
  std::size_t p1 = 0;
  std::size_t p2 = 1;
  std::vector<ParamDomain> doms{dom1, dom2};
  // linked interval bounds walk with the lower bound on axis 1
  if (tpl.slot(0).kind == SlotKind::Time && tpl.slot(0).partner == 1 && !tpl.slot(0).is_lower) std::swap(p1, p2);

  auto grid_of = [&](std::size_t p) {
    const auto& s = tpl.slot(p);
    std::optional<double> partner;
    if (s.partner_value) partner = static_cast<double>(*s.partner_value);
    return detail::restrict_time_grid(s, doms[p].grid(), partner);
  };
  const auto g1 = grid_of(p1);
  const auto g2 = grid_of(p2);

  SearchResult r;
  r.grid_size = dom1.size() * dom2.size();
  Evaluator ev(tpl, data);
  std::vector<double> values(2);
  const auto out = detail::run_diagonal(ev, tpl, p1, p2, g1, g2, monotonicity(tpl, tpl.slot(p1).name),
                                        monotonicity(tpl, tpl.slot(p2).name), bound, values);
  r.evaluations = out.evaluations;
  if (out.best) {
    std::vector<double> v(2);
    v[p1] = g1[out.best->first];
    v[p2] = g2[out.best->second];
    r.values = std::move(v);
    r.tp = out.tp;
    r.fp = out.fp;
    r.ties = out.ties;
  }
  return r;
}

/// Two parameters searched by the diagonal, chosen by grid size (largest first, earlier position on
/// ties), returned in template order.
inline std::pair<std::size_t, std::size_t> select_diagonal_pair(const std::vector<ParamDomain>& domains) {
  std::vector<std::size_t> order(domains.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return domains[x].size() > domains[y].size(); });
  return {std::min(order[0], order[1]), std::max(order[0], order[1])};
}

/// Maximizes TP subject to FP <= bound over the parameter grids of `tpl`.
///
/// No parameters: one evaluation. One: binary search. Two: diagonal search. More: diagonal search
/// over the two largest grids for every combination of the remaining grids, keeping the highest
/// TP, then the lowest FP, then the first combination in odometer order. Combinations that fix an
/// interval with a > b are skipped without evaluation.
///
/// Every combination is first scored once at the diagonal pair's TP-maximizing corner, which bounds
/// the TP its diagonal can reach (a corner with a > b evaluates as an empty window, which is the
/// monotone limit). Diagonals then run in order of decreasing bound, and a combination whose bound
/// is below the best TP found in earlier batches is skipped; it could not have been selected. A
/// diagonal is also skipped when its TP-minimizing corner, where FP is smallest, already exceeds
/// the bound. The batches have a fixed size, so the result and the evaluation count do not depend
/// on `workers`.
inline SearchResult parameter_synthesis(const Template& tpl, std::size_t bound, const FlatData& data,
                                        const std::vector<ParamDomain>& domains, std::size_t workers = 1) {
  const std::size_t n = tpl.arity();
  if (domains.size() != n) {
    throw ConfigError("expected " + std::to_string(n) + " parameter domains, got " + std::to_string(domains.size()));
  }
  for (const auto& d : domains) {
    d.validate();
    if (d.size() == 0) throw ConfigError("empty parameter grid");
  }

  if (n == 0) {
    SearchResult r;
    r.grid_size = 1;
    Evaluator ev(tpl, data);
    const auto s = detail::score_bits(ev.evaluate({}), data.labels());
    r.evaluations = 1;
    if (s.fp <= bound) {
      r.values = std::vector<double>{};
      r.tp = s.tp;
      r.fp = s.fp;
      r.ties = 1;
    }
    return r;
  }
  if (n == 1) return binary_search_1p(tpl, bound, data, domains[0]);
  if (n == 2) return diagonal_search(tpl, bound, data, domains[0], domains[1]);

  const auto [p1, p2] = select_diagonal_pair(domains);
  std::vector<std::vector<double>> grids(n);
  for (std::size_t i = 0; i < n; ++i) grids[i] = domains[i].grid();
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != p1 && i != p2) rest.push_back(i);
  }
  std::size_t combos = 1;
  for (std::size_t i : rest) combos *= grids[i].size();

  const auto tag1 = monotonicity(tpl, tpl.slot(p1).name);
  const auto tag2 = monotonicity(tpl, tpl.slot(p2).name);

  // Combination c fixes rest[k] to grid index digit k of c, last parameter varying fastest.
  auto decode = [&](std::size_t c, std::vector<double>& values) {
    for (std::size_t k = rest.size(); k-- > 0;) {
      const auto& g = grids[rest[k]];
      values[rest[k]] = g[c % g.size()];
      c /= g.size();
    }
  };
  auto fixed_value = [&](const std::vector<double>& values, const SlotInfo& s) -> std::optional<double> {
    if (s.partner_value) return static_cast<double>(*s.partner_value);
    if (s.partner && *s.partner != p1 && *s.partner != p2) return values[*s.partner];
    return std::nullopt;
  };
  auto combo_valid = [&](const std::vector<double>& values) {
    for (std::size_t i : rest) {
      const auto& s = tpl.slot(i);
      if (s.kind != SlotKind::Time) continue;
      if (s.is_lower) {
        if (auto other = fixed_value(values, s); other && values[i] > *other) return false;
      } else if (s.partner_value && values[i] < static_cast<double>(*s.partner_value)) {
        return false;
      }
    }
    return true;
  };
  auto diagonal_grids = [&](const std::vector<double>& values) {
    return std::make_pair(detail::restrict_time_grid(tpl.slot(p1), grids[p1], fixed_value(values, tpl.slot(p1))),
                          detail::restrict_time_grid(tpl.slot(p2), grids[p2], fixed_value(values, tpl.slot(p2))));
  };
  // TP-maximizing end of an axis: upper end for tag I.
  auto tp_max_end = [](const std::vector<double>& g, MonotonicityTag t) { return t == MonotonicityTag::I ? g.back() : g.front(); };

  workers = std::max<std::size_t>(1, workers);
  std::vector<std::optional<Evaluator>> evaluators(workers);
  auto evaluator = [&](std::size_t w) -> Evaluator& {
    if (!evaluators[w]) evaluators[w].emplace(tpl, data);
    return *evaluators[w];
  };

  // Bounds, computed in chunks of consecutive combinations so unchanged subtrees stay cached.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> upper(combos, kNone);
  {
    const std::size_t chunk = std::max<std::size_t>(1, combos / (workers * 8));
    const std::size_t chunks = (combos + chunk - 1) / chunk;
    parallel_for(chunks, workers, [&](std::size_t ci, std::size_t w) {
      auto& ev = evaluator(w);
      std::vector<double> values(n, 0.0);
      const std::size_t end = std::min(combos, (ci + 1) * chunk);
      for (std::size_t c = ci * chunk; c < end; ++c) {
        decode(c, values);
        if (!combo_valid(values)) continue;
        const auto [g1, g2] = diagonal_grids(values);
        if (g1.empty() || g2.empty()) continue;
        values[p1] = tp_max_end(g1, tag1);
        values[p2] = tp_max_end(g2, tag2);
        upper[c] = BitVector::count_and(ev.evaluate(values), data.labels());
      }
    });
  }
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < combos; ++c) {
    if (upper[c] != kNone) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return upper[x] > upper[y]; });

  SearchResult r;
  r.grid_size = grid_cardinality(domains);
  r.evaluations = order.size();
  std::optional<detail::Candidate> best;
  std::size_t best_combo = 0;

  struct Outcome {
    std::optional<detail::Candidate> cand;
    std::size_t evaluations = 0;
  };
  constexpr std::size_t kBatch = 4;
  std::vector<Outcome> outcomes(kBatch);
  for (std::size_t start = 0; start < order.size(); start += kBatch) {
    const std::size_t threshold = best ? best->tp : 0;
    if (best && upper[order[start]] < threshold) break;
    const std::size_t count = std::min(kBatch, order.size() - start);
    for (auto& o : outcomes) o = {};
    parallel_for(count, std::min(workers, count), [&](std::size_t k, std::size_t w) {
      const std::size_t c = order[start + k];
      if (best && upper[c] < threshold) return;
      std::vector<double> values(n, 0.0);
      decode(c, values);
      const auto [g1, g2] = diagonal_grids(values);
      // FP is smallest at the TP-minimizing corner; if even that breaks the bound, no cell fits.
      values[p1] = tag1 == MonotonicityTag::I ? g1.front() : g1.back();
      values[p2] = tag2 == MonotonicityTag::I ? g2.front() : g2.back();
      if (BitVector::count_and_not(evaluator(w).evaluate(values), data.labels()) > bound) {
        outcomes[k].evaluations = 1;
        return;
      }
      const auto out = detail::run_diagonal(evaluator(w), tpl, p1, p2, g1, g2, tag1, tag2, bound, values);
      outcomes[k].evaluations = out.evaluations + 1;
      if (!out.best) return;
      values[p1] = g1[out.best->first];
      values[p2] = g2[out.best->second];
      outcomes[k].cand = detail::Candidate{values, out.tp, out.fp, out.ties};
    });
    for (std::size_t k = 0; k < count; ++k) {
      r.evaluations += outcomes[k].evaluations;
      const auto& cand = outcomes[k].cand;
      if (!cand) continue;
      const std::size_t c = order[start + k];
      const bool take = !best || detail::better(cand->tp, cand->fp, *best) ||
                        (cand->tp == best->tp && cand->fp == best->fp && c < best_combo);
      if (take) {
        best = cand;
        best_combo = c;
      }
    }
  }
  if (best) {
    r.values = best->values;
    r.tp = best->tp;
    r.fp = best->fp;
    r.ties = best->ties;
  }
  return r;
}

inline SearchResult parameter_synthesis(const Template& tpl, std::size_t bound, const Dataset& d,
                                        const std::vector<ParamDomain>& domains, std::size_t workers = 1) {
  FlatData data(d);
  return parameter_synthesis(tpl, bound, data, domains, workers);
}

}  // namespace ptstl
