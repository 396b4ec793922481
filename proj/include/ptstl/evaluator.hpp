#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptstl/bitvector.hpp"
#include "ptstl/error.hpp"
#include "ptstl/formula.hpp"
#include "ptstl/parametric.hpp"
#include "ptstl/trace.hpp"

namespace ptstl {

/// Closed index range [first, last]; `empty` when the window has no points.
struct IndexRange {
  std::int64_t first = 0;
  std::int64_t last = -1;
  [[nodiscard]] bool empty() const noexcept { return last < first; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// I(t, [a, b]) = [t - b, t - a] intersected with [0, t].
inline IndexRange eval_window(std::int64_t t, const Interval& iv, std::int64_t /*K*/ = 0) {
  if (t - iv.a < 0) return {};
  return {std::max<std::int64_t>(0, t - iv.b), t - iv.a};
}

/// All traces of a dataset laid end to end. Temporal windows never cross a trace boundary:
/// `start[g]` is the global index of the first point of the trace containing point g.
class FlatData {
 public:
  explicit FlatData(const Dataset& d) : FlatData(d.traces(), d.variable_names()) {}
  explicit FlatData(const LabeledTrace& tr) : FlatData(std::vector<LabeledTrace>{tr}, tr.variable_names()) {}

  FlatData(const std::vector<LabeledTrace>& traces, const std::vector<std::string>& names) : names_(names) {
    std::size_t total = 0;
    for (const auto& tr : traces) total += tr.length();
    columns_.assign(names_.size(), std::vector<double>(total));
    start_.resize(total);
    labels_ = BitVector(total);
    std::size_t g = 0;
    for (const auto& tr : traces) {
      offsets_.push_back(g);
      for (std::size_t t = 0; t < tr.length(); ++t, ++g) {
        start_[g] = static_cast<std::uint32_t>(offsets_.back());
        for (std::size_t i = 0; i < names_.size(); ++i) columns_[i][g] = tr.value(t, i);
        if (tr.label(t)) labels_.set(g);
      }
    }
    offsets_.push_back(g);
    for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) max_length_ = std::max(max_length_, offsets_[i + 1] - offsets_[i]);
  }

  [[nodiscard]] std::size_t size() const noexcept { return start_.size(); }
  [[nodiscard]] std::size_t max_length() const noexcept { return max_length_; }
  [[nodiscard]] std::size_t trace_count() const noexcept { return offsets_.size() - 1; }
  /// Global index of trace i's first point; offset(trace_count()) == size().
  [[nodiscard]] std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  [[nodiscard]] const std::vector<std::string>& variable_names() const noexcept { return names_; }
  [[nodiscard]] const std::vector<double>& column(std::size_t i) const { return columns_.at(i); }
  [[nodiscard]] const std::vector<std::uint32_t>& starts() const noexcept { return start_; }
  [[nodiscard]] const BitVector& labels() const noexcept { return labels_; }

  [[nodiscard]] std::size_t column_index(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw UnknownVariable(name);
    return static_cast<std::size_t>(it - names_.begin());
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::uint32_t> start_;
  std::vector<std::size_t> offsets_;
  std::size_t max_length_ = 0;
  BitVector labels_;
};

/// Confusion counts of formula labels against dataset labels.
struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t mismatch = 0;
  double accuracy = 0.0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + fp + tn + fn; }

  static Metrics from_bits(const BitVector& formula, const BitVector& labels) {
    Metrics m;
    const std::size_t n = labels.size();
    const std::size_t pos_formula = formula.count();
    const std::size_t pos_labels = labels.count();
    m.tp = BitVector::count_and(formula, labels);
    m.fp = pos_formula - m.tp;
    m.fn = pos_labels - m.tp;
    m.tn = n - m.tp - m.fp - m.fn;
    m.mismatch = m.fp + m.fn;
    m.accuracy = n == 0 ? 1.0 : static_cast<double>(m.tp + m.tn) / static_cast<double>(n);
    return m;
  }

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Template compiled to a post-order instruction list over one FlatData.
///
/// Every instruction owns an output bit vector. An instruction is recomputed only when one of the
/// parameters in its subtree changed since the last call, so sweeping one or two parameters reuses
/// the label vectors of every subtree that does not mention them.
class Evaluator {
 public:
  Evaluator(const Template& tpl, const FlatData& data) : data_(&data), arity_(tpl.arity()) {
    compile(tpl, tpl.root());
    prefix_.resize(data.size() + 1);
    prefix2_.resize(data.size() + 1);
    for (auto& op : ops_) op.out = BitVector(data.size());
  }

  Evaluator(const Formula& f, const FlatData& data) : Evaluator(Template(f), data) {}

  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;
  Evaluator(Evaluator&&) noexcept = default;
  Evaluator& operator=(Evaluator&&) noexcept = default;

  [[nodiscard]] std::size_t arity() const noexcept { return arity_; }
  [[nodiscard]] const FlatData& data() const noexcept { return *data_; }

  /// Label vector of the template instantiated at `values` (positional). Time values must be
  /// non-negative integers; a > b yields the empty window everywhere. The reference stays valid
  /// until the next call.
  const BitVector& evaluate(const std::vector<double>& values) {
    for (auto& op : ops_) {
      if (op.fresh && unchanged(op, values)) continue;
      run(op, values);
      op.fresh = true;
      for (std::size_t k = 0; k < op.deps.size(); ++k) op.dep_values[k] = values[op.deps[k]];
    }
    return ops_.back().out;
  }

  const BitVector& evaluate() { return evaluate({}); }

  Metrics metrics(const std::vector<double>& values) { return Metrics::from_bits(evaluate(values), data_->labels()); }

 private:
  struct Op {
    Kind kind = Kind::True;
    std::size_t column = 0;
    Cmp cmp = Cmp::Less;
    double constant = 0.0;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    // parameter indices, or npos when the slot is constant
    std::size_t constant_slot = npos;
    std::size_t lo_slot = npos;
    std::size_t hi_slot = npos;
    std::size_t lhs = npos;
    std::size_t rhs = npos;
    std::vector<std::size_t> deps;
    std::vector<double> dep_values;
    bool fresh = false;
    BitVector out;
    // predicate results by constant; a sweep revisits the same grid values
    std::vector<std::pair<double, BitVector>> cache;
  };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t compile(const Template& tpl, const Node& n) {
    Op op;
    op.kind = n.kind;
    auto slot_index = [&](const auto& slot) -> std::size_t {
      if (const auto* p = std::get_if<ParamRef>(&slot)) return tpl.index_of(p->name);
      return npos;
    };
    if (n.lhs) op.lhs = compile(tpl, *n.lhs);
    if (n.rhs) op.rhs = compile(tpl, *n.rhs);
    switch (n.kind) {
      case Kind::Pred:
        op.column = data_->column_index(n.var_name);
        op.cmp = n.cmp;
        op.constant_slot = slot_index(n.constant);
        if (op.constant_slot == npos) op.constant = std::get<double>(n.constant);
        break;
      case Kind::Prev:
      case Kind::Always:
      case Kind::Since:
        op.lo_slot = slot_index(n.lo);
        op.hi_slot = slot_index(n.hi);
        if (op.lo_slot == npos) op.lo = std::get<std::int64_t>(n.lo);
        if (op.hi_slot == npos) op.hi = std::get<std::int64_t>(n.hi);
        break;
      default:
        break;
    }
    for (std::size_t s : {op.constant_slot, op.lo_slot, op.hi_slot}) {
      if (s != npos) op.deps.push_back(s);
    }
    for (std::size_t child : {op.lhs, op.rhs}) {
      if (child == npos) continue;
      for (std::size_t d : ops_[child].deps) op.deps.push_back(d);
    }
    std::sort(op.deps.begin(), op.deps.end());
    op.deps.erase(std::unique(op.deps.begin(), op.deps.end()), op.deps.end());
    op.dep_values.resize(op.deps.size());
    ops_.push_back(std::move(op));
    return ops_.size() - 1;
  }

  static bool unchanged(const Op& op, const std::vector<double>& values) {
    for (std::size_t k = 0; k < op.deps.size(); ++k) {
      if (values[op.deps[k]] != op.dep_values[k]) return false;
    }
    return true;
  }

  /// Fills `out` word by word from a per-index predicate.
  template <class Bit>
  static void fill_bits(BitVector& out, Bit&& bit) {
    auto& words = out.words();
    const std::size_t n = out.size();
    for (std::size_t w = 0; w < words.size(); ++w) {
      BitVector::word_type word = 0;
      const std::size_t base = w * BitVector::kWordBits;
      const std::size_t end = std::min(n, base + BitVector::kWordBits);
      for (std::size_t g = base; g < end; ++g) {
        if (bit(g)) word |= BitVector::word_type{1} << (g - base);
      }
      words[w] = word;
    }
  }

  static void prefix_counts(const BitVector& bits, std::vector<std::uint32_t>& prefix) {
    prefix[0] = 0;
    for (std::size_t g = 0; g < bits.size(); ++g) prefix[g + 1] = prefix[g] + (bits.test(g) ? 1u : 0u);
  }

  void run(Op& op, const std::vector<double>& values) {
    const auto& start = data_->starts();
    switch (op.kind) {
      case Kind::True:
        op.out.fill(true);
        return;
      case Kind::Pred: {
        const double c = op.constant_slot == npos ? op.constant : values[op.constant_slot];
        for (const auto& [key, bits] : op.cache) {
          if (key == c) {
            op.out = bits;
            return;
          }
        }
        const auto& col = data_->column(op.column);
        if (op.cmp == Cmp::Less) {
          fill_bits(op.out, [&](std::size_t g) { return col[g] < c; });
        } else {
          fill_bits(op.out, [&](std::size_t g) { return col[g] > c; });
        }
        if (op.constant_slot != npos && op.cache.size() < kPredCache) op.cache.emplace_back(c, op.out);
        return;
      }
      case Kind::Not:
        op.out = ops_[op.lhs].out;
        op.out.flip();
        return;
      case Kind::And:
        op.out = ops_[op.lhs].out;
        op.out &= ops_[op.rhs].out;
        return;
      case Kind::Or:
        op.out = ops_[op.lhs].out;
        op.out |= ops_[op.rhs].out;
        return;
      default:
        break;
    }

    const std::int64_t a = op.lo_slot == npos ? op.lo : static_cast<std::int64_t>(values[op.lo_slot]);
    const std::int64_t b = op.hi_slot == npos ? op.hi : static_cast<std::int64_t>(values[op.hi_slot]);

    // offsets beyond the longest trace never fall inside a window
    const std::int64_t hi = std::min<std::int64_t>(b, static_cast<std::int64_t>(data_->max_length()) - 1);
    if (a <= hi && hi - a < static_cast<std::int64_t>(kShiftWindow) && hi < static_cast<std::int64_t>(kShiftLimit)) {
      run_shifted(op, a, hi);
      return;
    }
    if (a > hi) {
      // every window is empty
      op.out.fill(op.kind == Kind::Always);
      return;
    }

    if (op.kind == Kind::Prev || op.kind == Kind::Always) {
      prefix_counts(ops_[op.lhs].out, prefix_);
      const bool want_any = op.kind == Kind::Prev;
      fill_bits(op.out, [&](std::size_t gi) {
        const auto g = static_cast<std::int64_t>(gi);
        const auto s = static_cast<std::int64_t>(start[gi]);
        const std::int64_t last = g - a;
        const std::int64_t first = std::max(s, g - b);
        if (last < first) return !want_any;  // empty window: P false, A true
        const std::uint32_t hits = prefix_[last + 1] - prefix_[first];
        return want_any ? hits > 0 : hits == static_cast<std::uint32_t>(last - first + 1);
      });
      return;
    }

    // Since: phi2 at some t' in the window with phi1 on every point of [t', t].
    const BitVector& holds = ops_[op.lhs].out;
    prefix_counts(ops_[op.rhs].out, prefix2_);
    std::int64_t last_false = -1;
    fill_bits(op.out, [&](std::size_t gi) {
      const auto g = static_cast<std::int64_t>(gi);
      const auto s = static_cast<std::int64_t>(start[gi]);
      if (g == s) last_false = s - 1;
      if (!holds.test(gi)) last_false = g;
      const std::int64_t last = g - a;
      const std::int64_t first = std::max({s, g - b, last_false + 1});
      if (last < first) return false;
      return prefix2_[last + 1] - prefix2_[first] > 0;
    });
  }

  /// Bits of `src` moved k positions later (dst[g] = src[g - k]), zero filled.
  static void shift_words(const std::vector<BitVector::word_type>& src, std::size_t k,
                          std::vector<BitVector::word_type>& dst) {
    const std::size_t n = src.size();
    const std::size_t ws = k / BitVector::kWordBits;
    const std::size_t bs = k % BitVector::kWordBits;
    dst.assign(n, 0);
    for (std::size_t i = ws; i < n; ++i) {
      BitVector::word_type w = src[i - ws] << bs;
      if (bs && i > ws) w |= src[i - ws - 1] >> (BitVector::kWordBits - bs);
      dst[i] = w;
    }
  }

  /// masks_[k]: points at least k steps after the start of their trace.
  const BitVector& mask(std::size_t k) {
    if (masks_.empty()) {
      BitVector m0(data_->size(), true);
      masks_.push_back(std::move(m0));
    }
    while (masks_.size() <= k) {
      const auto& starts = data_->starts();
      BitVector m(data_->size());
      const std::size_t step = masks_.size();
      for (std::size_t g = 0; g < m.size(); ++g) {
        if (g - starts[g] >= step) m.set(g);
      }
      masks_.push_back(std::move(m));
    }
    return masks_[k];
  }

  /// Temporal operators over offsets a..hi as word-level shifts, one pass per offset.
  void run_shifted(Op& op, std::int64_t a, std::int64_t hi) {
    auto& out = op.out.words();
    const std::size_t n = out.size();
    const auto lo = static_cast<std::size_t>(a);
    const auto top = static_cast<std::size_t>(hi);
    for (std::size_t k = 0; k <= top; ++k) mask(k);
    if (op.kind == Kind::Prev || op.kind == Kind::Always) {
      const auto& x = ops_[op.lhs].out.words();
      const bool any = op.kind == Kind::Prev;
      std::fill(out.begin(), out.end(), any ? BitVector::word_type{0} : ~BitVector::word_type{0});
      for (std::size_t k = lo; k <= top; ++k) {
        shift_words(x, k, scratch_);
        const auto& m = masks_[k].words();
        if (any) {
          for (std::size_t i = 0; i < n; ++i) out[i] |= scratch_[i] & m[i];
        } else {
          for (std::size_t i = 0; i < n; ++i) out[i] &= scratch_[i] | ~m[i];
        }
      }
      op.out.clear_tail();
      return;
    }
    // Since: run_[g] says phi1 held on [g - k, g] inside the trace.
    const auto& x1 = ops_[op.lhs].out.words();
    const auto& x2 = ops_[op.rhs].out.words();
    run_ = x1;
    std::fill(out.begin(), out.end(), BitVector::word_type{0});
    for (std::size_t k = 0; k <= top; ++k) {
      BitVector::word_type alive = 0;
      if (k > 0) {
        shift_words(x1, k, scratch_);
        const auto& m = masks_[k].words();
        for (std::size_t i = 0; i < n; ++i) {
          run_[i] &= scratch_[i] & m[i];
          alive |= run_[i];
        }
        if (!alive) break;
      }
      if (k >= lo) {
        shift_words(x2, k, scratch_);
        for (std::size_t i = 0; i < n; ++i) out[i] |= run_[i] & scratch_[i];
      }
    }
  }

  static constexpr std::size_t kPredCache = 128;
  static constexpr std::size_t kShiftWindow = 64;
  static constexpr std::size_t kShiftLimit = 256;

  const FlatData* data_;
  std::size_t arity_;
  std::vector<BitVector> masks_;
  std::vector<BitVector::word_type> scratch_;
  std::vector<BitVector::word_type> run_;
  std::vector<Op> ops_;
  std::vector<std::uint32_t> prefix_;
  std::vector<std::uint32_t> prefix2_;
};

/// l^phi along one trace: bit t is set iff (x, t) satisfies phi.
inline BitVector label_vector(const Formula& f, const LabeledTrace& tr) {
  FlatData data(tr);
  Evaluator ev(f, data);
  return ev.evaluate();
}

/// Label vectors for every trace of a dataset, in trace order.
inline std::vector<BitVector> label_vectors(const Formula& f, const Dataset& d) {
  FlatData data(d);
  Evaluator ev(f, data);
  const BitVector& all = ev.evaluate();
  std::vector<BitVector> out;
  out.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(all.slice(data.offset(i), d[i].length()));
  return out;
}

inline std::size_t count_positives(const Formula& f, const LabeledTrace& tr) { return label_vector(f, tr).count(); }
inline std::size_t count_negatives(const Formula& f, const LabeledTrace& tr) {
  return tr.length() - count_positives(f, tr);
}
inline std::size_t count_positives(const Formula& f, const Dataset& d) {
  FlatData data(d);
  Evaluator ev(f, data);
  return ev.evaluate().count();
}
inline std::size_t count_negatives(const Formula& f, const Dataset& d) { return d.total_points() - count_positives(f, d); }

inline Metrics metrics(const Formula& f, const Dataset& d) {
  FlatData data(d);
  Evaluator ev(f, data);
  return ev.metrics({});
}

}  // namespace ptstl
