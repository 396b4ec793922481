#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ptstl/error.hpp"
#include "ptstl/format.hpp"
#include "ptstl/formula.hpp"
#include "ptstl/parser.hpp"

namespace ptstl {

enum class SlotKind : std::uint8_t { Time, Value };

/// Where a template parameter sits in the tree.
struct SlotInfo {
  std::string name;
  SlotKind kind = SlotKind::Value;
  /// Value slots: the predicate's variable.
  std::string variable;
  /// Time slots: whether this is the interval's lower bound `a`.
  bool is_lower = false;
  /// Time slots: index of the parameter holding the other bound of the same interval.
  std::optional<std::size_t> partner;
  /// Time slots: the other bound when it is a constant.
  std::optional<std::int64_t> partner_value;
};

/// Parametric formula. Parameters are ordered by first textual occurrence and each occurs once.
class Template {
 public:
  Template() : root_(node::make_true()) {}

  explicit Template(NodePtr root) : root_(std::move(root)) {
    struct PendingTime {
      const Node* owner;
      bool is_lower;
      std::size_t index;
    };
    std::vector<PendingTime> time_slots;
    auto add = [&](SlotInfo info) {
      for (const auto& s : slots_) {
        if (s.name == info.name) throw ParameterError("parameter ?" + info.name + " occurs more than once");
      }
      slots_.push_back(std::move(info));
      return slots_.size() - 1;
    };
    node::for_each_slot(
        *root_,
        [&](const Node& n, const ValueSlot& s) {
          if (const auto* p = std::get_if<ParamRef>(&s)) {
            SlotInfo info;
            info.name = p->name;
            info.kind = SlotKind::Value;
            info.variable = n.var_name;
            add(std::move(info));
          } else if (!std::isfinite(std::get<double>(s))) {
            throw Error("predicate constant must be finite");
          }
        },
        [&](const Node& n, const TimeSlot& s, bool is_lower) {
          if (const auto* p = std::get_if<ParamRef>(&s)) {
            SlotInfo info;
            info.name = p->name;
            info.kind = SlotKind::Time;
            info.is_lower = is_lower;
            time_slots.push_back({&n, is_lower, add(std::move(info))});
          } else if (std::get<std::int64_t>(s) < 0) {
            throw IntervalError("interval bounds must be non-negative");
          }
          if (!is_lower && std::holds_alternative<std::int64_t>(n.lo) && std::holds_alternative<std::int64_t>(n.hi)) {
            Interval(std::get<std::int64_t>(n.lo), std::get<std::int64_t>(n.hi));
          }
        });
    for (const auto& ts : time_slots) {
      auto& info = slots_[ts.index];
      const TimeSlot& other = ts.is_lower ? ts.owner->hi : ts.owner->lo;
      if (const auto* p = std::get_if<ParamRef>(&other)) {
        info.partner = index_of(p->name);
      } else {
        info.partner_value = std::get<std::int64_t>(other);
      }
    }
  }

  /// Every concrete formula is a template with no parameters.
  explicit Template(const Formula& f) : Template(f.ptr()) {}

  [[nodiscard]] const Node& root() const noexcept { return *root_; }
  [[nodiscard]] const NodePtr& ptr() const noexcept { return root_; }
  [[nodiscard]] std::size_t arity() const noexcept { return slots_.size(); }
  [[nodiscard]] const std::vector<SlotInfo>& slots() const noexcept { return slots_; }
  [[nodiscard]] const SlotInfo& slot(std::size_t i) const { return slots_.at(i); }
  [[nodiscard]] std::string to_string() const { return node::to_string(*root_); }
  [[nodiscard]] std::size_t operator_count() const { return node::operator_count(*root_); }

  [[nodiscard]] std::vector<std::string> params() const {
    std::vector<std::string> out;
    out.reserve(slots_.size());
    for (const auto& s : slots_) out.push_back(s.name);
    return out;
  }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].name == name) return i;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw ParameterError("template has no parameter ?" + std::string(name));
  }

  friend bool operator==(const Template& x, const Template& y) { return node::equal(*x.root_, *y.root_); }

 private:
  NodePtr root_;
  std::vector<SlotInfo> slots_;
};

inline Template parse_template(std::string_view text, const std::vector<std::string>& schema) {
  return Template(parse_tree(text, schema));
}

/// Parameter name -> assigned number.
using Valuation = std::map<std::string, double>;

/// Positional valuation in the template's parameter order.
inline std::vector<double> to_positional(const Template& tpl, const Valuation& v) {
  std::vector<double> out(tpl.arity());
  for (std::size_t i = 0; i < tpl.arity(); ++i) {
    const auto it = v.find(tpl.slot(i).name);
    if (it == v.end()) throw ParameterError("valuation is missing parameter ?" + tpl.slot(i).name);
    out[i] = it->second;
  }
  return out;
}

inline Valuation to_valuation(const Template& tpl, const std::vector<double>& values) {
  Valuation v;
  for (std::size_t i = 0; i < tpl.arity() && i < values.size(); ++i) v[tpl.slot(i).name] = values[i];
  return v;
}

namespace detail {

inline std::int64_t time_value(const std::string& name, double v) {
  if (!std::isfinite(v) || v < 0 || v != std::floor(v)) {
    throw IntervalError("time parameter ?" + name + " = " + format_number(v) + " is not a non-negative integer");
  }
  return static_cast<std::int64_t>(v);
}

inline NodePtr substitute(const Node& n, const Template& tpl, const std::vector<double>& values) {
  auto value_of = [&](const ValueSlot& s) -> ValueSlot {
    if (const auto* p = std::get_if<ParamRef>(&s)) return values[tpl.index_of(p->name)];
    return s;
  };
  auto time_of = [&](const TimeSlot& s) -> TimeSlot {
    if (const auto* p = std::get_if<ParamRef>(&s)) return time_value(p->name, values[tpl.index_of(p->name)]);
    return s;
  };
  switch (n.kind) {
    case Kind::True:
      return node::make_true();
    case Kind::Pred:
      return node::make_pred(n.var, n.var_name, n.cmp, value_of(n.constant));
    case Kind::Not:
      return node::make_not(substitute(*n.lhs, tpl, values));
    case Kind::And:
    case Kind::Or:
      return node::make_binary(n.kind, substitute(*n.lhs, tpl, values), substitute(*n.rhs, tpl, values));
    case Kind::Prev:
    case Kind::Always:
    case Kind::Since: {
      auto lo = time_of(n.lo);
      auto hi = time_of(n.hi);
      Interval(std::get<std::int64_t>(lo), std::get<std::int64_t>(hi));
      return node::make_temporal(n.kind, lo, hi, substitute(*n.lhs, tpl, values),
                                 n.rhs ? substitute(*n.rhs, tpl, values) : nullptr);
    }
  }
  return nullptr;
}

}  // namespace detail

/// Replaces every parameter slot with its number. Throws ParameterError on a missing parameter
/// and IntervalError when an instantiated interval is malformed.
inline Formula instantiate(const Template& tpl, const std::vector<double>& values) {
  if (values.size() != tpl.arity()) {
    throw ParameterError("expected " + std::to_string(tpl.arity()) + " parameter values, got " +
                         std::to_string(values.size()));
  }
  return Formula(detail::substitute(tpl.root(), tpl, values));
}

inline Formula instantiate(const Template& tpl, const Valuation& v) { return instantiate(tpl, to_positional(tpl, v)); }

/// I: raising the parameter can only turn violations into satisfactions. D: the reverse.
enum class MonotonicityTag : std::uint8_t { I, D };

inline MonotonicityTag flip(MonotonicityTag t) { return t == MonotonicityTag::I ? MonotonicityTag::D : MonotonicityTag::I; }
inline char to_char(MonotonicityTag t) { return t == MonotonicityTag::I ? 'I' : 'D'; }

namespace detail {

inline std::optional<MonotonicityTag> find_tag(const Node& n, std::string_view p, bool negated) {
  auto tagged = [&](MonotonicityTag base) { return negated ? flip(base) : base; };
  auto is_param = [&](const auto& slot) {
    const auto* r = std::get_if<ParamRef>(&slot);
    return r && r->name == p;
  };
  switch (n.kind) {
    case Kind::True:
      return std::nullopt;
    case Kind::Pred:
      if (is_param(n.constant)) return tagged(n.cmp == Cmp::Greater ? MonotonicityTag::D : MonotonicityTag::I);
      return std::nullopt;
    case Kind::Not:
      return find_tag(*n.lhs, p, !negated);
    case Kind::And:
    case Kind::Or:
      if (auto t = find_tag(*n.lhs, p, negated)) return t;
      return find_tag(*n.rhs, p, negated);
    case Kind::Prev:
    case Kind::Since:
      if (is_param(n.lo)) return tagged(MonotonicityTag::D);
      if (is_param(n.hi)) return tagged(MonotonicityTag::I);
      if (auto t = find_tag(*n.lhs, p, negated)) return t;
      return n.rhs ? find_tag(*n.rhs, p, negated) : std::nullopt;
    case Kind::Always:
      if (is_param(n.lo)) return tagged(MonotonicityTag::I);
      if (is_param(n.hi)) return tagged(MonotonicityTag::D);
      return find_tag(*n.lhs, p, negated);
  }
  return std::nullopt;
}

}  // namespace detail

/// Syntactic monotonicity of `param`: the base tag of its slot, flipped once per enclosing Not.
inline MonotonicityTag monotonicity(const Template& tpl, std::string_view param) {
  if (auto t = detail::find_tag(tpl.root(), param, false)) return *t;
  throw ParameterError("template has no parameter ?" + std::string(param));
}

inline std::vector<MonotonicityTag> monotonicity_tags(const Template& tpl) {
  std::vector<MonotonicityTag> out;
  out.reserve(tpl.arity());
  for (const auto& s : tpl.slots()) out.push_back(monotonicity(tpl, s.name));
  return out;
}

/// Discretized range {lower, lower + step, ...} clipped to [lower, upper].
struct ParamDomain {
  double lower = 0.0;
  double upper = 0.0;
  double step = 1.0;
  SlotKind kind = SlotKind::Value;

  ParamDomain() = default;
  ParamDomain(double lo, double hi, double st, SlotKind k = SlotKind::Value) : lower(lo), upper(hi), step(st), kind(k) {
    validate();
  }

  void validate() const {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !std::isfinite(step)) {
      throw ConfigError("parameter domain bounds must be finite");
    }
    if (step <= 0) throw ConfigError("parameter domain step must be positive");
    if (lower > upper) throw ConfigError("parameter domain has lower > upper");
    if (kind == SlotKind::Time && (lower < 0 || lower != std::floor(lower) || step != std::floor(step))) {
      throw ConfigError("time domains need a non-negative integer lower bound and integer step");
    }
  }

  [[nodiscard]] std::size_t size() const {
    // tolerance absorbs representation error in decimal steps such as 0.05
    return static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
  }

  [[nodiscard]] double at(std::size_t i) const {
    const double v = lower + static_cast<double>(i) * step;
    if (kind == SlotKind::Time) return std::round(v);
    // snap accumulated binary error back onto the decimal grid
    const double snapped = std::round(v * 1e9) / 1e9;
    return std::abs(snapped - v) < 1e-9 * std::max(1.0, std::abs(v)) ? snapped : v;
  }

  [[nodiscard]] std::vector<double> grid() const {
    std::vector<double> g(size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = at(i);
    return g;
  }
};

/// Exhaustive grid cardinality: the product of the per-parameter grid sizes.
inline std::uint64_t grid_cardinality(const std::vector<ParamDomain>& domains) {
  std::uint64_t n = 1;
  for (const auto& d : domains) n *= d.size();
  return n;
}

/// Parameter domains attached from outside the template: value slots look up their predicate's
/// variable, time slots share one domain, and either may be overridden per parameter name.
struct DomainConfig {
  std::optional<ParamDomain> time;
  std::map<std::string, ParamDomain> variables;
  std::map<std::string, ParamDomain> overrides;
  std::size_t workers = 1;

  [[nodiscard]] ParamDomain domain_for(const SlotInfo& slot) const {
    if (auto it = overrides.find(slot.name); it != overrides.end()) {
      ParamDomain d = it->second;
      d.kind = slot.kind;
      d.validate();
      return d;
    }
    if (slot.kind == SlotKind::Time) {
      if (!time) throw ConfigError("no time domain configured for ?" + slot.name);
      ParamDomain d = *time;
      d.kind = SlotKind::Time;
      return d;
    }
    const auto it = variables.find(slot.variable);
    if (it == variables.end()) {
      throw ConfigError("no value domain configured for variable '" + slot.variable + "' (parameter ?" + slot.name + ")");
    }
    ParamDomain d = it->second;
    d.kind = SlotKind::Value;
    return d;
  }

  [[nodiscard]] std::vector<ParamDomain> domains_for(const Template& tpl) const {
    std::vector<ParamDomain> out;
    out.reserve(tpl.arity());
    for (const auto& s : tpl.slots()) out.push_back(domain_for(s));
    return out;
  }
};

}  // namespace ptstl
