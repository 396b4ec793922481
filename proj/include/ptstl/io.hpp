#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptstl/error.hpp"
#include "ptstl/evaluator.hpp"
#include "ptstl/formula.hpp"
#include "ptstl/param_synthesis.hpp"
#include "ptstl/parametric.hpp"
#include "ptstl/synthesis.hpp"

namespace ptstl {

using json = nlohmann::ordered_json;

namespace detail {

inline json slot_to_json(const ValueSlot& s) {
  if (const auto* p = std::get_if<ParamRef>(&s)) return json{{"param", p->name}};
  return std::get<double>(s);
}

inline json slot_to_json(const TimeSlot& s) {
  if (const auto* p = std::get_if<ParamRef>(&s)) return json{{"param", p->name}};
  return std::get<std::int64_t>(s);
}

inline const char* op_name(Kind k) {
  switch (k) {
    case Kind::True: return "true";
    case Kind::Pred: return "pred";
    case Kind::Not: return "not";
    case Kind::And: return "and";
    case Kind::Or: return "or";
    case Kind::Prev: return "prev";
    case Kind::Always: return "always";
    case Kind::Since: return "since";
  }
  return "?";
}

}  // namespace detail

/// Tree form: {"op": kind, ...} with "arg" for unary operators and "lhs"/"rhs" for binary ones.
/// Parameter slots appear as {"param": name}.
inline json node_to_json(const Node& n) {
  json j;
  j["op"] = detail::op_name(n.kind);
  switch (n.kind) {
    case Kind::True:
      break;
    case Kind::Pred:
      j["var"] = n.var_name;
      j["cmp"] = n.cmp == Cmp::Less ? "<" : ">";
      j["value"] = detail::slot_to_json(n.constant);
      break;
    case Kind::Not:
      j["arg"] = node_to_json(*n.lhs);
      break;
    case Kind::And:
    case Kind::Or:
      j["lhs"] = node_to_json(*n.lhs);
      j["rhs"] = node_to_json(*n.rhs);
      break;
    case Kind::Prev:
    case Kind::Always:
      j["lo"] = detail::slot_to_json(n.lo);
      j["hi"] = detail::slot_to_json(n.hi);
      j["arg"] = node_to_json(*n.lhs);
      break;
    case Kind::Since:
      j["lo"] = detail::slot_to_json(n.lo);
      j["hi"] = detail::slot_to_json(n.hi);
      j["lhs"] = node_to_json(*n.lhs);
      j["rhs"] = node_to_json(*n.rhs);
      break;
  }
  return j;
}

inline NodePtr node_from_json(const json& j, const std::vector<std::string>& schema) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) throw ConfigError("formula node needs a string \"op\"");
  const auto op = j["op"].get<std::string>();
  auto child = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError("formula node '" + op + "' needs \"" + key + "\"");
    return node_from_json(j[key], schema);
  };
  auto time = [&](const char* key) -> TimeSlot {
    if (!j.contains(key)) throw ConfigError("formula node '" + op + "' needs \"" + key + "\"");
    const auto& v = j[key];
    if (v.is_object() && v.contains("param")) return ParamRef{v["param"].get<std::string>()};
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw IntervalError("time bound must be a non-negative integer");
    return v.get<std::int64_t>();
  };
  if (op == "true") return node::make_true();
  if (op == "pred") {
    const auto var = j.at("var").get<std::string>();
    const auto it = std::find(schema.begin(), schema.end(), var);
    if (it == schema.end()) throw UnknownVariable(var);
    const auto cmp = j.at("cmp").get<std::string>();
    if (cmp != "<" && cmp != ">") throw ConfigError("cmp must be \"<\" or \">\"");
    const auto& v = j.at("value");
    ValueSlot c = v.is_object() ? ValueSlot{ParamRef{v.at("param").get<std::string>()}} : ValueSlot{v.get<double>()};
    return node::make_pred(static_cast<std::size_t>(it - schema.begin()), var, cmp == "<" ? Cmp::Less : Cmp::Greater, c);
  }
  if (op == "not") return node::make_not(child("arg"));
  if (op == "and") return node::make_and(child("lhs"), child("rhs"));
  if (op == "or") return node::make_or(child("lhs"), child("rhs"));
  if (op == "prev" || op == "always") {
    auto lo = time("lo");
    auto hi = time("hi");
    if (std::holds_alternative<std::int64_t>(lo) && std::holds_alternative<std::int64_t>(hi)) {
      Interval(std::get<std::int64_t>(lo), std::get<std::int64_t>(hi));
    }
    return op == "prev" ? node::make_prev(lo, hi, child("arg")) : node::make_always(lo, hi, child("arg"));
  }
  if (op == "since") {
    auto lo = time("lo");
    auto hi = time("hi");
    if (std::holds_alternative<std::int64_t>(lo) && std::holds_alternative<std::int64_t>(hi)) {
      Interval(std::get<std::int64_t>(lo), std::get<std::int64_t>(hi));
    }
    return node::make_since(lo, hi, child("lhs"), child("rhs"));
  }
  throw ConfigError("unknown formula node '" + op + "'");
}

inline json formula_to_json(const Formula& f) { return node_to_json(f.root()); }
inline Formula formula_from_json(const json& j, const std::vector<std::string>& schema) {
  return Formula(node_from_json(j, schema));
}
inline json template_to_json(const Template& t) { return node_to_json(t.root()); }
inline Template template_from_json(const json& j, const std::vector<std::string>& schema) {
  return Template(node_from_json(j, schema));
}

inline json metrics_to_json(const Metrics& m) {
  return json{{"tp", m.tp},       {"fp", m.fp},           {"tn", m.tn},
              {"fn", m.fn},       {"mismatch", m.mismatch}, {"accuracy", m.accuracy},
              {"total", m.total()}};
}

inline json valuation_to_json(const Template& tpl, const std::vector<double>& values) {
  json v = json::object();
  for (std::size_t i = 0; i < tpl.arity(); ++i) v[tpl.slot(i).name] = values[i];
  return v;
}

inline json search_result_to_json(const Template& tpl, const SearchResult& r) {
  json j;
  j["template"] = tpl.to_string();
  j["feasible"] = r.feasible();
  j["valuation"] = r.feasible() ? valuation_to_json(tpl, *r.values) : json(nullptr);
  j["formula"] = r.feasible() ? json(instantiate(tpl, *r.values).to_string()) : json(nullptr);
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["evaluations"] = r.evaluations;
  j["grid_size"] = r.grid_size;
  j["ties"] = r.ties;
  return j;
}

inline json synthesis_result_to_json(const SynthesisResult& r) {
  json j;
  json ds = json::array();
  for (const auto& d : r.disjuncts) {
    ds.push_back(json{{"formula", d.formula.to_string()},
                      {"template_index", d.template_index},
                      {"metrics", metrics_to_json(d.metrics)},
                      {"combined_tp", d.combined_tp}});
  }
  j["disjuncts"] = ds;
  j["combined"] = r.combined.to_string();
  j["combined_metrics"] = metrics_to_json(r.combined_metrics);
  j["iterations"] = r.iterations;
  j["terminated_by"] = to_string(r.terminated_by);
  j["templates"] = r.templates;
  j["candidates"] = r.candidates;
  j["evaluations"] = r.evaluations;
  return j;
}

inline ParamDomain domain_from_json(const json& j, SlotKind kind) {
  if (!j.is_object()) throw ConfigError("domain must be an object with lower, upper, step");
  try {
    return ParamDomain(j.at("lower").get<double>(), j.at("upper").get<double>(), j.at("step").get<double>(), kind);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad domain: ") + e.what());
  }
}

/// {"time": {lower, upper, step}, "variables": {name: {...}}, "overrides": {param: {...}},
///  "workers": n}
inline DomainConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  DomainConfig c;
  if (j.contains("time")) c.time = domain_from_json(j["time"], SlotKind::Time);
  if (j.contains("variables")) {
    for (const auto& [name, d] : j["variables"].items()) c.variables[name] = domain_from_json(d, SlotKind::Value);
  }
  if (j.contains("overrides")) {
    // kind is fixed once the slot is known; validate as a value domain here
    for (const auto& [name, d] : j["overrides"].items()) c.overrides[name] = domain_from_json(d, SlotKind::Value);
  }
  if (j.contains("workers")) {
    const auto w = j["workers"].get<std::int64_t>();
    if (w < 1) throw ConfigError("workers must be at least 1");
    c.workers = static_cast<std::size_t>(w);
  }
  return c;
}

inline DomainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace ptstl
