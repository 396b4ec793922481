#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ptstl/bitvector.hpp"
#include "ptstl/evaluator.hpp"
#include "ptstl/formula.hpp"
#include "ptstl/param_synthesis.hpp"
#include "ptstl/parallel.hpp"
#include "ptstl/parametric.hpp"
#include "ptstl/trace.hpp"

namespace ptstl {

enum class Termination { NoImprovement, DisjunctLimit };

inline const char* to_string(Termination t) {
  return t == Termination::NoImprovement ? "no-improvement" : "disjunct-limit";
}

struct Disjunct {
  Formula formula;
  Metrics metrics;
  /// Index of the template it was optimized from.
  std::size_t template_index = 0;
  /// TP of the disjunction after this disjunct was added.
  std::size_t combined_tp = 0;
};

struct SynthesisResult {
  std::vector<Disjunct> disjuncts;
  /// Left fold of the disjuncts with `or`; `not true` when there are none.
  Formula combined = Formula::falsity();
  Metrics combined_metrics;
  /// Selection rounds run, including a final round that found no improvement.
  std::size_t iterations = 0;
  Termination terminated_by = Termination::NoImprovement;
  std::size_t templates = 0;
  /// Optimized formulas with FP <= bound and TP > 0.
  std::size_t candidates = 0;
  /// Formula evaluations spent in parameter optimization.
  std::size_t evaluations = 0;
};

/// An optimized template kept for the selection rounds, with its label vector over the dataset.
struct Candidate {
  std::size_t template_index = 0;
  Formula formula;
  BitVector bits;
};

/// Optimizes every template under FP <= bound and keeps the feasible ones with TP > 0, in
/// template order.
inline std::vector<Candidate> optimize_templates(const std::vector<Template>& templates, std::size_t bound,
                                                 const FlatData& data, const DomainConfig& config,
                                                 std::size_t* evaluations = nullptr) {
  // resolve domains up front so configuration errors surface before any work
  std::vector<std::vector<ParamDomain>> domains;
  domains.reserve(templates.size());
  for (const auto& t : templates) domains.push_back(config.domains_for(t));

  std::vector<std::optional<Candidate>> found(templates.size());
  std::vector<std::size_t> evals(templates.size(), 0);
  parallel_for(templates.size(), config.workers, [&](std::size_t i, std::size_t) {
    const auto r = parameter_synthesis(templates[i], bound, data, domains[i], 1);
    evals[i] = r.evaluations;
    if (!r.feasible() || r.tp == 0) return;
    Formula f = instantiate(templates[i], *r.values);
    Evaluator ev(f, data);
    found[i] = Candidate{i, std::move(f), ev.evaluate()};
  });

  std::vector<Candidate> out;
  std::size_t total = 0;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    total += evals[i];
    if (found[i]) out.push_back(std::move(*found[i]));
  }
  if (evaluations) *evaluations = total;
  return out;
}

/// Greedy disjunction: starting from false, repeatedly add the candidate maximizing the TP of the
/// disjunction (ties: lower FP of the disjunction, then candidate order) until TP stops strictly
/// increasing or `max_disjuncts` are chosen.
inline SynthesisResult select_disjuncts(const std::vector<Candidate>& candidates, const FlatData& data,
                                        std::size_t max_disjuncts) {
  if (max_disjuncts == 0) throw ConfigError("disjunct limit must be at least 1");
  SynthesisResult res;
  res.candidates = candidates.size();
  const BitVector& labels = data.labels();
  BitVector phi(data.size());
  std::size_t tp = 0;
  res.terminated_by = Termination::NoImprovement;

  while (true) {
    if (res.disjuncts.size() == max_disjuncts) {
      res.terminated_by = Termination::DisjunctLimit;
      break;
    }
    ++res.iterations;
    std::optional<std::size_t> best;
    std::size_t best_tp = 0;
    std::size_t best_fp = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const std::size_t ctp = BitVector::count_or_and(phi, candidates[c].bits, labels);
      if (best && ctp < best_tp) continue;
      const std::size_t cfp = BitVector::count_or_and_not(phi, candidates[c].bits, labels);
      if (!best || ctp > best_tp || cfp < best_fp) {
        best = c;
        best_tp = ctp;
        best_fp = cfp;
      }
    }
    if (!best || best_tp <= tp) break;
    const auto& chosen = candidates[*best];
    phi |= chosen.bits;
    tp = best_tp;
    res.disjuncts.push_back(Disjunct{chosen.formula, Metrics::from_bits(chosen.bits, labels), chosen.template_index, tp});
  }

  if (!res.disjuncts.empty()) {
    Formula combined = res.disjuncts.front().formula;
    for (std::size_t k = 1; k < res.disjuncts.size(); ++k) combined = combined || res.disjuncts[k].formula;
    res.combined = combined;
  }
  res.combined_metrics = Metrics::from_bits(phi, labels);
  return res;
}

/// Optimizes each template, then builds the disjunction greedily. Each disjunct has FP <= bound,
/// so the disjunction has FP <= bound * disjunct count.
inline SynthesisResult formula_synthesis(const std::vector<Template>& templates, std::size_t bound, const FlatData& data,
                                         std::size_t max_disjuncts, const DomainConfig& config) {
  if (max_disjuncts == 0) throw ConfigError("disjunct limit must be at least 1");
  if (templates.empty()) throw ConfigError("no templates to synthesize from");
  std::size_t evaluations = 0;
  const auto candidates = optimize_templates(templates, bound, data, config, &evaluations);
  auto res = select_disjuncts(candidates, data, max_disjuncts);
  res.templates = templates.size();
  res.evaluations = evaluations;
  return res;
}

inline SynthesisResult formula_synthesis(const std::vector<Template>& templates, std::size_t bound, const Dataset& d,
                                         std::size_t max_disjuncts, const DomainConfig& config) {
  FlatData data(d);
  return formula_synthesis(templates, bound, data, max_disjuncts, config);
}

inline std::string format_report(const SynthesisResult& r) {
  std::ostringstream os;
  auto line = [&](const Metrics& m) {
    os << "TP=" << m.tp << " FP=" << m.fp << " TN=" << m.tn << " FN=" << m.fn << " mismatch=" << m.mismatch
       << " accuracy=" << format_number(m.accuracy);
  };
  os << "templates: " << r.templates << ", feasible candidates: " << r.candidates
     << ", optimization evaluations: " << r.evaluations << "\n";
  for (std::size_t k = 0; k < r.disjuncts.size(); ++k) {
    const auto& d = r.disjuncts[k];
    os << "phi" << (k + 1) << " = " << d.formula.to_string() << "\n    ";
    line(d.metrics);
    os << " (combined TP " << d.combined_tp << ")\n";
  }
  os << "combined: " << r.combined.to_string() << "\n    ";
  line(r.combined_metrics);
  os << "\nstopped after " << r.iterations << " round(s): " << to_string(r.terminated_by) << "\n";
  return os.str();
}

}  // namespace ptstl
