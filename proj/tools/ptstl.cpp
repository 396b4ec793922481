// Command-line front end: eval, optimize, enumerate, synthesize, gen.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptstl/io.hpp"
#include "ptstl/ptstl.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<ptstl::Template> read_templates(const std::string& path, const std::vector<std::string>& schema) {
  std::ifstream in(path);
  if (!in) throw ptstl::ConfigError("cannot open templates file '" + path + "'");
  std::vector<ptstl::Template> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.push_back(ptstl::parse_template(line, schema));
    } catch (const ptstl::Error& e) {
      throw ptstl::ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

/// trace,t,label,formula per point.
void write_plot_data(const std::string& path, const ptstl::Dataset& d, const ptstl::Formula& f) {
  std::ofstream out(path);
  if (!out) throw ptstl::ConfigError("cannot open '" + path + "' for writing");
  const auto vectors = ptstl::label_vectors(f, d);
  out << "trace,t,label,formula\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t t = 0; t < d[i].length(); ++t) {
      out << d[i].id() << ',' << t << ',' << (d[i].label(t) ? 1 : 0) << ',' << (vectors[i].test(t) ? 1 : 0) << '\n';
    }
  }
}

void emit_dataset(const ptstl::Dataset& d, const std::string& out_path) {
  if (out_path.empty()) {
    ptstl::write_dataset(std::cout, d);
  } else {
    ptstl::save_dataset(out_path, d);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Past-time signal temporal logic formula synthesis from labeled traces"};
  app.require_subcommand(1);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a formula on a dataset and print metrics as JSON");
  std::string data_path, formula_text, labels_out, plot_out;
  eval->add_option("--data", data_path, "Dataset CSV")->required();
  eval->add_option("--formula", formula_text, "Formula text")->required();
  eval->add_option("--labels-out", labels_out, "Write per-point dataset and formula labels as CSV");
  eval->add_option("--report-plot-data", plot_out, "Alias of --labels-out");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Optimize one template's parameters under an FP bound");
  std::string template_text, config_path;
  std::size_t fp_bound = 0;
  std::optional<std::size_t> workers;
  optimize->add_option("--data", data_path, "Dataset CSV")->required();
  optimize->add_option("--template", template_text, "Template text with ?name parameters")->required();
  optimize->add_option("--config", config_path, "Domain configuration JSON")->required();
  optimize->add_option("--fp-bound", fp_bound, "Largest allowed false-positive count")->required();
  optimize->add_option("--workers", workers, "Worker threads (overrides config)");

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "List all templates with at most N operators");
  std::string vars;
  std::size_t max_ops = 0;
  std::int64_t shift = 0;
  bool do_prune = false;
  enumerate->add_option("--vars", vars, "Comma-separated variable names")->required();
  enumerate->add_option("--max-ops", max_ops, "Operator bound")->required();
  enumerate->add_option("--shift", shift, "Wrap every template in P[s,s]")->check(CLI::PositiveNumber);
  enumerate->add_flag("--prune", do_prune, "Drop syntactically redundant templates");

  // synthesize
  auto* synthesize = app.add_subcommand("synthesize", "Synthesize a disjunction of optimized formulas");
  std::size_t max_disjuncts = 1;
  std::optional<std::size_t> syn_max_ops;
  std::string templates_path, report_path;
  synthesize->add_option("--data", data_path, "Dataset CSV")->required();
  synthesize->add_option("--config", config_path, "Domain configuration JSON")->required();
  synthesize->add_option("--fp-bound", fp_bound, "Largest allowed false-positive count per disjunct")->required();
  synthesize->add_option("--max-disjuncts", max_disjuncts, "Disjunct limit")->required()->check(CLI::PositiveNumber);
  auto* ops_opt = synthesize->add_option("--max-ops", syn_max_ops, "Enumerate templates with at most N operators");
  auto* tpl_opt = synthesize->add_option("--templates", templates_path, "File with one template per line");
  ops_opt->excludes(tpl_opt);
  synthesize->add_option("--shift", shift, "Wrap every template in P[s,s]")->check(CLI::PositiveNumber);
  synthesize->add_flag("--prune", do_prune, "Drop syntactically redundant templates");
  synthesize->add_option("--workers", workers, "Worker threads (overrides config)");
  synthesize->add_option("--report", report_path, "Write the human-readable report here instead of stderr");
  synthesize->add_option("--report-plot-data", plot_out, "Write per-point dataset and formula labels as CSV");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic labeled dataset");
  gen->require_subcommand(1);
  std::uint64_t seed = 0;
  std::size_t n_traces = 1, length = 1;
  std::string out_path;
  auto* planted = gen->add_subcommand("planted", "Random walks labeled by a planted formula");
  std::string planted_formula;
  double noise = 0.0;
  ptstl::WalkParams walk;
  for (auto* sub : {planted, gen->add_subcommand("traffic", "Six-link, two-signal queue network")}) {
    sub->add_option("--seed", seed, "Random seed")->required();
    sub->add_option("--traces", n_traces, "Number of traces")->required()->check(CLI::PositiveNumber);
    sub->add_option("--length", length, "Points per trace")->required()->check(CLI::PositiveNumber);
    sub->add_option("--out", out_path, "Output CSV (default: stdout)");
  }
  planted->add_option("--vars", vars, "Comma-separated variable names")->required();
  planted->add_option("--formula", planted_formula, "Planted formula")->required();
  planted->add_option("--noise", noise, "Label flip probability in [0, 0.5)");
  planted->add_option("--walk-min", walk.min, "Random-walk lower bound");
  planted->add_option("--walk-max", walk.max, "Random-walk upper bound");
  planted->add_option("--walk-step", walk.max_step, "Largest random-walk increment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  auto load_cfg = [&] {
    auto cfg = ptstl::load_config(config_path);
    if (workers) cfg.workers = std::max<std::size_t>(1, *workers);
    return cfg;
  };

  try {
    if (eval->parsed()) {
      const auto d = ptstl::load_dataset(data_path);
      const auto f = ptstl::parse_formula(formula_text, d.variable_names());
      auto j = ptstl::metrics_to_json(ptstl::metrics(f, d));
      j["formula"] = f.to_string();
      std::cout << j.dump(2) << '\n';
      if (!labels_out.empty()) write_plot_data(labels_out, d, f);
      if (!plot_out.empty()) write_plot_data(plot_out, d, f);
    } else if (optimize->parsed()) {
      const auto d = ptstl::load_dataset(data_path);
      const auto tpl = ptstl::parse_template(template_text, d.variable_names());
      const auto cfg = load_cfg();
      const auto r = ptstl::parameter_synthesis(tpl, fp_bound, d, cfg.domains_for(tpl), cfg.workers);
      std::cout << ptstl::search_result_to_json(tpl, r).dump(2) << '\n';
    } else if (enumerate->parsed()) {
      auto templates = ptstl::formula_space(split_list(vars), max_ops);
      if (do_prune) templates = ptstl::prune(templates);
      if (shift > 0) templates = ptstl::shift_wrap(templates, shift);
      for (const auto& t : templates) std::cout << t.to_string() << '\n';
    } else if (synthesize->parsed()) {
      const auto d = ptstl::load_dataset(data_path);
      const auto cfg = load_cfg();
      std::vector<ptstl::Template> templates;
      if (!templates_path.empty()) {
        templates = read_templates(templates_path, d.variable_names());
      } else {
        templates = ptstl::formula_space(d.variable_names(), syn_max_ops.value_or(1));
      }
      if (do_prune) templates = ptstl::prune(templates);
      if (shift > 0) templates = ptstl::shift_wrap(templates, shift);
      const auto r = ptstl::formula_synthesis(templates, fp_bound, d, max_disjuncts, cfg);
      std::cout << ptstl::synthesis_result_to_json(r).dump(2) << '\n';
      const auto report = ptstl::format_report(r);
      if (report_path.empty()) {
        std::cerr << report;
      } else {
        std::ofstream(report_path) << report;
      }
      if (!plot_out.empty()) write_plot_data(plot_out, d, r.combined);
    } else if (planted->parsed()) {
      const auto schema = split_list(vars);
      const auto f = ptstl::parse_formula(planted_formula, schema);
      emit_dataset(ptstl::planted_dataset(seed, schema, n_traces, length, f, noise, walk), out_path);
    } else {
      emit_dataset(ptstl::traffic_dataset(seed, n_traces, length), out_path);
    }
  } catch (const ptstl::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ptstl::UnknownVariable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ptstl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
