#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ptstl/bitvector.hpp"
#include "ptstl/error.hpp"
#include "ptstl/format.hpp"

namespace ptstl {

/// One finite discrete signal x_0..x_K with a {0,1} label per time point.
/// Values are stored column-major: column(i)[t] is x^i_t.
class LabeledTrace {
 public:
  LabeledTrace() = default;
  LabeledTrace(std::string id, std::vector<std::string> variable_names,
               std::vector<std::vector<double>> columns, BitVector labels)
      : id_(std::move(id)),
        names_(std::move(variable_names)),
        columns_(std::move(columns)),
        labels_(std::move(labels)) {
    if (columns_.size() != names_.size()) {
      throw DataError("trace '" + id_ + "': column count does not match variable count");
    }
    for (const auto& c : columns_) {
      if (c.size() != labels_.size()) {
        throw DataError("trace '" + id_ + "': value rows do not match label count");
      }
    }
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw DataError("trace '" + id_ + "': duplicate variable '" + n + "'");
    }
  }

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  /// K + 1
  [[nodiscard]] std::size_t length() const noexcept { return labels_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& variable_names() const noexcept { return names_; }
  [[nodiscard]] const std::vector<double>& column(std::size_t var) const { return columns_.at(var); }
  [[nodiscard]] double value(std::size_t t, std::size_t var) const { return columns_.at(var).at(t); }
  [[nodiscard]] const BitVector& labels() const noexcept { return labels_; }
  [[nodiscard]] bool label(std::size_t t) const { return labels_.test(t); }

  friend bool operator==(const LabeledTrace&, const LabeledTrace&) = default;

 private:
  std::string id_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  BitVector labels_;
};

/// Nonempty ordered collection of traces sharing one variable schema.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<LabeledTrace> traces) : traces_(std::move(traces)) {
    if (traces_.empty()) throw DataError("dataset must contain at least one trace");
    names_ = traces_.front().variable_names();
    for (const auto& tr : traces_) {
      if (tr.variable_names() != names_) {
        throw DataError("schema mismatch: trace '" + tr.id() + "' has different variables than '" +
                        traces_.front().id() + "'");
      }
    }
  }

  [[nodiscard]] const std::vector<LabeledTrace>& traces() const noexcept { return traces_; }
  [[nodiscard]] const std::vector<std::string>& variable_names() const noexcept { return names_; }
  [[nodiscard]] std::size_t size() const noexcept { return traces_.size(); }
  [[nodiscard]] const LabeledTrace& operator[](std::size_t i) const { return traces_.at(i); }

  /// Sum of K + 1 over traces.
  [[nodiscard]] std::size_t total_points() const noexcept {
    std::size_t n = 0;
    for (const auto& tr : traces_) n += tr.length();
    return n;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<LabeledTrace> traces_;
  std::vector<std::string> names_;
};

struct LabelCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

inline LabelCounts dataset_label_counts(const Dataset& d) {
  LabelCounts c;
  for (const auto& tr : d.traces()) {
    const std::size_t pos = tr.labels().count();
    c.positives += pos;
    c.negatives += tr.length() - pos;
  }
  return c;
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

}  // namespace detail

/// Reads the `trace,t,<var1>,...,<varn>,label` CSV format. Rows of a trace may appear in any
/// order; they are sorted by t and must cover 0..K exactly. A trace that leaves a variable
/// column empty does not have that variable, which is a schema mismatch unless every trace
/// leaves it empty. `source` names the input in error messages.
inline Dataset read_dataset(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    for (auto f : detail::split_csv_line(line)) header.emplace_back(f);
    break;
  }
  if (header.size() < 3 || header.front() != "trace" || header[1] != "t" || header.back() != "label") {
    throw DataError(source, line_no, "header must be 'trace,t,<variables...>,label'");
  }
  const std::size_t n_vars = header.size() - 3;
  std::vector<std::string> var_names(header.begin() + 2, header.end() - 1);
  {
    std::set<std::string> seen;
    for (const auto& v : var_names) {
      if (v.empty()) throw DataError(source, line_no, "empty variable name in header");
      if (!seen.insert(v).second) throw DataError(source, line_no, "duplicate column '" + v + "'");
    }
  }

  struct Row {
    std::size_t t;
    std::vector<double> values;
    bool label;
    std::size_t line;
  };
  struct Group {
    std::vector<Row> rows;
    std::vector<bool> present;  // which variable columns carry values
    std::size_t first_line;
  };
  std::vector<std::string> order;
  std::map<std::string, Group> groups;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError(source, line_no,
                      "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    const std::string id(fields[0]);
    if (id.empty()) throw DataError(source, line_no, "empty trace id");

    const auto t_val = parse_number(fields[1]);
    if (!t_val || *t_val < 0 || *t_val != static_cast<double>(static_cast<std::size_t>(*t_val)) ||
        fields[1].find_first_of(".eE") != std::string_view::npos) {
      throw DataError(source, line_no, "time index '" + std::string(fields[1]) + "' is not a non-negative integer");
    }

    const auto lab = fields.back();
    if (lab != "0" && lab != "1") {
      throw DataError(source, line_no, "label '" + std::string(lab) + "' is not 0 or 1");
    }

    Row row{static_cast<std::size_t>(*t_val), std::vector<double>(n_vars, 0.0), lab == "1", line_no};
    std::vector<bool> present(n_vars, false);
    for (std::size_t i = 0; i < n_vars; ++i) {
      const auto f = fields[2 + i];
      if (f.empty()) continue;
      const auto v = parse_number(f);
      if (!v) throw DataError(source, line_no, "value '" + std::string(f) + "' for '" + var_names[i] + "' is not a finite number");
      row.values[i] = *v;
      present[i] = true;
    }

    auto [it, inserted] = groups.try_emplace(id);
    if (inserted) {
      order.push_back(id);
      it->second.present = present;
      it->second.first_line = line_no;
    } else if (it->second.present != present) {
      throw DataError(source, line_no, "row of trace '" + id + "' has a different set of variable columns than its first row");
    }
    it->second.rows.push_back(std::move(row));
  }

  if (order.empty()) throw DataError(source, line_no, "no data rows");

  const auto& ref_present = groups.at(order.front()).present;
  for (const auto& id : order) {
    const auto& g = groups.at(id);
    if (g.present != ref_present) {
      auto describe = [&](const std::vector<bool>& p) {
        std::string s = "(";
        bool first = true;
        for (std::size_t i = 0; i < n_vars; ++i) {
          if (!p[i]) continue;
          if (!first) s += ",";
          s += var_names[i];
          first = false;
        }
        return s + ")";
      };
      throw DataError(source, g.first_line,
                      "schema mismatch: trace '" + id + "' has variables " + describe(g.present) + " but trace '" +
                          order.front() + "' has " + describe(ref_present));
    }
  }
  std::vector<std::size_t> kept;
  std::vector<std::string> schema;
  for (std::size_t i = 0; i < n_vars; ++i) {
    if (ref_present[i]) {
      kept.push_back(i);
      schema.push_back(var_names[i]);
    }
  }

  std::vector<LabeledTrace> traces;
  traces.reserve(order.size());
  for (const auto& id : order) {
    auto& rows = groups.at(id).rows;
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].t != k) {
        const auto& bad = rows[k];
        const std::string what = (k > 0 && rows[k].t == rows[k - 1].t) ? "duplicate time index " : "non-consecutive time index ";
        throw DataError(source, bad.line,
                        what + std::to_string(bad.t) + " in trace '" + id + "' (expected " + std::to_string(k) + ")");
      }
    }
    std::vector<std::vector<double>> cols(kept.size(), std::vector<double>(rows.size()));
    BitVector labels(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      for (std::size_t c = 0; c < kept.size(); ++c) cols[c][t] = rows[t].values[kept[c]];
      if (rows[t].label) labels.set(t);
    }
    traces.emplace_back(id, schema, std::move(cols), std::move(labels));
  }
  return Dataset(std::move(traces));
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path, 0, "cannot open file");
  return read_dataset(in, path);
}

inline void write_dataset(std::ostream& out, const Dataset& d) {
  out << "trace,t";
  for (const auto& n : d.variable_names()) out << ',' << n;
  out << ",label\n";
  for (const auto& tr : d.traces()) {
    for (std::size_t t = 0; t < tr.length(); ++t) {
      out << tr.id() << ',' << t;
      for (std::size_t i = 0; i < tr.dimension(); ++i) out << ',' << format_number(tr.value(t, i));
      out << ',' << (tr.label(t) ? '1' : '0') << '\n';
    }
  }
}

inline void save_dataset(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw DataError(path, 0, "cannot open file for writing");
  write_dataset(out, d);
}

inline std::string dataset_to_csv(const Dataset& d) {
  std::ostringstream os;
  write_dataset(os, d);
  return os.str();
}

inline Dataset dataset_from_csv(const std::string& text) {
  std::istringstream is(text);
  return read_dataset(is);
}

}  // namespace ptstl
