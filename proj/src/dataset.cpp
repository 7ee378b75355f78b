#include "crossmi/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crossmi/error.hpp"

namespace crossmi {

namespace {

void check_finite(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(errc::invalid_input,
                  std::string("non-finite value in ") + name + " at index " +
                      std::to_string(i));
    }
  }
}

}  // namespace

PairedSeries::PairedSeries(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) {
    throw Error(errc::invalid_input, "paired series length mismatch");
  }
  if (x_.empty()) {
    throw Error(errc::invalid_input, "empty series");
  }
  check_finite(x_, "x");
  check_finite(y_, "y");
}

TripleSeries::TripleSeries(std::vector<double> x, std::vector<double> y,
                           std::vector<double> z)
    : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
  if (x_.size() != y_.size() || x_.size() != z_.size()) {
    throw Error(errc::invalid_input, "triple series length mismatch");
  }
  if (x_.empty()) {
    throw Error(errc::invalid_input, "empty series");
  }
  check_finite(x_, "x");
  check_finite(y_, "y");
  check_finite(z_, "z");
}

namespace {

std::map<std::string, double> empirical_weights(const std::vector<std::string>& labels) {
  std::map<std::string, double> w;
  for (const auto& l : labels) w[l] += 1.0;
  for (auto& [l, v] : w) v /= static_cast<double>(labels.size());
  return w;
}

}  // namespace

ConditionedDataset::ConditionedDataset(PairedSeries samples,
                                       std::vector<std::string> labels)
    : ConditionedDataset(std::move(samples), labels, empirical_weights(labels)) {}

ConditionedDataset::ConditionedDataset(PairedSeries samples,
                                       std::vector<std::string> labels,
                                       std::map<std::string, double> weights)
    : samples_(std::move(samples)),
      labels_(std::move(labels)),
      weights_(std::move(weights)) {
  if (labels_.size() != samples_.size()) {
    throw Error(errc::invalid_input, "label count does not match sample count");
  }
  double total = 0.0;
  for (const auto& [label, w] : weights_) {
    if (w < 0.0 || w > 1.0) {
      throw Error(errc::invalid_input, "condition weight outside [0, 1]: " + label);
    }
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw Error(errc::invalid_input, "condition weights do not sum to 1");
  }
  for (const auto& l : labels_) {
    if (weights_.find(l) == weights_.end()) {
      throw Error(errc::invalid_input, "label missing from weights map: " + l);
    }
  }
}

std::vector<std::string> ConditionedDataset::label_order() const {
  std::vector<std::string> order;
  for (const auto& l : labels_) {
    if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
  }
  return order;
}

PairedSeries ConditionedDataset::condition(const std::string& label) const {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) {
      xs.push_back(samples_.x()[i]);
      ys.push_back(samples_.y()[i]);
    }
  }
  if (xs.empty()) {
    throw Error(errc::invalid_input, "no samples with label: " + label);
  }
  return PairedSeries(std::move(xs), std::move(ys));
}

PairedSeries ConditionedDataset::concatenate_by_label() const {
  std::vector<double> xs, ys;
  for (const auto& label : label_order()) {
    PairedSeries part = condition(label);
    xs.insert(xs.end(), part.x().begin(), part.x().end());
    ys.insert(ys.end(), part.y().begin(), part.y().end());
  }
  return PairedSeries(std::move(xs), std::move(ys));
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

double parse_cell(const std::string& raw, const std::string& col, std::size_t row) {
  const std::string cell = strip(raw);
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw Error(errc::invalid_input, "non-numeric value '" + cell + "' in column '" +
                                         col + "' at data row " + std::to_string(row));
  }
  if (!std::isfinite(value)) {
    throw Error(errc::invalid_input, "non-finite value in column '" + col +
                                         "' at data row " + std::to_string(row));
  }
  return value;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(errc::io, "cannot open file: " + path);
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(errc::invalid_input, "empty file: " + path);
  }
  for (auto& h : split_csv_line(line)) table.header.push_back(strip(h));
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    table.rows.push_back(split_csv_line(line));
  }
  return table;
}

std::size_t column_index(const CsvTable& table, const std::string& col,
                         const std::string& path) {
  auto it = std::find(table.header.begin(), table.header.end(), col);
  if (it == table.header.end()) {
    throw Error(errc::invalid_input, "missing column '" + col + "' in " + path);
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

std::vector<double> numeric_column(const CsvTable& table, const std::string& col,
                                   const std::string& path) {
  const std::size_t ci = column_index(table, col, path);
  if (table.rows.empty()) {
    throw Error(errc::invalid_input, "empty series (no data rows) in " + path);
  }
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (ci >= table.rows[r].size()) {
      throw Error(errc::invalid_input, "missing value in column '" + col +
                                           "' at data row " + std::to_string(r + 1));
    }
    out.push_back(parse_cell(table.rows[r][ci], col, r + 1));
  }
  return out;
}

}  // namespace

PairedSeries read_paired_csv(const std::string& path, const std::string& x_col,
                             const std::string& y_col) {
  CsvTable table = read_csv(path);
  return PairedSeries(numeric_column(table, x_col, path),
                      numeric_column(table, y_col, path));
}

TripleSeries read_triple_csv(const std::string& path, const std::string& x_col,
                             const std::string& y_col, const std::string& z_col) {
  CsvTable table = read_csv(path);
  return TripleSeries(numeric_column(table, x_col, path),
                      numeric_column(table, y_col, path),
                      numeric_column(table, z_col, path));
}

std::vector<std::string> read_label_column(const std::string& path,
                                           const std::string& col) {
  CsvTable table = read_csv(path);
  const std::size_t ci = column_index(table, col, path);
  if (table.rows.empty()) {
    throw Error(errc::invalid_input, "empty series (no data rows) in " + path);
  }
  std::vector<std::string> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (ci >= table.rows[r].size()) {
      throw Error(errc::invalid_input, "missing value in column '" + col +
                                           "' at data row " + std::to_string(r + 1));
    }
    out.push_back(strip(table.rows[r][ci]));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_paired_csv(const std::string& path, const PairedSeries& series,
                      const std::string& x_col, const std::string& y_col) {
  std::ofstream out(path);
  if (!out) {
    throw Error(errc::io, "cannot write file: " + path);
  }
  out << x_col << ',' << y_col << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_double(series.x()[i]) << ',' << format_double(series.y()[i]) << '\n';
  }
  if (!out) {
    throw Error(errc::io, "write failed: " + path);
  }
}

}  // namespace crossmi
