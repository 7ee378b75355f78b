#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace crossmi {

// Ordered samples (x_t, y_t) of two real-valued variables. Validated on
// construction: equal lengths, at least one sample, all values finite.
// Immutable after construction; safe to share across threads.
class PairedSeries {
 public:
  PairedSeries(std::vector<double> x, std::vector<double> y);

  std::size_t size() const { return x_.size(); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_, y_;
};

// Three aligned series; z is the conditioning variable.
class TripleSeries {
 public:
  TripleSeries(std::vector<double> x, std::vector<double> y, std::vector<double> z);

  std::size_t size() const { return x_.size(); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& z() const { return z_; }

 private:
  std::vector<double> x_, y_, z_;
};

// A PairedSeries partitioned by condition label, with relative weights per
// condition. Weights default to the empirical frequency of each label and
// must sum to 1 within 1e-12.
class ConditionedDataset {
 public:
  ConditionedDataset(PairedSeries samples, std::vector<std::string> labels);
  ConditionedDataset(PairedSeries samples, std::vector<std::string> labels,
                     std::map<std::string, double> weights);

  const PairedSeries& samples() const { return samples_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, double>& weights() const { return weights_; }

  // Distinct labels in order of first appearance.
  std::vector<std::string> label_order() const;

  // Samples belonging to one condition, in original order.
  PairedSeries condition(const std::string& label) const;

  // Concatenation of per-label subsets in label-run order; reproduces the
  // original sample multiset.
  PairedSeries concatenate_by_label() const;

 private:
  PairedSeries samples_;
  std::vector<std::string> labels_;
  std::map<std::string, double> weights_;
};

// --- CSV ingestion / emission -----------------------------------------------
//
// Input CSV: header row required, UTF-8, '.' decimal separator, columns
// selected by name. Parse failures report the 1-based data row index.

PairedSeries read_paired_csv(const std::string& path, const std::string& x_col,
                             const std::string& y_col);

TripleSeries read_triple_csv(const std::string& path, const std::string& x_col,
                             const std::string& y_col, const std::string& z_col);

// Reads a string-valued column (condition labels).
std::vector<std::string> read_label_column(const std::string& path,
                                           const std::string& col);

void write_paired_csv(const std::string& path, const PairedSeries& series,
                      const std::string& x_col = "x", const std::string& y_col = "y");

// Shortest round-trip decimal formatting for doubles (CSV/JSON emission).
std::string format_double(double v);

}  // namespace crossmi
