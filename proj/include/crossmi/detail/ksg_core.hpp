#pragma once

// Internal machinery shared by the parallel KSG kernels and the serial
// reference implementation: problem packing, jitter, time-delay embeddings.
// Both paths consume the exact same jittered matrices and digamma terms;
// they differ only in neighbour search and loop scheduling.

#include <cstdint>
#include <vector>

#include "crossmi/estimators.hpp"

namespace crossmi::detail {

// One digamma term of the local estimate: sign * psi(count(cols) + 1),
// where count is the number of reference points strictly inside the joint
// k-NN radius in the subspace spanned by cols.
struct MarginalTerm {
  std::vector<std::uint32_t> cols;
  double sign;
};

struct KsgProblem {
  std::size_t n_ref = 0, n_test = 0, dim = 0;
  std::vector<double> ref;    // jittered, row-major n_ref x dim
  std::vector<double> test;   // jittered, row-major n_test x dim
  std::vector<MarginalTerm> terms;
  double psi_constant = 0.0;  // psi(k) + psi(n_ref) for MI, psi(k) for CMI
  std::size_t k = 0;
};

// Packs variable blocks (each a list of equal-length columns) into joint
// matrices, applies counter-keyed jitter scaled by the reference
// per-column standard deviation, and assembles the digamma terms.
// var_dims partitions the columns into 2 (MI) or 3 (CMI: a, b, condition)
// variables. Validates k against the reference size.
KsgProblem build_problem(const std::vector<const std::vector<double>*>& test_cols,
                         const std::vector<const std::vector<double>*>& ref_cols,
                         const std::vector<std::size_t>& var_dims,
                         bool conditional, const EstimatorConfig& cfg);

// Time-delay embedding columns: out[0..h-1] are lags 1..h, out[h] is the
// current value. Rows start at t = history_len.
std::vector<std::vector<double>> embed_history(const std::vector<double>& series,
                                               std::size_t history_len);

// Embedded problems shared by the production and reference paths:
// transfer entropy over (X_{<t}; Y_t | Y_{<t}) and active information
// storage over (X_{<t}; X_t).
KsgProblem build_te_problem(const PairedSeries& test, const PairedSeries& reference,
                            std::size_t history_len, const EstimatorConfig& cfg);
KsgProblem build_ais_problem(const std::vector<double>& test,
                             const std::vector<double>& reference,
                             std::size_t history_len, const EstimatorConfig& cfg);

// Assembles a LocalInfoSeries (serial mean accumulation in index order).
LocalInfoSeries finish_locals(std::vector<double> locals, const KsgProblem& p,
                              Backend backend);

}  // namespace crossmi::detail
