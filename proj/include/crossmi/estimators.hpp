#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crossmi/dataset.hpp"

namespace crossmi {

enum class Backend { Ksg, Gaussian };

// Knobs shared by every estimator call. Estimators are pure functions of
// their inputs plus rng_seed; tie-breaking jitter is drawn per point from a
// counter-based scheme keyed on (rng_seed, sample index, dimension), so
// results do not depend on thread count.
struct EstimatorConfig {
  Backend backend = Backend::Ksg;
  std::size_t k = 4;               // neighbour count (KSG)
  double noise_amplitude = 1e-8;   // jitter, scaled by per-dimension std of the reference
  std::uint64_t rng_seed = 0;
};

// Per-sample decomposition emitted by the Gaussian cross estimator.
struct GaussianDecomposition {
  double first_term_nats = 0.0;        // -1/2 ln(sigma^2_{Y|X} / sigma^2_Y)
  double mean_correction_nats = 0.0;   // mean of the per-sample residual corrections
  double sum_squared_residuals = 0.0;  // sum (y_i - mu_{Y|x_i})^2
};

// Pointwise information values (nats), one per evaluated test sample, plus
// their arithmetic mean. The common return shape of every estimator.
struct LocalInfoSeries {
  std::vector<double> locals;
  double mean = 0.0;
  Backend backend = Backend::Ksg;
  std::size_t k = 0;
  std::size_t n_test = 0;
  std::size_t n_reference = 0;
  std::optional<GaussianDecomposition> gaussian;
};

// --- KSG family (OpenMP kernels over a max-norm kd-tree) ---------------------

// MI of a sample set: for each point, radius = distance to its k-th nearest
// neighbour among the other N-1 points in joint space; marginal neighbours
// counted strictly inside that radius.
LocalInfoSeries ksg_mi(const PairedSeries& data, const EstimatorConfig& cfg);

// Cross MI: radius and all counts come from the reference set only; test
// points never count as their own neighbours. With exclude_self, test index
// t is assumed to be reference index t (sample-for-sample identity), which
// reproduces ksg_mi exactly when test == reference.
LocalInfoSeries cross_ksg_mi(const PairedSeries& test, const PairedSeries& reference,
                             const EstimatorConfig& cfg, bool exclude_self = false);

// Conditional MI I(X;Y|Z) and its cross variant.
LocalInfoSeries ksg_cmi(const TripleSeries& data, const EstimatorConfig& cfg);
LocalInfoSeries cross_ksg_cmi(const TripleSeries& test, const TripleSeries& reference,
                              const EstimatorConfig& cfg, bool exclude_self = false);

// Cross transfer entropy CI(X_{<t}; Y_t | Y_{<t}) on time-delay embeddings
// with history_len lags; embedding alignment is identical for test and
// reference.
LocalInfoSeries cross_transfer_entropy(const PairedSeries& test,
                                       const PairedSeries& reference,
                                       std::size_t history_len,
                                       const EstimatorConfig& cfg,
                                       bool exclude_self = false);

// Cross active information storage CI(X_{<t}; X_t) on a univariate series.
LocalInfoSeries cross_active_information_storage(const std::vector<double>& test,
                                                 const std::vector<double>& reference,
                                                 std::size_t history_len,
                                                 const EstimatorConfig& cfg,
                                                 bool exclude_self = false);

// Serial brute-force implementations of the same estimators, kept as the
// reference path for testing and benchmarking. Bitwise-identical results.
namespace reference {
LocalInfoSeries ksg_mi(const PairedSeries& data, const EstimatorConfig& cfg);
LocalInfoSeries cross_ksg_mi(const PairedSeries& test, const PairedSeries& reference,
                             const EstimatorConfig& cfg, bool exclude_self = false);
LocalInfoSeries ksg_cmi(const TripleSeries& data, const EstimatorConfig& cfg);
LocalInfoSeries cross_ksg_cmi(const TripleSeries& test, const TripleSeries& reference,
                              const EstimatorConfig& cfg, bool exclude_self = false);
LocalInfoSeries cross_transfer_entropy(const PairedSeries& test,
                                       const PairedSeries& reference,
                                       std::size_t history_len,
                                       const EstimatorConfig& cfg,
                                       bool exclude_self = false);
LocalInfoSeries cross_active_information_storage(const std::vector<double>& test,
                                                 const std::vector<double>& reference,
                                                 std::size_t history_len,
                                                 const EstimatorConfig& cfg,
                                                 bool exclude_self = false);
}  // namespace reference

}  // namespace crossmi
