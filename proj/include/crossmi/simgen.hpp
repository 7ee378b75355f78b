#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossmi/dataset.hpp"
#include "crossmi/estimators.hpp"

namespace crossmi {

struct MarginalSpec {
  enum class Kind { Uniform, Normal };
  Kind kind = Kind::Uniform;
  double lo = 0.0, hi = 1.0;      // Uniform
  double mean = 0.0, stddev = 1.0;  // Normal
  static MarginalSpec uniform(double lo, double hi) {
    return MarginalSpec{Kind::Uniform, lo, hi, 0.0, 1.0};
  }
  static MarginalSpec normal(double mean, double stddev) {
    return MarginalSpec{Kind::Normal, 0.0, 1.0, mean, stddev};
  }
};

enum class ConditionKind { Linear, Independent, Sinusoidal };

// One data-generating condition q(x,y|theta). Doubles as a generic
// generator spec for the figure pipelines and the scaling experiment.
struct ConditionSpec {
  ConditionKind kind = ConditionKind::Linear;
  MarginalSpec x = MarginalSpec::uniform(-1.0, 1.0);
  MarginalSpec y = MarginalSpec::uniform(-1.0, 1.0);  // Independent only
  double slope = 1.0, intercept = 0.0;                // Linear
  double amplitude = 1.0, frequency = 1.0, y_offset = 0.0;  // Sinusoidal
  double noise_std = 0.0;
};

struct StateSwitchingSpec {
  std::vector<ConditionSpec> conditions;
  std::size_t samples_per_condition = 400;
  std::uint64_t rng_seed = 0;
};

// --- generators (deterministic per seed) -------------------------------------

PairedSeries gen_linear(std::size_t n, double slope, double intercept, double noise_std,
                        double x_low, double x_high, std::uint64_t seed);

PairedSeries gen_independent(std::size_t n, const MarginalSpec& x_params,
                             const MarginalSpec& y_params, std::uint64_t seed);

PairedSeries gen_sinusoidal(std::size_t n, double amplitude, double frequency,
                            double noise_std, double x_low, double x_high,
                            std::uint64_t seed);

PairedSeries gen_from_spec(const ConditionSpec& spec, std::size_t n, std::uint64_t seed);

// Concatenates per-condition draws in spec order, labelled "condition_1",
// "condition_2", ... Weights default to empirical label frequencies.
ConditionedDataset gen_state_switching(const StateSwitchingSpec& spec);

// Coupled AR(1) pair: x_t = a x_{t-1} + eta, y_t = a y_{t-1} + c x_t + xi.
// A burn-in of 100 samples is discarded.
PairedSeries gen_ar1_pair(std::size_t n, double ar_coeff, double coupling,
                          double noise_std, std::uint64_t seed);

// 2000 bivariate-normal samples helper used by fixtures.
PairedSeries gen_bivariate_normal(std::size_t n, double rho, std::uint64_t seed);

// --- scaling experiment -------------------------------------------------------

struct ScalingRow {
  std::size_t n_test = 0;
  double i_p = 0.0;    // MI of the test data
  double i_q = 0.0;    // MI of the (possibly pooled) reference
  double ci_pq = 0.0;  // cross MI of test against the (possibly pooled) reference
};

// For each test size: draw test data, optionally pool it into the
// reference before estimating q, and record all three measures.
std::vector<ScalingRow> scaling_experiment(const ConditionSpec& reference_spec,
                                           const ConditionSpec& test_spec,
                                           const std::vector<std::size_t>& test_sizes,
                                           bool include_test_in_reference,
                                           const EstimatorConfig& cfg,
                                           std::size_t n_reference, std::uint64_t seed);

// --- pinned figure configurations ---------------------------------------------

// Default state-switching ensemble: four conditions chosen so the probe
// point (0.25, 0.25) has a strongly positive / near-zero / noise-band /
// negative local cross MI respectively.
StateSwitchingSpec default_state_switching_spec(std::uint64_t seed);

constexpr double kProbeX = 0.25;
constexpr double kProbeY = 0.25;

// Neighbour count pinned for single-probe pointwise evaluations: the local
// estimate at one point needs a larger k than the k=4 default used for
// means (the k-NN radius noise scales like 1/sqrt(k)).
constexpr std::size_t kProbeK = 12;

// Per-figure generator configs (matched by configs/figures.json).
struct FigurePair {
  ConditionSpec reference;
  ConditionSpec test;
  std::size_t n_reference = 2000;
  std::size_t n_test = 500;
};

FigurePair figure_pair_config(const std::string& figure_id);  // fig2a/2b/2c/3a/3b/fig6

struct Ar1Config {
  std::size_t n = 100;
  double ar_coeff = 0.8;
  double coupling = 1.5;
  double noise_std = 1.0;
  std::size_t block_len = 5;
  std::size_t n_permutations = 200;
};

Ar1Config figure_ar1_config();  // fig4

std::vector<std::size_t> figure_scaling_sizes();  // fig6 test sizes

}  // namespace crossmi
