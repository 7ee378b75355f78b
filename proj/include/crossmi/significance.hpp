#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crossmi/dataset.hpp"
#include "crossmi/estimators.hpp"
#include "crossmi/rng.hpp"

namespace crossmi {

// Surrogate/permutation configuration. Permutation replicates derive their
// randomness from (rng_seed, replicate index), so results are independent
// of evaluation order and parallelism.
struct BlockSpec {
  std::size_t block_len = 1;
  std::size_t n_permutations = 200;
  std::uint64_t rng_seed = 0;
};

enum class TestKind { MiNonzero, MiDifference, CrossMiNonzero };
enum class ShuffleTarget { Test, Reference, NotApplicable };

struct PermutationTestResult {
  double observed = 0.0;                // nats
  std::vector<double> null_samples;     // length n_permutations
  double p_value = 1.0;                 // (1 + #{|s| >= |observed|}) / (R + 1)
  TestKind test_kind = TestKind::MiNonzero;
  ShuffleTarget shuffle_target = ShuffleTarget::NotApplicable;
  std::size_t block_len = 1;
};

// Partitions the series into consecutive blocks of block_len (final
// partial block kept intact as a shorter block) and permutes block order
// uniformly. Preserves within-block ordering exactly.
std::vector<double> block_shuffle(std::span<const double> series, std::size_t block_len,
                                  SplitMix64& rng);

// Smallest lag at which the sample autocorrelation drops below 1/e, plus
// one; capped at len/4. Throws on constant series.
std::size_t estimate_block_length(std::span<const double> series);

// max of estimate_block_length over x and y
std::size_t auto_block_length(const PairedSeries& data);

// Block length for the sign-flip difference test: twice the larger
// auto_block_length of the two datasets. The pointwise-MI series
// decorrelates more slowly than the raw series (nearest-neighbour
// structure couples nearby timesteps), so the sign-flip exchangeability
// needs longer blocks than the shuffle-based tests.
std::size_t auto_block_length_difference(const PairedSeries& data_a,
                                         const PairedSeries& data_b);

// Is |I| non-zero? Null: block-shuffle x, keep y, re-estimate.
PermutationTestResult test_mi_nonzero(const PairedSeries& data,
                                      const EstimatorConfig& cfg, const BlockSpec& spec);

// Is |I_a - I_b| non-zero? Sign-flip permutation over block-averaged
// pointwise values; system labels reassigned to blocks independently with
// probability equal to the fraction of blocks from each system.
PermutationTestResult test_mi_difference(const PairedSeries& data_a,
                                         const PairedSeries& data_b,
                                         const EstimatorConfig& cfg,
                                         const BlockSpec& spec);

// Is |CI| non-zero? Null: block-shuffle x of the targeted series. Shuffling
// the test side requires test.N >= 2 * block_len; with fewer test samples
// (online data) shuffle the reference instead.
PermutationTestResult test_cross_mi_nonzero(const PairedSeries& test,
                                            const PairedSeries& reference,
                                            ShuffleTarget shuffle_target,
                                            const EstimatorConfig& cfg,
                                            const BlockSpec& spec);

// Ratio of the mean nearest-reference distance of the test points to the
// mean nearest-neighbour distance within the reference (max-norm joint
// space, zero distances to identical points skipped). ~1 means the test
// lies inside the reference support; >> 1 means outside.
double support_diagnostic(const PairedSeries& test, const PairedSeries& reference);

struct SupportReport {
  double ratio = 0.0;
  double mean_test_nn = 0.0;
  double mean_reference_nn = 0.0;
  std::vector<double> test_nn_distances;  // one per test point
};

SupportReport support_report(const PairedSeries& test, const PairedSeries& reference);

}  // namespace crossmi
