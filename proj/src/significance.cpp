#include "crossmi/significance.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "crossmi/error.hpp"
#include "crossmi/estimate.hpp"
#include "crossmi/neighbors.hpp"

namespace crossmi {

std::vector<double> block_shuffle(std::span<const double> series, std::size_t block_len,
                                  SplitMix64& rng) {
  const std::size_t n = series.size();
  if (block_len < 1 || block_len > n) {
    throw Error(errc::invalid_input, "block_len must be in [1, series length]");
  }
  const std::size_t n_blocks = (n + block_len - 1) / block_len;
  std::vector<std::size_t> order(n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) order[i] = i;
  // Fisher-Yates
  for (std::size_t i = n_blocks; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b : order) {
    const std::size_t begin = b * block_len;
    const std::size_t end = std::min(begin + block_len, n);
    out.insert(out.end(), series.begin() + static_cast<std::ptrdiff_t>(begin),
               series.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

std::size_t estimate_block_length(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) {
    throw Error(errc::invalid_input, "estimate_block_length requires at least 4 samples");
  }
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  if (!(denom > 0.0)) {
    throw Error(errc::degenerate_data, "estimate_block_length: constant series");
  }
  const std::size_t cap = std::max<std::size_t>(1, n / 4);
  const double threshold = std::exp(-1.0);
  for (std::size_t lag = 1; lag <= cap; ++lag) {
    double num = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      num += (series[t] - mean) * (series[t + lag] - mean);
    }
    if (num / denom < threshold) {
      return std::min(lag + 1, cap);
    }
  }
  return cap;
}

std::size_t auto_block_length(const PairedSeries& data) {
  return std::max(estimate_block_length(data.x()), estimate_block_length(data.y()));
}

std::size_t auto_block_length_difference(const PairedSeries& data_a,
                                         const PairedSeries& data_b) {
  const std::size_t base = std::max(auto_block_length(data_a), auto_block_length(data_b));
  return std::min(2 * base, std::min(data_a.size(), data_b.size()));
}

namespace {

double two_sided_p(double observed, const std::vector<double>& nulls) {
  std::size_t at_least = 0;
  const double mag = std::fabs(observed);
  for (double s : nulls) {
    if (std::fabs(s) >= mag) ++at_least;
  }
  return static_cast<double>(1 + at_least) / static_cast<double>(nulls.size() + 1);
}

// Runs one replicate function per permutation, each seeded from
// (spec.rng_seed, replicate index). Exceptions from worker threads are
// rethrown after the loop.
template <typename Fn>
std::vector<double> run_replicates(const BlockSpec& spec, Fn&& replicate) {
  std::vector<double> nulls(spec.n_permutations, 0.0);
  std::exception_ptr failure = nullptr;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(spec.n_permutations); ++r) {
    try {
      SplitMix64 rng(hash_mix(spec.rng_seed, static_cast<std::uint64_t>(r) + 1));
      nulls[static_cast<std::size_t>(r)] = replicate(rng);
    } catch (...) {
#pragma omp critical
      {
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return nulls;
}

std::vector<double> block_means(const std::vector<double>& values, std::size_t block_len) {
  const std::size_t n = values.size();
  const std::size_t n_blocks = (n + block_len - 1) / block_len;
  std::vector<double> means(n_blocks, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t begin = b * block_len;
    const std::size_t end = std::min(begin + block_len, n);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    means[b] = s / static_cast<double>(end - begin);
  }
  return means;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s / static_cast<double>(v.size());
}

}  // namespace

PermutationTestResult test_mi_nonzero(const PairedSeries& data,
                                      const EstimatorConfig& cfg, const BlockSpec& spec) {
  if (spec.block_len > data.size()) {
    throw Error(errc::invalid_input, "block_len exceeds series length");
  }
  if (spec.n_permutations < 1) {
    throw Error(errc::invalid_input, "n_permutations must be >= 1");
  }
  PermutationTestResult result;
  result.test_kind = TestKind::MiNonzero;
  result.shuffle_target = ShuffleTarget::NotApplicable;
  result.block_len = spec.block_len;
  result.observed = estimate_self_mi(data, cfg).mean;
  result.null_samples = run_replicates(spec, [&](SplitMix64& rng) {
    std::vector<double> sx = block_shuffle(data.x(), spec.block_len, rng);
    return estimate_self_mi(PairedSeries(std::move(sx), data.y()), cfg).mean;
  });
  result.p_value = two_sided_p(result.observed, result.null_samples);
  return result;
}

PermutationTestResult test_mi_difference(const PairedSeries& data_a,
                                         const PairedSeries& data_b,
                                         const EstimatorConfig& cfg,
                                         const BlockSpec& spec) {
  if (spec.block_len > data_a.size() || spec.block_len > data_b.size()) {
    throw Error(errc::invalid_input, "block_len exceeds series length");
  }
  const std::vector<double> blocks_a =
      block_means(estimate_self_mi(data_a, cfg).locals, spec.block_len);
  const std::vector<double> blocks_b =
      block_means(estimate_self_mi(data_b, cfg).locals, spec.block_len);
  const std::size_t na = blocks_a.size(), nb = blocks_b.size();
  if (na + nb < 2) {
    throw Error(errc::invalid_input, "sign-flip test needs at least 2 blocks");
  }

  PermutationTestResult result;
  result.test_kind = TestKind::MiDifference;
  result.shuffle_target = ShuffleTarget::NotApplicable;
  result.block_len = spec.block_len;
  result.observed = mean_of(blocks_a) - mean_of(blocks_b);

  std::vector<double> combined = blocks_a;
  combined.insert(combined.end(), blocks_b.begin(), blocks_b.end());
  const double frac_a = static_cast<double>(na) / static_cast<double>(na + nb);

  result.null_samples = run_replicates(spec, [&](SplitMix64& rng) {
    // reassign system labels per block; redraw if a group comes up empty
    while (true) {
      double sum_a = 0.0, sum_b = 0.0;
      std::size_t count_a = 0, count_b = 0;
      for (double block : combined) {
        if (rng.uniform01() < frac_a) {
          sum_a += block;
          ++count_a;
        } else {
          sum_b += block;
          ++count_b;
        }
      }
      if (count_a == 0 || count_b == 0) continue;
      return sum_a / static_cast<double>(count_a) - sum_b / static_cast<double>(count_b);
    }
  });
  result.p_value = two_sided_p(result.observed, result.null_samples);
  return result;
}

PermutationTestResult test_cross_mi_nonzero(const PairedSeries& test,
                                            const PairedSeries& reference,
                                            ShuffleTarget shuffle_target,
                                            const EstimatorConfig& cfg,
                                            const BlockSpec& spec) {
  if (shuffle_target == ShuffleTarget::NotApplicable) {
    throw Error(errc::invalid_input, "shuffle_target must be TEST or REFERENCE");
  }
  if (shuffle_target == ShuffleTarget::Test && test.size() < 2 * spec.block_len) {
    throw Error(errc::invalid_input,
                "too few test samples to block-shuffle the test series; use "
                "shuffle_target=REFERENCE");
  }
  PermutationTestResult result;
  result.test_kind = TestKind::CrossMiNonzero;
  result.shuffle_target = shuffle_target;
  result.block_len = spec.block_len;
  result.observed = estimate_cross_mi(test, reference, cfg).mean;

  result.null_samples = run_replicates(spec, [&](SplitMix64& rng) {
    if (shuffle_target == ShuffleTarget::Test) {
      std::vector<double> sx = block_shuffle(test.x(), spec.block_len, rng);
      return estimate_cross_mi(PairedSeries(std::move(sx), test.y()), reference, cfg)
          .mean;
    }
    std::vector<double> sx = block_shuffle(reference.x(), spec.block_len, rng);
    return estimate_cross_mi(test, PairedSeries(std::move(sx), reference.y()), cfg)
        .mean;
  });
  result.p_value = two_sided_p(result.observed, result.null_samples);
  return result;
}

namespace {

std::vector<double> pack_joint(const PairedSeries& s) {
  std::vector<double> pts(2 * s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    pts[2 * i] = s.x()[i];
    pts[2 * i + 1] = s.y()[i];
  }
  return pts;
}

// smallest strictly positive max-norm distance from q to the points,
// optionally skipping one index; 0.0 when every point coincides with q
double nearest_positive(const std::vector<double>& pts, std::size_t n, const double* q,
                        std::ptrdiff_t exclude) {
  double best = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<std::ptrdiff_t>(i) == exclude) continue;
    const double d = chebyshev(pts.data() + 2 * i, q, 2);
    if (d > 0.0 && (!found || d < best)) {
      best = d;
      found = true;
    }
  }
  return found ? best : 0.0;
}

}  // namespace

SupportReport support_report(const PairedSeries& test, const PairedSeries& reference) {
  if (reference.size() < 2) {
    throw Error(errc::invalid_input, "support diagnostic requires at least 2 reference samples");
  }
  const std::vector<double> ref_pts = pack_joint(reference);
  const std::vector<double> test_pts = pack_joint(test);

  SupportReport report;
  report.test_nn_distances.resize(test.size());
  std::vector<double> ref_nn(reference.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(test.size()); ++t) {
    report.test_nn_distances[static_cast<std::size_t>(t)] =
        nearest_positive(ref_pts, reference.size(),
                         test_pts.data() + 2 * static_cast<std::size_t>(t), -1);
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(reference.size()); ++i) {
    ref_nn[static_cast<std::size_t>(i)] =
        nearest_positive(ref_pts, reference.size(),
                         ref_pts.data() + 2 * static_cast<std::size_t>(i), i);
  }
  // serial sums keep the result independent of thread count
  report.mean_test_nn = mean_of(report.test_nn_distances);
  report.mean_reference_nn = mean_of(ref_nn);
  if (!(report.mean_reference_nn > 0.0)) {
    throw Error(errc::degenerate_data, "support diagnostic: degenerate reference spacing");
  }
  report.ratio = report.mean_test_nn / report.mean_reference_nn;
  return report;
}

double support_diagnostic(const PairedSeries& test, const PairedSeries& reference) {
  return support_report(test, reference).ratio;
}

}  // namespace crossmi
