#include "crossmi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "crossmi/detail/ksg_core.hpp"
#include "crossmi/digamma.hpp"
#include "crossmi/error.hpp"
#include "crossmi/neighbors.hpp"
#include "crossmi/rng.hpp"

namespace crossmi {

namespace detail {

namespace {

std::vector<double> pack_rows(const std::vector<const std::vector<double>*>& cols,
                              std::size_t n) {
  const std::size_t dim = cols.size();
  std::vector<double> out(n * dim);
  for (std::size_t c = 0; c < dim; ++c) {
    const std::vector<double>& col = *cols[c];
    for (std::size_t i = 0; i < n; ++i) out[i * dim + c] = col[i];
  }
  return out;
}

std::vector<double> column_stddev(const std::vector<const std::vector<double>*>& cols) {
  std::vector<double> out;
  out.reserve(cols.size());
  for (const auto* col : cols) {
    const std::size_t n = col->size();
    if (n < 2) {
      out.push_back(0.0);
      continue;
    }
    double mean = 0.0;
    for (double v : *col) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : *col) ss += (v - mean) * (v - mean);
    out.push_back(std::sqrt(ss / static_cast<double>(n - 1)));
  }
  return out;
}

void apply_jitter(std::vector<double>& pts, std::size_t n, std::size_t dim,
                  std::uint64_t seed, double amplitude,
                  const std::vector<double>& scale) {
  if (amplitude <= 0.0) return;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      if (scale[d] <= 0.0) continue;
      const double u =
          static_cast<double>(hash_mix(seed, i, d) >> 11) * 0x1.0p-53;
      pts[i * dim + d] += amplitude * scale[d] * (2.0 * u - 1.0);
    }
  }
}

}  // namespace

KsgProblem build_problem(const std::vector<const std::vector<double>*>& test_cols,
                         const std::vector<const std::vector<double>*>& ref_cols,
                         const std::vector<std::size_t>& var_dims,
                         bool conditional, const EstimatorConfig& cfg) {
  if (test_cols.size() != ref_cols.size()) {
    throw Error(errc::invalid_input, "test/reference dimensionality mismatch");
  }
  KsgProblem p;
  p.dim = test_cols.size();
  p.n_test = test_cols.front()->size();
  p.n_ref = ref_cols.front()->size();
  for (const auto* c : test_cols) {
    if (c->size() != p.n_test)
      throw Error(errc::invalid_input, "test column length mismatch");
  }
  for (const auto* c : ref_cols) {
    if (c->size() != p.n_ref)
      throw Error(errc::invalid_input, "reference column length mismatch");
  }
  if (p.n_test < 1) throw Error(errc::invalid_input, "empty test set");
  if (cfg.k < 1) throw Error(errc::invalid_input, "k must be >= 1");
  if (cfg.k >= p.n_ref) {
    throw Error(errc::invalid_input,
                "k (" + std::to_string(cfg.k) + ") must be smaller than the reference sample count (" +
                    std::to_string(p.n_ref) + ")");
  }
  if (cfg.noise_amplitude < 0.0) {
    throw Error(errc::invalid_input, "noise_amplitude must be nonnegative");
  }
  p.k = cfg.k;

  p.ref = pack_rows(ref_cols, p.n_ref);
  p.test = pack_rows(test_cols, p.n_test);
  // jitter scale comes from the reference geometry for both sides, so that
  // identical test/reference series stay identical after jitter
  const std::vector<double> scale = column_stddev(ref_cols);
  apply_jitter(p.ref, p.n_ref, p.dim, cfg.rng_seed, cfg.noise_amplitude, scale);
  apply_jitter(p.test, p.n_test, p.dim, cfg.rng_seed, cfg.noise_amplitude, scale);

  auto cols_of = [&](std::size_t var) {
    std::vector<std::uint32_t> cols;
    std::size_t off = 0;
    for (std::size_t v = 0; v < var; ++v) off += var_dims[v];
    for (std::size_t d = 0; d < var_dims[var]; ++d)
      cols.push_back(static_cast<std::uint32_t>(off + d));
    return cols;
  };
  if (!conditional) {
    p.terms.push_back({cols_of(0), -1.0});
    p.terms.push_back({cols_of(1), -1.0});
    p.psi_constant = digamma(static_cast<double>(cfg.k)) +
                     digamma(static_cast<double>(p.n_ref));
  } else {
    auto a = cols_of(0), b = cols_of(1), c = cols_of(2);
    auto ac = a, bc = b;
    ac.insert(ac.end(), c.begin(), c.end());
    bc.insert(bc.end(), c.begin(), c.end());
    p.terms.push_back({c, 1.0});
    p.terms.push_back({ac, -1.0});
    p.terms.push_back({bc, -1.0});
    p.psi_constant = digamma(static_cast<double>(cfg.k));
  }
  return p;
}

std::vector<std::vector<double>> embed_history(const std::vector<double>& series,
                                               std::size_t history_len) {
  if (history_len < 1) {
    throw Error(errc::invalid_input, "history_len must be >= 1");
  }
  if (series.size() <= history_len) {
    throw Error(errc::invalid_input, "series shorter than embedding");
  }
  const std::size_t n = series.size() - history_len;
  std::vector<std::vector<double>> cols(history_len + 1, std::vector<double>(n));
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t now = t + history_len;
    for (std::size_t lag = 1; lag <= history_len; ++lag) {
      cols[lag - 1][t] = series[now - lag];
    }
    cols[history_len][t] = series[now];
  }
  return cols;
}

LocalInfoSeries finish_locals(std::vector<double> locals, const KsgProblem& p,
                              Backend backend) {
  LocalInfoSeries out;
  double sum = 0.0;
  for (double v : locals) sum += v;
  out.mean = sum / static_cast<double>(locals.size());
  out.locals = std::move(locals);
  out.backend = backend;
  out.k = p.k;
  out.n_test = p.n_test;
  out.n_reference = p.n_ref;
  return out;
}

KsgProblem build_te_problem(const PairedSeries& test, const PairedSeries& reference,
                            std::size_t history_len, const EstimatorConfig& cfg) {
  const auto test_x = embed_history(test.x(), history_len);
  const auto test_y = embed_history(test.y(), history_len);
  const auto ref_x = embed_history(reference.x(), history_len);
  const auto ref_y = embed_history(reference.y(), history_len);

  // variables: a = X_{<t} (lags), b = Y_t, c = Y_{<t} (lags)
  std::vector<const std::vector<double>*> tcols, rcols;
  for (std::size_t l = 0; l < history_len; ++l) tcols.push_back(&test_x[l]);
  tcols.push_back(&test_y[history_len]);
  for (std::size_t l = 0; l < history_len; ++l) tcols.push_back(&test_y[l]);
  for (std::size_t l = 0; l < history_len; ++l) rcols.push_back(&ref_x[l]);
  rcols.push_back(&ref_y[history_len]);
  for (std::size_t l = 0; l < history_len; ++l) rcols.push_back(&ref_y[l]);

  return build_problem(tcols, rcols, {history_len, 1, history_len}, true, cfg);
}

KsgProblem build_ais_problem(const std::vector<double>& test,
                             const std::vector<double>& reference,
                             std::size_t history_len, const EstimatorConfig& cfg) {
  const auto test_emb = embed_history(test, history_len);
  const auto ref_emb = embed_history(reference, history_len);

  // variables: a = X_{<t} (lags), b = X_t
  std::vector<const std::vector<double>*> tcols, rcols;
  for (std::size_t l = 0; l < history_len; ++l) tcols.push_back(&test_emb[l]);
  tcols.push_back(&test_emb[history_len]);
  for (std::size_t l = 0; l < history_len; ++l) rcols.push_back(&ref_emb[l]);
  rcols.push_back(&ref_emb[history_len]);

  return build_problem(tcols, rcols, {history_len, 1}, false, cfg);
}

}  // namespace detail

namespace {

using detail::KsgProblem;
using detail::MarginalTerm;

// Strict-radius counting in one subspace of the reference set. One
// dimension uses binary search on a sorted copy; higher dimensions use a
// kd-tree over the gathered columns. Membership is decided by the same
// |a-b| < r arithmetic as a linear scan, so counts match it exactly.
class SubspaceIndex {
 public:
  SubspaceIndex(const std::vector<double>& joint, std::size_t n, std::size_t joint_dim,
                std::vector<std::uint32_t> cols)
      : cols_(std::move(cols)), n_(n) {
    const std::size_t sd = cols_.size();
    rows_.resize(n * sd);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < sd; ++c) {
        rows_[i * sd + c] = joint[i * joint_dim + cols_[c]];
      }
    }
    if (sd == 1) {
      sorted_ = rows_;
      std::sort(sorted_.begin(), sorted_.end());
    } else {
      tree_ = std::make_unique<KdTree>(rows_.data(), n, sd);
    }
  }

  std::size_t sub_dim() const { return cols_.size(); }

  void gather_query(const double* joint_q, double* out) const {
    for (std::size_t c = 0; c < cols_.size(); ++c) out[c] = joint_q[cols_[c]];
  }

  std::size_t count_strict(const double* sub_q, double radius,
                           std::ptrdiff_t exclude) const {
    const std::size_t sd = cols_.size();
    std::size_t count;
    if (sd == 1) {
      const double v = sub_q[0];
      // |e - v| < radius is monotone along the sorted values on each side
      // of v, so both boundaries are binary-searchable
      auto first = std::partition_point(
          sorted_.begin(), sorted_.end(),
          [&](double e) { return e < v && !(std::fabs(e - v) < radius); });
      auto last = std::partition_point(
          first, sorted_.end(),
          [&](double e) { return e < v || std::fabs(e - v) < radius; });
      count = static_cast<std::size_t>(last - first);
    } else {
      count = tree_->count_within(sub_q, radius);
    }
    if (exclude >= 0 &&
        chebyshev(rows_.data() + static_cast<std::size_t>(exclude) * sd, sub_q, sd) <
            radius) {
      --count;
    }
    return count;
  }

 private:
  std::vector<std::uint32_t> cols_;
  std::size_t n_;
  std::vector<double> rows_;    // gathered, original order
  std::vector<double> sorted_;  // 1-D fast path
  std::unique_ptr<KdTree> tree_;
};

LocalInfoSeries solve_parallel(const KsgProblem& p, bool exclude_self) {
  if (exclude_self && p.n_test != p.n_ref) {
    throw Error(errc::invalid_input,
                "self-exclusion assumes test and reference are the same samples");
  }
  const KdTree joint(p.ref.data(), p.n_ref, p.dim);
  std::vector<SubspaceIndex> subs;
  subs.reserve(p.terms.size());
  for (const auto& term : p.terms) {
    subs.emplace_back(p.ref, p.n_ref, p.dim, term.cols);
  }

  std::vector<double> locals(p.n_test, 0.0);
  std::int64_t first_bad = -1;

#pragma omp parallel
  {
    std::vector<double> sub_q(p.dim);
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(p.n_test); ++t) {
      const double* q = p.test.data() + static_cast<std::size_t>(t) * p.dim;
      const std::ptrdiff_t excl = exclude_self ? t : -1;
      const double eps = joint.kth_distance(q, p.k, excl);
      if (!(eps > 0.0)) {
#pragma omp critical
        {
          if (first_bad < 0 || t < first_bad) first_bad = t;
        }
        continue;
      }
      double local = p.psi_constant;
      for (std::size_t j = 0; j < subs.size(); ++j) {
        subs[j].gather_query(q, sub_q.data());
        const std::size_t c = subs[j].count_strict(sub_q.data(), eps, excl);
        local += p.terms[j].sign * digamma(static_cast<double>(c + 1));
      }
      locals[static_cast<std::size_t>(t)] = local;
    }
  }
  if (first_bad >= 0) {
    throw Error(errc::degenerate_data,
                "duplicate points: zero k-NN radius at test index " +
                    std::to_string(first_bad) +
                    " (increase noise_amplitude)");
  }
  return detail::finish_locals(std::move(locals), p, Backend::Ksg);
}

std::vector<const std::vector<double>*> pair_cols(const PairedSeries& s) {
  return {&s.x(), &s.y()};
}

std::vector<const std::vector<double>*> triple_cols(const TripleSeries& s) {
  return {&s.x(), &s.y(), &s.z()};
}

}  // namespace

LocalInfoSeries ksg_mi(const PairedSeries& data, const EstimatorConfig& cfg) {
  auto p = detail::build_problem(pair_cols(data), pair_cols(data), {1, 1}, false, cfg);
  return solve_parallel(p, true);
}

LocalInfoSeries cross_ksg_mi(const PairedSeries& test, const PairedSeries& reference,
                             const EstimatorConfig& cfg, bool exclude_self) {
  auto p = detail::build_problem(pair_cols(test), pair_cols(reference), {1, 1}, false, cfg);
  return solve_parallel(p, exclude_self);
}

LocalInfoSeries ksg_cmi(const TripleSeries& data, const EstimatorConfig& cfg) {
  auto p = detail::build_problem(triple_cols(data), triple_cols(data), {1, 1, 1}, true, cfg);
  return solve_parallel(p, true);
}

LocalInfoSeries cross_ksg_cmi(const TripleSeries& test, const TripleSeries& reference,
                              const EstimatorConfig& cfg, bool exclude_self) {
  auto p = detail::build_problem(triple_cols(test), triple_cols(reference), {1, 1, 1},
                                 true, cfg);
  return solve_parallel(p, exclude_self);
}

LocalInfoSeries cross_transfer_entropy(const PairedSeries& test,
                                       const PairedSeries& reference,
                                       std::size_t history_len,
                                       const EstimatorConfig& cfg, bool exclude_self) {
  auto p = detail::build_te_problem(test, reference, history_len, cfg);
  return solve_parallel(p, exclude_self);
}

LocalInfoSeries cross_active_information_storage(const std::vector<double>& test,
                                                 const std::vector<double>& reference,
                                                 std::size_t history_len,
                                                 const EstimatorConfig& cfg,
                                                 bool exclude_self) {
  auto p = detail::build_ais_problem(test, reference, history_len, cfg);
  return solve_parallel(p, exclude_self);
}

}  // namespace crossmi
