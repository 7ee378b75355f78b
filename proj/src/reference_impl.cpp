// Plain serial implementations of the KSG estimators, using linear scans
// for every neighbour query. Kept as the trusted reference path: the unit
// tests require the parallel kd-tree kernels to match these bit-for-bit,
// and the benchmark target compares their runtimes.

#include <string>
#include <vector>

#include "crossmi/detail/ksg_core.hpp"
#include "crossmi/digamma.hpp"
#include "crossmi/error.hpp"
#include "crossmi/estimators.hpp"
#include "crossmi/neighbors.hpp"

namespace crossmi::reference {

namespace {

using detail::KsgProblem;

double sub_distance(const double* a, const double* b,
                    const std::vector<std::uint32_t>& cols) {
  double m = 0.0;
  for (std::uint32_t c : cols) {
    double diff = a[c] - b[c];
    if (diff < 0.0) diff = -diff;
    if (diff > m) m = diff;
  }
  return m;
}

LocalInfoSeries solve_serial(const KsgProblem& p, bool exclude_self) {
  if (exclude_self && p.n_test != p.n_ref) {
    throw Error(errc::invalid_input,
                "self-exclusion assumes test and reference are the same samples");
  }
  std::vector<double> locals(p.n_test, 0.0);
  for (std::size_t t = 0; t < p.n_test; ++t) {
    const double* q = p.test.data() + t * p.dim;
    const std::ptrdiff_t excl = exclude_self ? static_cast<std::ptrdiff_t>(t) : -1;
    const double eps =
        brute_kth_distance(p.ref.data(), p.n_ref, p.dim, q, p.k, excl);
    if (!(eps > 0.0)) {
      throw Error(errc::degenerate_data,
                  "duplicate points: zero k-NN radius at test index " +
                      std::to_string(t) + " (increase noise_amplitude)");
    }
    double local = p.psi_constant;
    for (const auto& term : p.terms) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < p.n_ref; ++i) {
        if (static_cast<std::ptrdiff_t>(i) == excl) continue;
        if (sub_distance(p.ref.data() + i * p.dim, q, term.cols) < eps) ++count;
      }
      local += term.sign * digamma(static_cast<double>(count + 1));
    }
    locals[t] = local;
  }
  return detail::finish_locals(std::move(locals), p, Backend::Ksg);
}

}  // namespace

LocalInfoSeries ksg_mi(const PairedSeries& data, const EstimatorConfig& cfg) {
  auto p = detail::build_problem({&data.x(), &data.y()}, {&data.x(), &data.y()},
                                 {1, 1}, false, cfg);
  return solve_serial(p, true);
}

LocalInfoSeries cross_ksg_mi(const PairedSeries& test, const PairedSeries& ref,
                             const EstimatorConfig& cfg, bool exclude_self) {
  auto p = detail::build_problem({&test.x(), &test.y()}, {&ref.x(), &ref.y()},
                                 {1, 1}, false, cfg);
  return solve_serial(p, exclude_self);
}

LocalInfoSeries ksg_cmi(const TripleSeries& data, const EstimatorConfig& cfg) {
  auto p = detail::build_problem({&data.x(), &data.y(), &data.z()},
                                 {&data.x(), &data.y(), &data.z()}, {1, 1, 1}, true,
                                 cfg);
  return solve_serial(p, true);
}

LocalInfoSeries cross_ksg_cmi(const TripleSeries& test, const TripleSeries& ref,
                              const EstimatorConfig& cfg, bool exclude_self) {
  auto p = detail::build_problem({&test.x(), &test.y(), &test.z()},
                                 {&ref.x(), &ref.y(), &ref.z()}, {1, 1, 1}, true, cfg);
  return solve_serial(p, exclude_self);
}

LocalInfoSeries cross_transfer_entropy(const PairedSeries& test,
                                       const PairedSeries& reference,
                                       std::size_t history_len,
                                       const EstimatorConfig& cfg, bool exclude_self) {
  auto p = detail::build_te_problem(test, reference, history_len, cfg);
  return solve_serial(p, exclude_self);
}

LocalInfoSeries cross_active_information_storage(const std::vector<double>& test,
                                                 const std::vector<double>& reference,
                                                 std::size_t history_len,
                                                 const EstimatorConfig& cfg,
                                                 bool exclude_self) {
  auto p = detail::build_ais_problem(test, reference, history_len, cfg);
  return solve_serial(p, exclude_self);
}

}  // namespace crossmi::reference
