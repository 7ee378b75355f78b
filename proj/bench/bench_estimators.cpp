// Benchmark comparing the OpenMP kd-tree kernels against the serial
// brute-force reference implementation, verifying bitwise agreement on the
// way. Run with --full for the larger problem sizes.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "crossmi/estimators.hpp"
#include "crossmi/simgen.hpp"

using namespace crossmi;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
double timed(Fn&& fn, LocalInfoSeries& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = fn();
  return seconds_since(t0);
}

bool bitwise_equal(const LocalInfoSeries& a, const LocalInfoSeries& b) {
  if (a.mean != b.mean || a.locals.size() != b.locals.size()) return false;
  for (std::size_t i = 0; i < a.locals.size(); ++i) {
    if (a.locals[i] != b.locals[i]) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const bool full = argc > 1 && std::strcmp(argv[1], "--full") == 0;
  std::vector<std::size_t> sizes = full ? std::vector<std::size_t>{2000, 5000, 20000}
                                        : std::vector<std::size_t>{500, 2000};
  EstimatorConfig cfg;
  cfg.k = 4;
  cfg.rng_seed = 1;

  int failures = 0;
  std::printf("%-22s %8s %12s %12s %9s\n", "kernel", "n", "parallel[s]", "serial[s]",
              "speedup");
  for (std::size_t n : sizes) {
    const PairedSeries data = gen_bivariate_normal(n, 0.6, 17);
    LocalInfoSeries fast, slow;
    const double t_fast = timed([&] { return ksg_mi(data, cfg); }, fast);
    const double t_slow = timed([&] { return reference::ksg_mi(data, cfg); }, slow);
    if (!bitwise_equal(fast, slow)) {
      std::printf("MISMATCH: ksg_mi n=%zu\n", n);
      ++failures;
    }
    std::printf("%-22s %8zu %12.4f %12.4f %8.1fx\n", "ksg_mi", n, t_fast, t_slow,
                t_slow / t_fast);

    const PairedSeries test = gen_bivariate_normal(n / 2, 0.3, 18);
    const double t_cfast =
        timed([&] { return cross_ksg_mi(test, data, cfg); }, fast);
    const double t_cslow =
        timed([&] { return reference::cross_ksg_mi(test, data, cfg); }, slow);
    if (!bitwise_equal(fast, slow)) {
      std::printf("MISMATCH: cross_ksg_mi n=%zu\n", n);
      ++failures;
    }
    std::printf("%-22s %8zu %12.4f %12.4f %8.1fx\n", "cross_ksg_mi", n, t_cfast, t_cslow,
                t_cslow / t_cfast);
  }
  return failures == 0 ? 0 : 1;
}
