#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "crossmi/error.hpp"
#include "crossmi/estimators.hpp"
#include "crossmi/rng.hpp"
#include "crossmi/simgen.hpp"
#include "oracles.hpp"

using namespace crossmi;

namespace {

EstimatorConfig ksg_cfg(std::uint64_t seed = 1, std::size_t k = 4) {
  EstimatorConfig cfg;
  cfg.backend = Backend::Ksg;
  cfg.k = k;
  cfg.rng_seed = seed;
  return cfg;
}

PairedSeries independent_uniforms(std::size_t n, std::uint64_t seed) {
  return gen_independent(n, MarginalSpec::uniform(0.0, 1.0),
                         MarginalSpec::uniform(0.0, 1.0), seed);
}

bool bitwise_equal(const LocalInfoSeries& a, const LocalInfoSeries& b) {
  if (a.locals.size() != b.locals.size()) return false;
  if (a.mean != b.mean) return false;
  for (std::size_t i = 0; i < a.locals.size(); ++i) {
    if (a.locals[i] != b.locals[i]) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("bivariate normal rho=0.6 matches the closed form") {
  const PairedSeries data = gen_bivariate_normal(5000, 0.6, 5);
  const LocalInfoSeries est = ksg_mi(data, ksg_cfg(5));
  CHECK(est.mean > 0.203);
  CHECK(est.mean < 0.243);  // true value 0.2231
  CHECK(est.n_test == 5000);
  CHECK(est.n_reference == 5000);
  CHECK(est.locals.size() == 5000);
  // mean is the arithmetic mean of the locals
  const double check = oracles::mean(est.locals);
  CHECK(std::fabs(est.mean - check) <= 1e-12 * std::fabs(check));
}

TEST_CASE("independent uniforms estimate near zero") {
  const PairedSeries data = independent_uniforms(5000, 7);
  const LocalInfoSeries est = ksg_mi(data, ksg_cfg(7));
  CHECK(std::fabs(est.mean) < 0.02);
}

TEST_CASE("deterministic copy survives via jitter and yields a large estimate") {
  SplitMix64 rng(3);
  std::vector<double> x(1000);
  for (auto& v : x) v = rng.normal();
  const PairedSeries data(x, x);  // y == x exactly
  const LocalInfoSeries est = ksg_mi(data, ksg_cfg(3));
  CHECK(est.mean > 2.0);
}

TEST_CASE("histogram plug-in oracle agrees on N=2000 bivariate normal") {
  const PairedSeries data = gen_bivariate_normal(2000, 0.6, 99);
  const double hist = oracles::histogram_mi(data.x(), data.y(), 20);
  const double ksg = ksg_mi(data, ksg_cfg(99)).mean;
  CHECK(std::fabs(ksg - hist) < 0.05);
}

TEST_CASE("ksg errors: k too large and duplicates without jitter") {
  const PairedSeries tiny({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(ksg_mi(tiny, ksg_cfg(1, 3)), Error);
  // identical points and zero jitter amplitude: zero radius, report index
  std::vector<double> same(50, 1.0);
  EstimatorConfig cfg = ksg_cfg(1);
  cfg.noise_amplitude = 0.0;
  CHECK_THROWS_WITH_AS(ksg_mi(PairedSeries(same, same), cfg),
                       doctest::Contains("index 0"), Error);
}

TEST_CASE("cross MI with self-exclusion equals MI bitwise") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PairedSeries data = gen_bivariate_normal(200 + 37 * seed, 0.4, seed);
    const EstimatorConfig cfg = ksg_cfg(seed);
    CHECK(bitwise_equal(cross_ksg_mi(data, data, cfg, /*exclude_self=*/true),
                        ksg_mi(data, cfg)));
  }
}

TEST_CASE("factorised reference keeps the cross estimate in the noise band") {
  const PairedSeries reference = independent_uniforms(5000, 21);
  const PairedSeries test = gen_linear(500, 0.5, 0.0, 0.1, 0.0, 1.0, 22);
  const LocalInfoSeries est = cross_ksg_mi(test, reference, ksg_cfg(21));
  CHECK(std::fabs(est.mean) < 0.03);
}

TEST_CASE("sinusoidal test against a linear reference is negative") {
  const FigurePair fp = figure_pair_config("fig3b");
  const PairedSeries reference = gen_from_spec(fp.reference, fp.n_reference, 31);
  const PairedSeries test = gen_from_spec(fp.test, fp.n_test, 32);
  const LocalInfoSeries est = cross_ksg_mi(test, reference, ksg_cfg(31));
  CHECK(est.mean < 0.0);  // no clamping of negative values
  CHECK(*std::min_element(est.locals.begin(), est.locals.end()) < 0.0);
}

TEST_CASE("single online test point is accepted") {
  const PairedSeries reference = gen_bivariate_normal(1000, 0.5, 5);
  const PairedSeries probe({0.25}, {0.25});
  const LocalInfoSeries est = cross_ksg_mi(probe, reference, ksg_cfg(5));
  CHECK(est.n_test == 1);
  CHECK(est.locals.size() == 1);
  CHECK(std::isfinite(est.mean));
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
  const PairedSeries a = gen_bivariate_normal(600, 0.6, 12);
  const PairedSeries b = gen_linear(400, 1.0, 0.0, 0.2, -1.0, 1.0, 13);
  const EstimatorConfig cfg = ksg_cfg(12);
  CHECK(bitwise_equal(ksg_mi(a, cfg), reference::ksg_mi(a, cfg)));
  CHECK(bitwise_equal(cross_ksg_mi(b, a, cfg), reference::cross_ksg_mi(b, a, cfg)));

  SplitMix64 rng(44);
  std::vector<double> x(500), y(500), z(500);
  for (std::size_t i = 0; i < 500; ++i) {
    x[i] = rng.normal();
    z[i] = x[i] + 0.5 * rng.normal();
    y[i] = z[i] + 0.5 * rng.normal();
  }
  const TripleSeries t(x, y, z);
  const TripleSeries t2(y, z, x);
  CHECK(bitwise_equal(ksg_cmi(t, cfg), reference::ksg_cmi(t, cfg)));
  CHECK(bitwise_equal(cross_ksg_cmi(t2, t, cfg), reference::cross_ksg_cmi(t2, t, cfg)));
}

TEST_CASE("results do not depend on the number of threads") {
#ifdef _OPENMP
  const PairedSeries data = gen_bivariate_normal(800, 0.6, 17);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const LocalInfoSeries one = ksg_mi(data, ksg_cfg(17));
  omp_set_num_threads(4);
  const LocalInfoSeries four = ksg_mi(data, ksg_cfg(17));
  omp_set_num_threads(saved);
  CHECK(bitwise_equal(one, four));
#endif
}

TEST_CASE("joint order permutation leaves the estimate unchanged") {
  const std::size_t n = 400;
  const PairedSeries data = gen_bivariate_normal(n, 0.6, 23);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(77);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<double> px(n), py(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = data.x()[perm[i]];
    py[i] = data.y()[perm[i]];
  }
  const PairedSeries shuffled(px, py);

  // exact with jitter disabled: locals permute, mean identical
  EstimatorConfig nojitter = ksg_cfg(23);
  nojitter.noise_amplitude = 0.0;
  const LocalInfoSeries base = ksg_mi(data, nojitter);
  const LocalInfoSeries permuted = ksg_mi(shuffled, nojitter);
  double base_sum = 0.0, perm_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(permuted.locals[i] == base.locals[perm[i]]);
    base_sum += base.locals[perm[i]];
    perm_sum += permuted.locals[i];
  }
  CHECK(base_sum == perm_sum);

  // index-keyed jitter perturbs at the jitter scale only
  const double with_jitter_a = ksg_mi(data, ksg_cfg(23)).mean;
  const double with_jitter_b = ksg_mi(shuffled, ksg_cfg(23)).mean;
  CHECK(std::fabs(with_jitter_a - with_jitter_b) < 1e-6);
}

TEST_CASE("conditional MI: independent condition collapses to MI") {
  SplitMix64 rng(50);
  const std::size_t n = 5000;
  std::vector<double> zt(n), zr(n);
  for (auto& v : zt) v = rng.normal();
  for (auto& v : zr) v = rng.normal();
  const PairedSeries test = gen_linear(n, 0.5, 0.0, 0.2, -1.0, 1.0, 51);
  const PairedSeries ref = gen_linear(n, 0.5, 0.0, 0.2, -1.0, 1.0, 52);
  const TripleSeries test3(test.x(), test.y(), zt);
  const TripleSeries ref3(ref.x(), ref.y(), zr);
  const EstimatorConfig cfg = ksg_cfg(50);
  const double cmi = cross_ksg_cmi(test3, ref3, cfg).mean;
  const double mi = cross_ksg_mi(test, ref, cfg).mean;
  CHECK(std::fabs(cmi - mi) < 0.05);
}

TEST_CASE("conditional MI: markov chain gives zero conditional dependence") {
  SplitMix64 rng(60);
  const std::size_t n = 3000;
  std::vector<double> x(n), z(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    z[i] = x[i] + 0.5 * rng.normal();
    y[i] = z[i] + 0.5 * rng.normal();
  }
  const TripleSeries chain(x, y, z);
  CHECK(std::fabs(ksg_cmi(chain, ksg_cfg(60)).mean) < 0.05);
}

TEST_CASE("conditional MI: self-exclusion identity") {
  SplitMix64 rng(70);
  const std::size_t n = 400;
  std::vector<double> x(n), z(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    z[i] = 0.7 * x[i] + rng.normal();
    y[i] = 0.5 * z[i] + rng.normal();
  }
  const TripleSeries t(x, y, z);
  const EstimatorConfig cfg = ksg_cfg(70);
  CHECK(bitwise_equal(cross_ksg_cmi(t, t, cfg, /*exclude_self=*/true), ksg_cmi(t, cfg)));
}

TEST_CASE("transfer entropy behaviour") {
  // y_t = 0.7 x_{t-1} + noise: strong lag-1 coupling from x to y
  auto coupled = [](std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> x(2000), y(2000);
    double xprev = rng.normal();
    for (std::size_t t = 0; t < 2000; ++t) {
      x[t] = rng.normal();
      y[t] = 0.7 * xprev + 0.5 * rng.normal();
      xprev = x[t];
    }
    return PairedSeries(std::move(x), std::move(y));
  };
  const PairedSeries reference = coupled(80);
  const PairedSeries matched = coupled(81);
  const EstimatorConfig cfg = ksg_cfg(80);

  // i.i.d. pairs carry no directed coupling
  const PairedSeries noise_ref = independent_uniforms(2000, 82);
  const PairedSeries noise_test = independent_uniforms(2000, 83);
  CHECK(std::fabs(cross_transfer_entropy(noise_test, noise_ref, 1, cfg).mean) < 0.05);

  // matched coupling agrees with the plain conditional estimate on the reference
  const double cte = cross_transfer_entropy(matched, reference, 1, cfg).mean;
  const auto rx = reference.x();
  const auto ry = reference.y();
  std::vector<double> xprev(rx.begin(), rx.end() - 1);
  std::vector<double> ynow(ry.begin() + 1, ry.end());
  std::vector<double> yprev(ry.begin(), ry.end() - 1);
  const double plain = ksg_cmi(TripleSeries(xprev, ynow, yprev), cfg).mean;
  CHECK(cte > 0.0);
  CHECK(std::fabs(cte - plain) < 0.1);

  // reversing the coupling direction drops the estimate markedly
  const PairedSeries reversed_raw = coupled(84);
  const PairedSeries reversed(reversed_raw.y(), reversed_raw.x());
  const double rev = cross_transfer_entropy(reversed, reference, 1, cfg).mean;
  CHECK(rev < cte - 0.1);

  // series shorter than the embedding
  const PairedSeries shorty({1.0, 2.0}, {3.0, 4.0});
  CHECK_THROWS_AS(cross_transfer_entropy(shorty, reference, 2, cfg), Error);
}

TEST_CASE("active information storage behaviour") {
  auto ar1 = [](double coeff, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> s(1500);
    double v = 0.0;
    for (std::size_t t = 0; t < 1600; ++t) {
      v = coeff * v + rng.normal();
      if (t >= 100) s[t - 100] = v;
    }
    return s;
  };
  const EstimatorConfig cfg = ksg_cfg(90);

  // memoryless process
  SplitMix64 rng(91);
  std::vector<double> iid(1500);
  for (auto& v : iid) v = rng.normal();
  std::vector<double> iid2(1500);
  for (auto& v : iid2) v = rng.normal();
  CHECK(std::fabs(cross_active_information_storage(iid2, iid, 1, cfg).mean) < 0.05);

  // self-exclusion identity against the plain estimate on embedded pairs
  const std::vector<double> s = ar1(0.8, 92);
  const auto self_ais = cross_active_information_storage(s, s, 1, cfg, true);
  std::vector<double> prev(s.begin(), s.end() - 1);
  std::vector<double> cur(s.begin() + 1, s.end());
  const auto plain = ksg_mi(PairedSeries(prev, cur), cfg);
  CHECK(bitwise_equal(self_ais, plain));
  CHECK(self_ais.mean > 0.3);  // AR(1) 0.8 stores ~0.51 nats

  // sign-flipped dynamics expressed against the matched reference fall below
  const std::vector<double> flipped = ar1(-0.8, 93);
  const double matched = cross_active_information_storage(ar1(0.8, 94), s, 1, cfg).mean;
  const double opposed = cross_active_information_storage(flipped, s, 1, cfg).mean;
  CHECK(opposed < matched - 0.3);
}

TEST_CASE("multi-lag embeddings match the serial reference bitwise") {
  // history length 2 exercises the multi-dimensional marginal subspaces
  const PairedSeries reference = gen_ar1_pair(600, 0.6, 0.8, 1.0, 120);
  const PairedSeries test = gen_ar1_pair(400, 0.6, 0.8, 1.0, 121);
  const EstimatorConfig cfg = ksg_cfg(120);
  CHECK(bitwise_equal(cross_transfer_entropy(test, reference, 2, cfg),
                      reference::cross_transfer_entropy(test, reference, 2, cfg)));
  CHECK(bitwise_equal(
      cross_active_information_storage(test.x(), reference.x(), 3, cfg),
      reference::cross_active_information_storage(test.x(), reference.x(), 3, cfg)));
}

TEST_CASE("determinism: same seed, same result") {
  const PairedSeries data = gen_bivariate_normal(500, 0.3, 111);
  CHECK(bitwise_equal(ksg_mi(data, ksg_cfg(111)), ksg_mi(data, ksg_cfg(111))));
}

}  // TEST_SUITE
