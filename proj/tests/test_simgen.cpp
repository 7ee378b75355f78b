#include <doctest.h>

#include <cmath>
#include <fstream>

#include "crossmi/error.hpp"
#include "crossmi/estimate.hpp"
#include "crossmi/gaussian.hpp"
#include "crossmi/io_json.hpp"
#include "crossmi/simgen.hpp"
#include "oracles.hpp"

using namespace crossmi;

namespace {

EstimatorConfig ksg_cfg(std::uint64_t seed = 1) {
  EstimatorConfig cfg;
  cfg.k = 4;
  cfg.rng_seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("simgen") {

TEST_CASE("generators are deterministic per seed") {
  const PairedSeries a = gen_linear(100, 0.5, 0.2, 0.1, -1.0, 1.0, 42);
  const PairedSeries b = gen_linear(100, 0.5, 0.2, 0.1, -1.0, 1.0, 42);
  const PairedSeries c = gen_linear(100, 0.5, 0.2, 0.1, -1.0, 1.0, 43);
  CHECK(a.x() == b.x());
  CHECK(a.y() == b.y());
  CHECK(a.x() != c.x());
}

TEST_CASE("noiseless line lies exactly on the line") {
  const PairedSeries s = gen_linear(4, 1.0, 0.0, 0.0, -1.0, 1.0, 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.y()[i] == s.x()[i]);
  }
}

TEST_CASE("noiseless sinusoid satisfies its equation exactly") {
  const PairedSeries s = gen_sinusoidal(50, 1.3, 2.0, 0.0, -3.0, 3.0, 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.y()[i] == 1.3 * std::sin(2.0 * s.x()[i]));
  }
}

TEST_CASE("sinusoid carries positive dependence") {
  const PairedSeries s = gen_sinusoidal(5000, 1.0, 1.5707963267948966, 0.1, -4.0, 4.0, 3);
  CHECK(ksg_mi(s, ksg_cfg(3)).mean > 0.2);
  CHECK(oracles::histogram_mi(s.x(), s.y(), 20) > 0.2);
}

TEST_CASE("linear generator agrees with the histogram oracle") {
  // noise comparable to the 20-bin cell width keeps the plug-in unbiased
  const PairedSeries s = gen_linear(5000, 0.5, 0.0, 0.3, -4.0, 4.0, 33);
  const double hist = oracles::histogram_mi(s.x(), s.y(), 20);
  CHECK(std::fabs(ksg_mi(s, ksg_cfg(33)).mean - hist) < 0.05);
}

TEST_CASE("gaussian cross estimate against a near-independent fit is tiny") {
  const PairedSeries reference = gen_independent(20000, MarginalSpec::normal(0.0, 1.0),
                                                 MarginalSpec::normal(0.0, 1.0), 34);
  const GaussianModel m = gaussian_fit(reference);
  const PairedSeries test = gen_bivariate_normal(500, 0.9, 35);
  CHECK(std::fabs(gaussian_cross_mi(m, test).mean) < 0.01);
}

TEST_CASE("generated moments match their parameters within 4 standard errors") {
  const std::size_t n = 10000;
  const double se_mean_uniform = (2.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
  const PairedSeries u = gen_independent(n, MarginalSpec::uniform(-1.0, 1.0),
                                         MarginalSpec::uniform(-1.0, 1.0), 4);
  CHECK(std::fabs(oracles::mean(u.x())) < 4.0 * se_mean_uniform);
  CHECK(std::fabs(oracles::sample_std(u.x()) - 2.0 / std::sqrt(12.0)) < 0.02);

  const PairedSeries g = gen_independent(n, MarginalSpec::normal(0.5, 2.0),
                                         MarginalSpec::normal(0.0, 1.0), 5);
  CHECK(std::fabs(oracles::mean(g.x()) - 0.5) < 4.0 * 2.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(oracles::sample_std(g.x()) - 2.0) < 0.08);
}

TEST_CASE("ar1 pair has the expected lag-1 autocorrelation") {
  const PairedSeries s = gen_ar1_pair(1000, 0.8, 0.0, 1.0, 6);
  CHECK(std::fabs(oracles::acf(s.x(), 1) - 0.8) < 0.1);
  CHECK(std::fabs(oracles::acf(s.y(), 1) - 0.8) < 0.1);
  CHECK_THROWS_AS(gen_ar1_pair(1000, 1.0, 0.0, 1.0, 6), Error);
  CHECK_THROWS_AS(gen_ar1_pair(5, 0.5, 0.0, 1.0, 6), Error);
}

TEST_CASE("invalid generator inputs") {
  CHECK_THROWS_AS(gen_linear(10, 1.0, 0.0, 0.1, 1.0, -1.0, 7), Error);  // inverted range
  CHECK_THROWS_AS(gen_linear(0, 1.0, 0.0, 0.1, -1.0, 1.0, 7), Error);
  CHECK_THROWS_AS(gen_independent(10, MarginalSpec::normal(0.0, 0.0),
                                  MarginalSpec::normal(0.0, 1.0), 7),
                  Error);
}

TEST_CASE("state switching dataset structure") {
  const ConditionedDataset ds = gen_state_switching(default_state_switching_spec(8));
  CHECK(ds.samples().size() == 1600);
  const auto order = ds.label_order();
  REQUIRE(order.size() == 4);
  CHECK(order[0] == "condition_1");
  CHECK(order[3] == "condition_4");
  for (const auto& label : order) {
    CHECK(ds.condition(label).size() == 400);
    CHECK(ds.weights().at(label) == doctest::Approx(0.25));
  }
}

TEST_CASE("figure 1 probe outcomes for a pinned seed") {
  const StateSwitchingSpec spec = default_state_switching_spec(9);
  const ConditionedDataset ds = gen_state_switching(spec);
  const PairedSeries probe({kProbeX}, {kProbeY});
  EstimatorConfig cfg = ksg_cfg(9);
  cfg.k = kProbeK;
  const double c1 = cross_ksg_mi(probe, ds.condition("condition_1"), cfg).mean;
  const double c2 = cross_ksg_mi(probe, ds.condition("condition_2"), cfg).mean;
  const double c3 = cross_ksg_mi(probe, ds.condition("condition_3"), cfg).mean;
  const double c4 = cross_ksg_mi(probe, ds.condition("condition_4"), cfg).mean;
  CHECK(c1 > 1.0);
  CHECK(std::fabs(c2) < 0.75);
  CHECK(std::fabs(c3) < 0.75);
  CHECK(c4 < -0.8);
}

TEST_CASE("figure 2 regime orderings for a pinned seed") {
  const EstimatorConfig cfg = ksg_cfg(10);
  auto run = [&](const char* id) {
    const FigurePair fp = figure_pair_config(id);
    const PairedSeries reference = gen_from_spec(fp.reference, fp.n_reference, 10);
    const PairedSeries test = gen_from_spec(fp.test, fp.n_test, 11);
    const double i_p = estimate_self_mi(test, cfg).mean;
    const double ci = estimate_cross_mi(test, reference, cfg).mean;
    return std::make_pair(i_p, ci);
  };
  const auto [ip_a, ci_a] = run("fig2a");
  CHECK(ci_a < ip_a);
  const auto [ip_b, ci_b] = run("fig2b");
  CHECK(ci_b > 0.0);
  CHECK(ci_b < ip_b);
  const auto [ip_c, ci_c] = run("fig2c");
  CHECK(ci_c > ip_c);
}

TEST_CASE("scaling experiment") {
  const FigurePair fp = figure_pair_config("fig6");
  const EstimatorConfig cfg = ksg_cfg(12);
  const std::vector<std::size_t> sizes = {50, 100, 200};
  const auto fixed =
      scaling_experiment(fp.reference, fp.test, sizes, false, cfg, 1000, 12);
  REQUIRE(fixed.size() == 3);
  for (const auto& row : fixed) {
    CHECK(std::isfinite(row.i_p));
    CHECK(std::isfinite(row.i_q));
    CHECK(std::isfinite(row.ci_pq));
  }
  // pooling the test data into the reference moves the cross estimate
  const auto pooled =
      scaling_experiment(fp.reference, fp.test, sizes, true, cfg, 1000, 12);
  CHECK(pooled.back().ci_pq > fixed.back().ci_pq);

  CHECK_THROWS_AS(scaling_experiment(fp.reference, fp.test, {4}, false, cfg, 1000, 12),
                  Error);
  CHECK_THROWS_AS(scaling_experiment(fp.reference, fp.test, {}, false, cfg, 1000, 12),
                  Error);
}

TEST_CASE("versioned figure config file matches the compiled defaults") {
  const std::string path = std::string(CROSSMI_SOURCE_DIR) + "/configs/figures.json";
  const nlohmann::json on_disk = read_json_file(path);
  CHECK(on_disk == figure_configs_json());
}

TEST_CASE("condition specs round-trip through json") {
  const StateSwitchingSpec spec = default_state_switching_spec(0);
  for (const auto& cond : spec.conditions) {
    const ConditionSpec back = condition_from_json(condition_json(cond));
    CHECK(condition_json(back) == condition_json(cond));
  }
  const FigurePair fp = figure_pair_config("fig3b");
  CHECK(figure_pair_json(figure_pair_from_json(figure_pair_json(fp))) ==
        figure_pair_json(fp));
}

}  // TEST_SUITE
