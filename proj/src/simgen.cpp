#include "crossmi/simgen.hpp"

#include <cmath>

#include "crossmi/error.hpp"
#include "crossmi/estimate.hpp"
#include "crossmi/rng.hpp"

namespace crossmi {

namespace {

double draw_marginal(const MarginalSpec& spec, SplitMix64& rng) {
  if (spec.kind == MarginalSpec::Kind::Uniform) {
    return rng.uniform(spec.lo, spec.hi);
  }
  return rng.normal(spec.mean, spec.stddev);
}

void check_marginal(const MarginalSpec& spec) {
  if (spec.kind == MarginalSpec::Kind::Uniform && !(spec.lo < spec.hi)) {
    throw Error(errc::invalid_input, "uniform marginal range is empty or inverted");
  }
  if (spec.kind == MarginalSpec::Kind::Normal && !(spec.stddev > 0.0)) {
    throw Error(errc::invalid_input, "normal marginal needs positive stddev");
  }
}

}  // namespace

PairedSeries gen_linear(std::size_t n, double slope, double intercept, double noise_std,
                        double x_low, double x_high, std::uint64_t seed) {
  ConditionSpec spec;
  spec.kind = ConditionKind::Linear;
  spec.x = MarginalSpec::uniform(x_low, x_high);
  spec.slope = slope;
  spec.intercept = intercept;
  spec.noise_std = noise_std;
  return gen_from_spec(spec, n, seed);
}

PairedSeries gen_independent(std::size_t n, const MarginalSpec& x_params,
                             const MarginalSpec& y_params, std::uint64_t seed) {
  ConditionSpec spec;
  spec.kind = ConditionKind::Independent;
  spec.x = x_params;
  spec.y = y_params;
  return gen_from_spec(spec, n, seed);
}

PairedSeries gen_sinusoidal(std::size_t n, double amplitude, double frequency,
                            double noise_std, double x_low, double x_high,
                            std::uint64_t seed) {
  ConditionSpec spec;
  spec.kind = ConditionKind::Sinusoidal;
  spec.x = MarginalSpec::uniform(x_low, x_high);
  spec.amplitude = amplitude;
  spec.frequency = frequency;
  spec.noise_std = noise_std;
  return gen_from_spec(spec, n, seed);
}

PairedSeries gen_from_spec(const ConditionSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(errc::invalid_input, "generator needs n >= 1");
  if (spec.noise_std < 0.0) throw Error(errc::invalid_input, "noise_std must be >= 0");
  check_marginal(spec.x);
  if (spec.kind == ConditionKind::Independent) check_marginal(spec.y);
  if (spec.kind == ConditionKind::Linear && !std::isfinite(spec.slope)) {
    throw Error(errc::invalid_input, "linear condition needs a finite slope");
  }

  SplitMix64 rng(seed);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw_marginal(spec.x, rng);
    double y = 0.0;
    switch (spec.kind) {
      case ConditionKind::Linear:
        y = spec.slope * x + spec.intercept;
        break;
      case ConditionKind::Independent:
        y = draw_marginal(spec.y, rng) + spec.y_offset;
        break;
      case ConditionKind::Sinusoidal:
        y = spec.amplitude * std::sin(spec.frequency * x) + spec.y_offset;
        break;
    }
    if (spec.kind != ConditionKind::Independent && spec.noise_std > 0.0) {
      y += rng.normal(0.0, spec.noise_std);
    }
    xs[i] = x;
    ys[i] = y;
  }
  return PairedSeries(std::move(xs), std::move(ys));
}

ConditionedDataset gen_state_switching(const StateSwitchingSpec& spec) {
  if (spec.conditions.empty()) {
    throw Error(errc::invalid_input, "state switching needs at least one condition");
  }
  if (spec.samples_per_condition < 1) {
    throw Error(errc::invalid_input, "samples_per_condition must be >= 1");
  }
  std::vector<double> xs, ys;
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
    const PairedSeries part = gen_from_spec(spec.conditions[c], spec.samples_per_condition,
                                            hash_mix(spec.rng_seed, c + 1));
    xs.insert(xs.end(), part.x().begin(), part.x().end());
    ys.insert(ys.end(), part.y().begin(), part.y().end());
    const std::string label = "condition_" + std::to_string(c + 1);
    labels.insert(labels.end(), spec.samples_per_condition, label);
  }
  return ConditionedDataset(PairedSeries(std::move(xs), std::move(ys)), std::move(labels));
}

PairedSeries gen_ar1_pair(std::size_t n, double ar_coeff, double coupling,
                          double noise_std, std::uint64_t seed) {
  if (!(std::fabs(ar_coeff) < 1.0)) {
    throw Error(errc::invalid_input, "AR(1) coefficient must satisfy |a| < 1");
  }
  if (n < 10) throw Error(errc::invalid_input, "gen_ar1_pair needs n >= 10");
  if (!(noise_std > 0.0)) throw Error(errc::invalid_input, "noise_std must be > 0");
  constexpr std::size_t kBurnIn = 100;
  SplitMix64 rng(seed);
  std::vector<double> xs(n), ys(n);
  double x = 0.0, y = 0.0;
  for (std::size_t t = 0; t < kBurnIn + n; ++t) {
    x = ar_coeff * x + rng.normal(0.0, noise_std);
    y = ar_coeff * y + coupling * x + rng.normal(0.0, noise_std);
    if (t >= kBurnIn) {
      xs[t - kBurnIn] = x;
      ys[t - kBurnIn] = y;
    }
  }
  return PairedSeries(std::move(xs), std::move(ys));
}

PairedSeries gen_bivariate_normal(std::size_t n, double rho, std::uint64_t seed) {
  if (!(std::fabs(rho) < 1.0)) {
    throw Error(errc::invalid_input, "correlation must satisfy |rho| < 1");
  }
  SplitMix64 rng(seed);
  std::vector<double> xs(n), ys(n);
  const double tail = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal();
    const double b = rng.normal();
    xs[i] = a;
    ys[i] = rho * a + tail * b;
  }
  return PairedSeries(std::move(xs), std::move(ys));
}

std::vector<ScalingRow> scaling_experiment(const ConditionSpec& reference_spec,
                                           const ConditionSpec& test_spec,
                                           const std::vector<std::size_t>& test_sizes,
                                           bool include_test_in_reference,
                                           const EstimatorConfig& cfg,
                                           std::size_t n_reference, std::uint64_t seed) {
  if (test_sizes.empty()) {
    throw Error(errc::invalid_input, "scaling experiment needs at least one test size");
  }
  for (std::size_t sz : test_sizes) {
    if (sz < cfg.k + 1) {
      throw Error(errc::invalid_input,
                  "test size " + std::to_string(sz) + " must be at least k+1");
    }
  }
  const PairedSeries reference =
      gen_from_spec(reference_spec, n_reference, hash_mix(seed, 0));
  std::vector<ScalingRow> rows;
  rows.reserve(test_sizes.size());
  for (std::size_t cell = 0; cell < test_sizes.size(); ++cell) {
    const std::size_t n_test = test_sizes[cell];
    const PairedSeries test = gen_from_spec(test_spec, n_test, hash_mix(seed, cell + 1));
    ScalingRow row;
    row.n_test = n_test;
    row.i_p = estimate_self_mi(test, cfg).mean;
    if (include_test_in_reference) {
      std::vector<double> xs = reference.x(), ys = reference.y();
      xs.insert(xs.end(), test.x().begin(), test.x().end());
      ys.insert(ys.end(), test.y().begin(), test.y().end());
      const PairedSeries pooled(std::move(xs), std::move(ys));
      row.i_q = estimate_self_mi(pooled, cfg).mean;
      row.ci_pq = estimate_cross_mi(test, pooled, cfg).mean;
    } else {
      row.i_q = estimate_self_mi(reference, cfg).mean;
      row.ci_pq = estimate_cross_mi(test, reference, cfg).mean;
    }
    rows.push_back(row);
  }
  return rows;
}

// --- pinned figure configurations ---------------------------------------------

StateSwitchingSpec default_state_switching_spec(std::uint64_t seed) {
  StateSwitchingSpec spec;
  spec.samples_per_condition = 400;
  spec.rng_seed = seed;

  // The four conditions individually produce the probe outcomes (strongly
  // positive / near zero / noise band / negative), and are balanced so that
  // the pooled joint density at the probe roughly matches the pooled
  // marginal product: conditions 3 and 4 supply marginal mass at the probe
  // coordinates without joint mass, offsetting condition 1's on-line peak.

  // 1: zero-centered positive-slope line; the probe sits on the trendline
  ConditionSpec c1;
  c1.kind = ConditionKind::Linear;
  c1.x = MarginalSpec::uniform(-1.0, 1.0);
  c1.slope = 1.0;
  c1.intercept = 0.0;
  c1.noise_std = 0.1;

  // 2: offset line; the probe lies near the middle of both marginals but
  // far enough off the trendline that the pointwise value cancels to ~0
  ConditionSpec c2;
  c2.kind = ConditionKind::Linear;
  c2.x = MarginalSpec::normal(0.25, 0.4);
  c2.slope = 1.0;
  c2.intercept = 0.38;
  c2.noise_std = 0.3;

  // 3: independent x and y centred near the probe
  ConditionSpec c3;
  c3.kind = ConditionKind::Independent;
  c3.x = MarginalSpec::normal(0.25, 0.55);
  c3.y = MarginalSpec::normal(0.25, 0.26);

  // 4: offset negative-slope line; the probe is jointly atypical while
  // remaining typical under both marginals
  ConditionSpec c4;
  c4.kind = ConditionKind::Linear;
  c4.x = MarginalSpec::normal(0.25, 0.35);
  c4.slope = -1.0;
  c4.intercept = -0.05;
  c4.noise_std = 0.05;

  spec.conditions = {c1, c2, c3, c4};
  return spec;
}

FigurePair figure_pair_config(const std::string& figure_id) {
  FigurePair fp;
  // shared default test set: a conditioned-subrange linear relationship
  ConditionSpec test_line;
  test_line.kind = ConditionKind::Linear;
  test_line.x = MarginalSpec::uniform(0.0, 2.0);
  test_line.slope = 0.5;
  test_line.intercept = 0.0;
  test_line.noise_std = 0.1;

  if (figure_id == "fig2a") {
    fp.test = test_line;
    fp.reference.kind = ConditionKind::Independent;
    fp.reference.x = MarginalSpec::uniform(0.0, 2.0);
    fp.reference.y = MarginalSpec::uniform(-0.25, 1.25);
    return fp;
  }
  if (figure_id == "fig2b") {
    fp.test = test_line;
    fp.reference = test_line;
    fp.reference.noise_std = 0.4;
    return fp;
  }
  if (figure_id == "fig2c") {
    fp.test = test_line;
    fp.reference = test_line;
    fp.reference.x = MarginalSpec::uniform(-4.0, 4.0);
    return fp;
  }
  if (figure_id == "fig3a") {
    fp.reference.kind = ConditionKind::Linear;
    fp.reference.x = MarginalSpec::normal(0.0, 1.0);
    fp.reference.slope = 0.5;
    fp.reference.noise_std = 0.3;
    fp.test = fp.reference;
    fp.test.x = MarginalSpec::uniform(3.0, 4.0);  // beyond the bulk of the reference
    return fp;
  }
  if (figure_id == "fig3b") {
    fp.reference.kind = ConditionKind::Linear;
    fp.reference.x = MarginalSpec::uniform(-4.0, 4.0);
    fp.reference.slope = 0.5;
    fp.reference.noise_std = 0.2;
    fp.test.kind = ConditionKind::Sinusoidal;
    fp.test.x = MarginalSpec::uniform(-4.0, 4.0);
    fp.test.amplitude = 1.0;
    fp.test.frequency = 1.5707963267948966;  // pi/2
    fp.test.noise_std = 0.1;
    return fp;
  }
  if (figure_id == "fig6") {
    fp.reference.kind = ConditionKind::Linear;
    fp.reference.x = MarginalSpec::uniform(-2.0, 2.0);
    fp.reference.slope = 0.5;
    fp.reference.noise_std = 0.1;
    fp.test.kind = ConditionKind::Sinusoidal;
    fp.test.x = MarginalSpec::uniform(-2.0, 2.0);
    fp.test.amplitude = 1.0;
    fp.test.frequency = 1.5707963267948966;
    fp.test.noise_std = 0.1;
    return fp;
  }
  throw Error(errc::invalid_input, "unknown figure id: " + figure_id);
}

Ar1Config figure_ar1_config() { return Ar1Config{}; }

std::vector<std::size_t> figure_scaling_sizes() { return {50, 100, 200, 400, 800}; }

}  // namespace crossmi
