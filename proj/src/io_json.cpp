#include "crossmi/io_json.hpp"

#include <cmath>
#include <fstream>

#include "crossmi/dataset.hpp"
#include "crossmi/error.hpp"

namespace crossmi {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double maybe_bits(double nats, bool bits) { return bits ? nats / kLn2 : nats; }

std::string info_key(const char* stem, bool bits) {
  return std::string(stem) + (bits ? "_bits" : "_nats");
}

nlohmann::json document(const std::string& kind, nlohmann::json config,
                        nlohmann::json result) {
  nlohmann::json doc;
  doc["kind"] = kind;
  doc["config"] = std::move(config);
  doc["result"] = std::move(result);
  return doc;
}

}  // namespace

std::string backend_name(Backend b) {
  return b == Backend::Ksg ? "ksg" : "gaussian";
}

Backend backend_from_name(const std::string& name) {
  if (name == "ksg") return Backend::Ksg;
  if (name == "gaussian") return Backend::Gaussian;
  throw Error(errc::invalid_input, "unknown backend: " + name);
}

std::string test_kind_name(TestKind k) {
  switch (k) {
    case TestKind::MiNonzero: return "MI_NONZERO";
    case TestKind::MiDifference: return "MI_DIFFERENCE";
    case TestKind::CrossMiNonzero: return "CROSS_MI_NONZERO";
  }
  return "";
}

TestKind test_kind_from_name(const std::string& name) {
  if (name == "MI_NONZERO") return TestKind::MiNonzero;
  if (name == "MI_DIFFERENCE") return TestKind::MiDifference;
  if (name == "CROSS_MI_NONZERO") return TestKind::CrossMiNonzero;
  throw Error(errc::invalid_input, "unknown test kind: " + name);
}

std::string shuffle_target_name(ShuffleTarget t) {
  switch (t) {
    case ShuffleTarget::Test: return "TEST";
    case ShuffleTarget::Reference: return "REFERENCE";
    case ShuffleTarget::NotApplicable: return "NOT_APPLICABLE";
  }
  return "";
}

ShuffleTarget shuffle_target_from_name(const std::string& name) {
  if (name == "TEST") return ShuffleTarget::Test;
  if (name == "REFERENCE") return ShuffleTarget::Reference;
  if (name == "NOT_APPLICABLE") return ShuffleTarget::NotApplicable;
  throw Error(errc::invalid_input, "unknown shuffle target: " + name);
}

nlohmann::json estimator_config_json(const EstimatorConfig& cfg) {
  return {{"backend", backend_name(cfg.backend)},
          {"k", cfg.k},
          {"noise_amplitude", cfg.noise_amplitude},
          {"rng_seed", cfg.rng_seed}};
}

nlohmann::json local_info_document(const LocalInfoSeries& series, nlohmann::json config,
                                   bool bits) {
  nlohmann::json result;
  result["units"] = bits ? "bits" : "nats";
  result[info_key("mean", bits)] = maybe_bits(series.mean, bits);
  nlohmann::json locals = nlohmann::json::array();
  for (double v : series.locals) locals.push_back(maybe_bits(v, bits));
  result["locals"] = std::move(locals);
  result["backend"] = backend_name(series.backend);
  result["k"] = series.k;
  result["n_test"] = series.n_test;
  result["n_reference"] = series.n_reference;
  if (series.gaussian) {
    result[info_key("first_term", bits)] = maybe_bits(series.gaussian->first_term_nats, bits);
    result[info_key("mean_correction", bits)] =
        maybe_bits(series.gaussian->mean_correction_nats, bits);
    // squared data units, never converted
    result["sum_squared_residuals"] = series.gaussian->sum_squared_residuals;
  }
  return document("local_info_series", std::move(config), std::move(result));
}

LocalInfoSeries local_info_from_document(const nlohmann::json& doc) {
  const nlohmann::json& r = doc.at("result");
  if (r.at("units").get<std::string>() != "nats") {
    throw Error(errc::invalid_input, "round-trip reader expects nats units");
  }
  LocalInfoSeries s;
  s.mean = r.at("mean_nats").get<double>();
  s.locals = r.at("locals").get<std::vector<double>>();
  s.backend = backend_from_name(r.at("backend").get<std::string>());
  s.k = r.at("k").get<std::size_t>();
  s.n_test = r.at("n_test").get<std::size_t>();
  s.n_reference = r.at("n_reference").get<std::size_t>();
  if (r.contains("first_term_nats")) {
    s.gaussian = GaussianDecomposition{r.at("first_term_nats").get<double>(),
                                       r.at("mean_correction_nats").get<double>(),
                                       r.at("sum_squared_residuals").get<double>()};
  }
  return s;
}

nlohmann::json permutation_document(const PermutationTestResult& result,
                                    nlohmann::json config, bool bits) {
  nlohmann::json r;
  r["units"] = bits ? "bits" : "nats";
  r["observed"] = maybe_bits(result.observed, bits);
  nlohmann::json nulls = nlohmann::json::array();
  for (double v : result.null_samples) nulls.push_back(maybe_bits(v, bits));
  r["null_samples"] = std::move(nulls);
  r["p_value"] = result.p_value;
  r["test_kind"] = test_kind_name(result.test_kind);
  r["shuffle_target"] = shuffle_target_name(result.shuffle_target);
  r["block_len"] = result.block_len;
  r["n_permutations"] = result.null_samples.size();
  return document("permutation_test", std::move(config), std::move(r));
}

PermutationTestResult permutation_from_document(const nlohmann::json& doc) {
  const nlohmann::json& r = doc.at("result");
  if (r.at("units").get<std::string>() != "nats") {
    throw Error(errc::invalid_input, "round-trip reader expects nats units");
  }
  PermutationTestResult p;
  p.observed = r.at("observed").get<double>();
  p.null_samples = r.at("null_samples").get<std::vector<double>>();
  p.p_value = r.at("p_value").get<double>();
  p.test_kind = test_kind_from_name(r.at("test_kind").get<std::string>());
  p.shuffle_target = shuffle_target_from_name(r.at("shuffle_target").get<std::string>());
  p.block_len = r.at("block_len").get<std::size_t>();
  return p;
}

nlohmann::json support_document(const SupportReport& report, nlohmann::json config) {
  nlohmann::json r;
  r["ratio"] = report.ratio;
  r["mean_test_nn_distance"] = report.mean_test_nn;
  r["mean_reference_nn_distance"] = report.mean_reference_nn;
  r["test_nn_distances"] = report.test_nn_distances;
  return document("support_diagnostic", std::move(config), std::move(r));
}

nlohmann::json scaling_document(const std::vector<ScalingRow>& rows,
                                nlohmann::json config, bool bits) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["n_test"] = row.n_test;
    r[info_key("i_p", bits)] = maybe_bits(row.i_p, bits);
    r[info_key("i_q", bits)] = maybe_bits(row.i_q, bits);
    r[info_key("ci_pq", bits)] = maybe_bits(row.ci_pq, bits);
    table.push_back(std::move(r));
  }
  nlohmann::json result;
  result["units"] = bits ? "bits" : "nats";
  result["table"] = std::move(table);
  return document("scaling_table", std::move(config), std::move(result));
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw Error(errc::io, "cannot write file: " + path);
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw Error(errc::io, "write failed: " + path);
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(errc::io, "cannot open file: " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::invalid_input, "malformed JSON in " + path + ": " + e.what());
  }
  return doc;
}

void write_heatmap_csv(const std::string& path, const HeatmapGrid& grid) {
  std::ofstream out(path);
  if (!out) {
    throw Error(errc::io, "cannot write file: " + path);
  }
  out << "x,y,local_mi_nats\n";
  for (std::size_t yi = 0; yi < grid.ys.size(); ++yi) {
    for (std::size_t xi = 0; xi < grid.xs.size(); ++xi) {
      out << format_double(grid.xs[xi]) << ',' << format_double(grid.ys[yi]) << ','
          << format_double(grid.at(yi, xi)) << '\n';
    }
  }
}

void write_scaling_csv(const std::string& path, const std::vector<ScalingRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw Error(errc::io, "cannot write file: " + path);
  }
  out << "n_test,i_p_nats,i_q_nats,ci_pq_nats\n";
  for (const auto& row : rows) {
    out << row.n_test << ',' << format_double(row.i_p) << ',' << format_double(row.i_q)
        << ',' << format_double(row.ci_pq) << '\n';
  }
}

void write_locals_csv(const std::string& path, const LocalInfoSeries& series) {
  std::ofstream out(path);
  if (!out) {
    throw Error(errc::io, "cannot write file: " + path);
  }
  out << "index,local_nats\n";
  for (std::size_t i = 0; i < series.locals.size(); ++i) {
    out << i << ',' << format_double(series.locals[i]) << '\n';
  }
}

// --- generator specs -----------------------------------------------------------

nlohmann::json marginal_json(const MarginalSpec& spec) {
  if (spec.kind == MarginalSpec::Kind::Uniform) {
    return {{"kind", "uniform"}, {"lo", spec.lo}, {"hi", spec.hi}};
  }
  return {{"kind", "normal"}, {"mean", spec.mean}, {"stddev", spec.stddev}};
}

MarginalSpec marginal_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    return MarginalSpec::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  }
  if (kind == "normal") {
    return MarginalSpec::normal(j.at("mean").get<double>(), j.at("stddev").get<double>());
  }
  throw Error(errc::invalid_input, "unknown marginal kind: " + kind);
}

nlohmann::json condition_json(const ConditionSpec& spec) {
  nlohmann::json j;
  j["x"] = marginal_json(spec.x);
  switch (spec.kind) {
    case ConditionKind::Linear:
      j["kind"] = "linear";
      j["slope"] = spec.slope;
      j["intercept"] = spec.intercept;
      j["noise_std"] = spec.noise_std;
      break;
    case ConditionKind::Independent:
      j["kind"] = "independent";
      j["y"] = marginal_json(spec.y);
      j["y_offset"] = spec.y_offset;
      break;
    case ConditionKind::Sinusoidal:
      j["kind"] = "sinusoidal";
      j["amplitude"] = spec.amplitude;
      j["frequency"] = spec.frequency;
      j["y_offset"] = spec.y_offset;
      j["noise_std"] = spec.noise_std;
      break;
  }
  return j;
}

ConditionSpec condition_from_json(const nlohmann::json& j) {
  ConditionSpec spec;
  spec.x = marginal_from_json(j.at("x"));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    spec.kind = ConditionKind::Linear;
    spec.slope = j.at("slope").get<double>();
    spec.intercept = j.at("intercept").get<double>();
    spec.noise_std = j.at("noise_std").get<double>();
  } else if (kind == "independent") {
    spec.kind = ConditionKind::Independent;
    spec.y = marginal_from_json(j.at("y"));
    spec.y_offset = j.value("y_offset", 0.0);
  } else if (kind == "sinusoidal") {
    spec.kind = ConditionKind::Sinusoidal;
    spec.amplitude = j.at("amplitude").get<double>();
    spec.frequency = j.at("frequency").get<double>();
    spec.y_offset = j.value("y_offset", 0.0);
    spec.noise_std = j.at("noise_std").get<double>();
  } else {
    throw Error(errc::invalid_input, "unknown condition kind: " + kind);
  }
  return spec;
}

nlohmann::json figure_pair_json(const FigurePair& fp) {
  return {{"reference", condition_json(fp.reference)},
          {"test", condition_json(fp.test)},
          {"n_reference", fp.n_reference},
          {"n_test", fp.n_test}};
}

FigurePair figure_pair_from_json(const nlohmann::json& j) {
  FigurePair fp;
  fp.reference = condition_from_json(j.at("reference"));
  fp.test = condition_from_json(j.at("test"));
  fp.n_reference = j.at("n_reference").get<std::size_t>();
  fp.n_test = j.at("n_test").get<std::size_t>();
  return fp;
}

nlohmann::json figure_configs_json() {
  nlohmann::json doc;

  const StateSwitchingSpec sw = default_state_switching_spec(0);
  nlohmann::json fig1;
  fig1["samples_per_condition"] = sw.samples_per_condition;
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& c : sw.conditions) conditions.push_back(condition_json(c));
  fig1["conditions"] = std::move(conditions);
  fig1["probe"] = {{"x", kProbeX}, {"y", kProbeY}};
  fig1["probe_k"] = kProbeK;
  doc["fig1"] = std::move(fig1);

  for (const char* id : {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b"}) {
    doc[id] = figure_pair_json(figure_pair_config(id));
  }

  const Ar1Config ar = figure_ar1_config();
  doc["fig4"] = {{"n", ar.n},
                 {"ar_coeff", ar.ar_coeff},
                 {"coupling", ar.coupling},
                 {"noise_std", ar.noise_std},
                 {"block_len", ar.block_len},
                 {"n_permutations", ar.n_permutations}};

  nlohmann::json fig6 = figure_pair_json(figure_pair_config("fig6"));
  fig6["test_sizes"] = figure_scaling_sizes();
  doc["fig6"] = std::move(fig6);
  return doc;
}

}  // namespace crossmi
