// crossmi: command-line front end for the cross mutual information library.
//
// Subcommands: estimate, test, simulate, heatmap, diagnose, scaling.
// Exit codes: 0 success, 1 figure-check failure, 2 input error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossmi/dataset.hpp"
#include "crossmi/error.hpp"
#include "crossmi/estimate.hpp"
#include "crossmi/estimators.hpp"
#include "crossmi/gaussian.hpp"
#include "crossmi/io_json.hpp"
#include "crossmi/significance.hpp"
#include "crossmi/simgen.hpp"
#include "crossmi/rng.hpp"
#include "crossmi/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace crossmi;

namespace {

// ---------------------------------------------------------------------------
// shared option bundles and helpers

struct EstimatorOpts {
  std::string backend = "ksg";
  std::size_t k = 4;
  double noise_amplitude = 1e-8;
  std::uint64_t seed = 0;

  EstimatorConfig config() const {
    EstimatorConfig cfg;
    cfg.backend = backend_from_name(backend);
    cfg.k = k;
    cfg.noise_amplitude = noise_amplitude;
    cfg.rng_seed = seed;
    return cfg;
  }
};

void add_estimator_opts(CLI::App* cmd, EstimatorOpts& opts) {
  cmd->add_option("--backend", opts.backend, "Estimator backend: ksg or gaussian")
      ->check(CLI::IsMember({"ksg", "gaussian"}));
  cmd->add_option("-k,--k", opts.k, "KSG neighbour count");
  cmd->add_option("--noise-amplitude", opts.noise_amplitude,
                  "Tie-breaking jitter amplitude (x per-dimension std)");
  cmd->add_option("--seed", opts.seed, "RNG seed");
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Writes manifest.json last so that every listed output already exists.
void write_manifest(const fs::path& outdir, const std::string& command,
                    const json& config, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = seed;
  manifest["tool_version"] = kVersion;
  manifest["outputs"] = outputs;
  manifest["created_utc"] = utc_now();
  write_json_file((outdir / "manifest.json").string(), manifest);
}

struct OutdirWriter {
  fs::path dir;
  std::vector<std::string> outputs;

  explicit OutdirWriter(const std::string& outdir) : dir(outdir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      throw Error(errc::io, "cannot create outdir: " + outdir);
    }
  }

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return (dir / name).string();
  }
};

PairedSeries load_pairs(const std::string& path, const std::string& x_col,
                        const std::string& y_col) {
  return read_paired_csv(path, x_col, y_col);
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string test_csv, reference_csv, out, locals_csv, outdir;
  std::string x_col = "x", y_col = "y";
  std::string label_col;
  std::string weights_json;
  EstimatorOpts est;
  bool self_exclude = false;
  bool bits = false;
};

int cmd_estimate(const EstimateArgs& args) {
  const EstimatorConfig cfg = args.est.config();
  const PairedSeries test = load_pairs(args.test_csv, args.x_col, args.y_col);

  json config = estimator_config_json(cfg);
  config["test_csv"] = args.test_csv;
  config["self_exclude"] = args.self_exclude;
  config["units"] = args.bits ? "bits" : "nats";

  LocalInfoSeries result;
  std::optional<ConditionedDataset> conditioned;
  if (!args.reference_csv.empty()) {
    const PairedSeries reference = load_pairs(args.reference_csv, args.x_col, args.y_col);
    config["reference_csv"] = args.reference_csv;
    result = estimate_cross_mi(test, reference, cfg, args.self_exclude);
  } else {
    if (!args.label_col.empty()) {
      throw Error(errc::invalid_input,
                  "--label-col requires --reference (condition-weighted cross MI)");
    }
    result = estimate_self_mi(test, cfg);
  }

  if (!args.label_col.empty()) {
    std::vector<std::string> labels = read_label_column(args.test_csv, args.label_col);
    if (!args.weights_json.empty()) {
      const json w = read_json_file(args.weights_json);
      std::map<std::string, double> weights;
      for (auto it = w.begin(); it != w.end(); ++it) weights[it.key()] = it.value();
      conditioned.emplace(test, labels, weights);
    } else {
      conditioned.emplace(test, labels);
    }
  }

  json doc = local_info_document(result, config, args.bits);
  if (conditioned) {
    // condition-weighted expectation over the same locals
    const double ln2 = std::log(2.0);
    json by_condition = json::object();
    double weighted = 0.0;
    for (const auto& label : conditioned->label_order()) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < conditioned->labels().size(); ++i) {
        if (conditioned->labels()[i] == label) {
          sum += result.locals[i];
          ++count;
        }
      }
      const double mean = sum / static_cast<double>(count);
      by_condition[label] = {{args.bits ? "mean_bits" : "mean_nats",
                              args.bits ? mean / ln2 : mean},
                             {"n", count},
                             {"weight", conditioned->weights().at(label)}};
      weighted += conditioned->weights().at(label) * mean;
    }
    doc["result"]["by_condition"] = std::move(by_condition);
    doc["result"][args.bits ? "weighted_mean_bits" : "weighted_mean_nats"] =
        args.bits ? weighted / ln2 : weighted;
  }

  std::vector<std::string> outputs;
  std::string out_path = args.out;
  std::string locals_path = args.locals_csv;
  std::optional<OutdirWriter> writer;
  if (!args.outdir.empty()) {
    writer.emplace(args.outdir);
    if (out_path.empty()) out_path = writer->path("estimate.json");
    if (!locals_path.empty()) locals_path = writer->path(fs::path(locals_path).filename().string());
  }
  if (out_path.empty()) {
    throw Error(errc::invalid_input, "estimate: --out or --outdir is required");
  }
  write_json_file(out_path, doc);
  if (!locals_path.empty()) write_locals_csv(locals_path, result);
  if (writer) write_manifest(writer->dir, "estimate", config, cfg.rng_seed, writer->outputs);
  std::cout << doc["result"][args.bits ? "mean_bits" : "mean_nats"].dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// test

struct TestArgs {
  std::string test_csv, reference_csv, out, outdir;
  std::string x_col = "x", y_col = "y";
  std::string kind = "mi";
  std::string shuffle_target = "test";
  std::string block_len = "auto";
  std::size_t n_perms = 200;
  EstimatorOpts est;
  bool bits = false;
};

int cmd_test(const TestArgs& args) {
  const EstimatorConfig cfg = args.est.config();
  const PairedSeries test = load_pairs(args.test_csv, args.x_col, args.y_col);

  BlockSpec spec;
  spec.n_permutations = args.n_perms;
  spec.rng_seed = args.est.seed;

  PermutationTestResult result;
  json config = estimator_config_json(cfg);
  config["test_csv"] = args.test_csv;
  config["kind"] = args.kind;
  config["n_permutations"] = args.n_perms;

  if (args.kind == "mi") {
    spec.block_len =
        (args.block_len == "auto") ? auto_block_length(test) : std::stoul(args.block_len);
    result = test_mi_nonzero(test, cfg, spec);
  } else if (args.kind == "mi-diff") {
    if (args.reference_csv.empty()) {
      throw Error(errc::invalid_input, "mi-diff needs --reference as the second dataset");
    }
    const PairedSeries other = load_pairs(args.reference_csv, args.x_col, args.y_col);
    config["reference_csv"] = args.reference_csv;
    spec.block_len = (args.block_len == "auto") ? auto_block_length_difference(test, other)
                                                : std::stoul(args.block_len);
    result = test_mi_difference(test, other, cfg, spec);
  } else if (args.kind == "cross-mi") {
    if (args.reference_csv.empty()) {
      throw Error(errc::invalid_input, "cross-mi needs --reference");
    }
    const PairedSeries reference = load_pairs(args.reference_csv, args.x_col, args.y_col);
    config["reference_csv"] = args.reference_csv;
    config["shuffle_target"] = args.shuffle_target;
    const ShuffleTarget target =
        args.shuffle_target == "reference" ? ShuffleTarget::Reference : ShuffleTarget::Test;
    const PairedSeries& shuffled = target == ShuffleTarget::Test ? test : reference;
    spec.block_len = (args.block_len == "auto") ? auto_block_length(shuffled)
                                                : std::stoul(args.block_len);
    result = test_cross_mi_nonzero(test, reference, target, cfg, spec);
  } else {
    throw Error(errc::invalid_input, "unknown test kind: " + args.kind);
  }
  config["block_len"] = result.block_len;

  const json doc = permutation_document(result, config, args.bits);
  std::vector<std::string> outputs;
  std::string out_path = args.out;
  std::optional<OutdirWriter> writer;
  if (!args.outdir.empty()) {
    writer.emplace(args.outdir);
    if (out_path.empty()) out_path = writer->path("test.json");
  }
  if (out_path.empty()) {
    throw Error(errc::invalid_input, "test: --out or --outdir is required");
  }
  write_json_file(out_path, doc);
  if (writer) write_manifest(writer->dir, "test", config, cfg.rng_seed, writer->outputs);
  std::cout << "p_value " << format_double(result.p_value) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// heatmap

struct HeatmapArgs {
  std::string reference_csv, out, outdir;
  std::string x_col = "x", y_col = "y";
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  std::size_t resolution = 64;
};

int cmd_heatmap(const HeatmapArgs& args) {
  const PairedSeries reference = load_pairs(args.reference_csv, args.x_col, args.y_col);
  const GaussianModel model = gaussian_fit(reference);
  const HeatmapGrid grid = gaussian_heatmap(model, args.x_min, args.x_max, args.y_min,
                                            args.y_max, args.resolution);
  json config = {{"reference_csv", args.reference_csv},
                 {"x_min", args.x_min},
                 {"x_max", args.x_max},
                 {"y_min", args.y_min},
                 {"y_max", args.y_max},
                 {"resolution", args.resolution}};
  std::string out_path = args.out;
  std::optional<OutdirWriter> writer;
  if (!args.outdir.empty()) {
    writer.emplace(args.outdir);
    if (out_path.empty()) out_path = writer->path("heatmap.csv");
  }
  if (out_path.empty()) {
    throw Error(errc::invalid_input, "heatmap: --out or --outdir is required");
  }
  write_heatmap_csv(out_path, grid);
  if (writer) write_manifest(writer->dir, "heatmap", config, 0, writer->outputs);
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseArgs {
  std::string test_csv, reference_csv, out, outdir;
  std::string x_col = "x", y_col = "y";
};

int cmd_diagnose(const DiagnoseArgs& args) {
  const PairedSeries test = load_pairs(args.test_csv, args.x_col, args.y_col);
  const PairedSeries reference = load_pairs(args.reference_csv, args.x_col, args.y_col);
  const SupportReport report = support_report(test, reference);
  json config = {{"test_csv", args.test_csv}, {"reference_csv", args.reference_csv}};
  const json doc = support_document(report, config);
  std::string out_path = args.out;
  std::optional<OutdirWriter> writer;
  if (!args.outdir.empty()) {
    writer.emplace(args.outdir);
    if (out_path.empty()) out_path = writer->path("diagnose.json");
  }
  if (out_path.empty()) {
    throw Error(errc::invalid_input, "diagnose: --out or --outdir is required");
  }
  write_json_file(out_path, doc);
  if (writer) write_manifest(writer->dir, "diagnose", config, 0, writer->outputs);
  std::cout << "support_ratio " << format_double(report.ratio) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// scaling

struct ScalingArgs {
  std::string outdir, config_json;
  std::vector<std::size_t> sizes;
  std::size_t n_reference = 2000;
  bool include_test = false;
  EstimatorOpts est;
};

int cmd_scaling(const ScalingArgs& args) {
  FigurePair fp = figure_pair_config("fig6");
  if (!args.config_json.empty()) {
    fp = figure_pair_from_json(read_json_file(args.config_json));
  }
  const std::vector<std::size_t> sizes =
      args.sizes.empty() ? figure_scaling_sizes() : args.sizes;
  const EstimatorConfig cfg = args.est.config();
  const auto rows = scaling_experiment(fp.reference, fp.test, sizes, args.include_test,
                                       cfg, args.n_reference, args.est.seed);

  json config = estimator_config_json(cfg);
  config["reference"] = condition_json(fp.reference);
  config["test"] = condition_json(fp.test);
  config["test_sizes"] = sizes;
  config["n_reference"] = args.n_reference;
  config["include_test_in_reference"] = args.include_test;

  OutdirWriter writer(args.outdir);
  write_scaling_csv(writer.path("scaling.csv"), rows);
  write_json_file(writer.path("scaling.json"), scaling_document(rows, config));
  write_manifest(writer.dir, "scaling", config, args.est.seed, writer.outputs);
  std::cout << "wrote " << (writer.dir / "scaling.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string figure, outdir, config_json;
  std::uint64_t seed = 0;
  EstimatorOpts est;
};

struct FigureChecks {
  json entries = json::array();
  bool all_passed = true;

  void record(const std::string& name, bool passed, const std::string& detail) {
    entries.push_back({{"check", name}, {"passed", passed}, {"detail", detail}});
    all_passed = all_passed && passed;
    std::cout << (passed ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
  }
};

void write_labelled_csv(const std::string& path, const ConditionedDataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error(errc::io, "cannot write file: " + path);
  out << "x,y,condition\n";
  for (std::size_t i = 0; i < ds.samples().size(); ++i) {
    out << format_double(ds.samples().x()[i]) << ',' << format_double(ds.samples().y()[i])
        << ',' << ds.labels()[i] << '\n';
  }
}

int simulate_fig1(const SimulateArgs& args) {
  StateSwitchingSpec spec = default_state_switching_spec(args.seed);
  if (!args.config_json.empty()) {
    const json j = read_json_file(args.config_json);
    spec.conditions.clear();
    for (const auto& c : j.at("conditions")) spec.conditions.push_back(condition_from_json(c));
    spec.samples_per_condition = j.value("samples_per_condition", std::size_t{400});
  }
  EstimatorConfig cfg = args.est.config();
  cfg.rng_seed = args.seed;

  const ConditionedDataset ds = gen_state_switching(spec);
  const PairedSeries probe({kProbeX}, {kProbeY});

  OutdirWriter writer(args.outdir);
  write_labelled_csv(writer.path("reference_by_condition.csv"), ds);

  EstimatorConfig probe_cfg = cfg;
  probe_cfg.k = kProbeK;  // single-point locals need a larger neighbour count

  FigureChecks checks;
  json per_condition = json::array();
  std::vector<double> probe_locals;
  for (const auto& label : ds.label_order()) {
    const PairedSeries cond = ds.condition(label);
    const double mi = ksg_mi(cond, cfg).mean;
    const double local = cross_ksg_mi(probe, cond, probe_cfg).mean;
    probe_locals.push_back(local);
    per_condition.push_back({{"condition", label},
                             {"mi_nats", mi},
                             {"probe_local_cross_mi_nats", local}});
  }
  checks.record("condition_1_high_positive", probe_locals[0] > 1.0,
                "probe local " + format_double(probe_locals[0]));
  checks.record("condition_2_near_zero", std::fabs(probe_locals[1]) < 0.75,
                "probe local " + format_double(probe_locals[1]));
  checks.record("condition_3_noise_band", std::fabs(probe_locals[2]) < 0.75,
                "probe local " + format_double(probe_locals[2]));
  checks.record("condition_4_negative", probe_locals[3] < -0.8,
                "probe local " + format_double(probe_locals[3]));

  // the pooled check runs the standard testing pipeline at the default k
  const PairedSeries pooled = ds.samples();
  BlockSpec block{1, 200, args.seed};
  const PermutationTestResult pooled_test =
      test_cross_mi_nonzero(probe, pooled, ShuffleTarget::Reference, cfg, block);
  checks.record("pooled_not_significant", pooled_test.p_value > 0.05,
                "p = " + format_double(pooled_test.p_value));

  {
    std::ofstream nulls(writer.path("pooled_null_samples.csv"));
    nulls << "null_cross_mi_nats\n";
    for (double v : pooled_test.null_samples) nulls << format_double(v) << '\n';
  }

  json config = estimator_config_json(cfg);
  config["figure"] = "fig1";
  config["samples_per_condition"] = spec.samples_per_condition;
  json conditions = json::array();
  for (const auto& c : spec.conditions) conditions.push_back(condition_json(c));
  config["conditions"] = std::move(conditions);

  json result;
  result["per_condition"] = std::move(per_condition);
  result["pooled_probe_cross_mi_nats"] = pooled_test.observed;
  result["pooled_p_value"] = pooled_test.p_value;
  result["checks"] = checks.entries;
  write_json_file(writer.path("fig1_results.json"), {{"kind", "figure_run"},
                                                     {"config", config},
                                                     {"result", result}});
  write_manifest(writer.dir, "simulate", config, args.seed, writer.outputs);
  return checks.all_passed ? 0 : 1;
}

int simulate_fig2_or_3(const SimulateArgs& args) {
  FigurePair fp = figure_pair_config(args.figure);
  if (!args.config_json.empty()) fp = figure_pair_from_json(read_json_file(args.config_json));
  EstimatorConfig cfg = args.est.config();
  cfg.rng_seed = args.seed;

  const PairedSeries reference = gen_from_spec(fp.reference, fp.n_reference,
                                               hash_mix(args.seed, 1));
  const PairedSeries test = gen_from_spec(fp.test, fp.n_test, hash_mix(args.seed, 2));

  OutdirWriter writer(args.outdir);
  write_paired_csv(writer.path("reference.csv"), reference);
  write_paired_csv(writer.path("test.csv"), test);

  const double i_q = ksg_mi(reference, cfg).mean;
  const LocalInfoSeries test_self = ksg_mi(test, cfg);
  const LocalInfoSeries cross = cross_ksg_mi(test, reference, cfg);
  write_locals_csv(writer.path("cross_locals.csv"), cross);

  FigureChecks checks;
  const std::string vals = "I_q " + format_double(i_q) + ", I_p " +
                           format_double(test_self.mean) + ", CI_pq " +
                           format_double(cross.mean);
  json result = {{"i_q_nats", i_q},
                 {"i_p_nats", test_self.mean},
                 {"ci_pq_nats", cross.mean}};

  if (args.figure == "fig2a") {
    checks.record("synergy_removed_ci_below_ip", cross.mean < test_self.mean, vals);
  } else if (args.figure == "fig2b") {
    checks.record("mild_synergy_zero_below_ci_below_ip",
                  cross.mean > 0.0 && cross.mean < test_self.mean, vals);
  } else if (args.figure == "fig2c") {
    checks.record("redundancy_ci_above_ip", cross.mean > test_self.mean, vals);
  } else if (args.figure == "fig3a") {
    // repeated test draws quantify the out-of-support variance
    const std::size_t n_draws = 30;
    std::vector<double> draws(n_draws);
    std::ofstream dcsv(writer.path("ci_draws.csv"));
    dcsv << "draw,ci_pq_nats\n";
    for (std::size_t d = 0; d < n_draws; ++d) {
      const PairedSeries redraw =
          gen_from_spec(fp.test, fp.n_test, hash_mix(args.seed, 100 + d));
      draws[d] = cross_ksg_mi(redraw, reference, cfg).mean;
      dcsv << d << ',' << format_double(draws[d]) << '\n';
    }
    double m = 0.0;
    for (double v : draws) m += v;
    m /= static_cast<double>(n_draws);
    double ss = 0.0;
    for (double v : draws) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(n_draws - 1));
    result["ci_pq_mean_over_draws_nats"] = m;
    // informational comparison point; generator parameters differ
    result["ci_pq_std_over_draws_nats"] = sd;
    checks.record("extrapolated_ci_above_iq", m > i_q,
                  vals + ", mean CI over draws " + format_double(m));
    std::cout << "INFO fig3a std of CI_pq over draws: " << format_double(sd) << '\n';
  } else if (args.figure == "fig3b") {
    checks.record("sinusoid_vs_linear_negative_ci", cross.mean < 0.0, vals);
  }

  json config = estimator_config_json(cfg);
  config["figure"] = args.figure;
  config["pair"] = figure_pair_json(fp);
  result["checks"] = checks.entries;
  write_json_file(writer.path(args.figure + "_results.json"),
                  {{"kind", "figure_run"}, {"config", config}, {"result", result}});
  write_manifest(writer.dir, "simulate", config, args.seed, writer.outputs);
  return checks.all_passed ? 0 : 1;
}

int simulate_fig4(const SimulateArgs& args) {
  Ar1Config ar = figure_ar1_config();
  if (!args.config_json.empty()) {
    const json j = read_json_file(args.config_json);
    ar.n = j.value("n", ar.n);
    ar.ar_coeff = j.value("ar_coeff", ar.ar_coeff);
    ar.coupling = j.value("coupling", ar.coupling);
    ar.noise_std = j.value("noise_std", ar.noise_std);
    ar.block_len = j.value("block_len", ar.block_len);
    ar.n_permutations = j.value("n_permutations", ar.n_permutations);
  }
  EstimatorConfig cfg = args.est.config();
  cfg.rng_seed = args.seed;

  const PairedSeries reference =
      gen_ar1_pair(ar.n, ar.ar_coeff, ar.coupling, ar.noise_std, hash_mix(args.seed, 1));
  const PairedSeries test =
      gen_ar1_pair(ar.n, ar.ar_coeff, ar.coupling, ar.noise_std, hash_mix(args.seed, 2));

  OutdirWriter writer(args.outdir);
  write_paired_csv(writer.path("reference.csv"), reference);
  write_paired_csv(writer.path("test.csv"), test);

  BlockSpec spec{ar.block_len, ar.n_permutations, args.seed};
  const PermutationTestResult ref_mi = test_mi_nonzero(reference, cfg, spec);
  const PermutationTestResult test_mi = test_mi_nonzero(test, cfg, spec);
  const PermutationTestResult cross =
      test_cross_mi_nonzero(test, reference, ShuffleTarget::Test, cfg, spec);

  json config = estimator_config_json(cfg);
  config["figure"] = "fig4";
  config["ar1"] = {{"n", ar.n},           {"ar_coeff", ar.ar_coeff},
                   {"coupling", ar.coupling}, {"noise_std", ar.noise_std},
                   {"block_len", ar.block_len}, {"n_permutations", ar.n_permutations}};

  FigureChecks checks;
  checks.record("reference_mi_significant", ref_mi.p_value <= 0.05,
                "I_q " + format_double(ref_mi.observed) + ", p " +
                    format_double(ref_mi.p_value));
  checks.record("test_mi_significant", test_mi.p_value <= 0.05,
                "I_p " + format_double(test_mi.observed) + ", p " +
                    format_double(test_mi.p_value));
  checks.record("cross_mi_significant", cross.p_value <= 0.05,
                "CI_pq " + format_double(cross.observed) + ", p " +
                    format_double(cross.p_value));

  write_json_file(writer.path("i_q_test.json"), permutation_document(ref_mi, config));
  write_json_file(writer.path("i_p_test.json"), permutation_document(test_mi, config));
  write_json_file(writer.path("ci_pq_test.json"), permutation_document(cross, config));
  auto write_nulls = [&](const std::string& name, const PermutationTestResult& r) {
    std::ofstream nulls(writer.path(name));
    nulls << "null_nats\n";
    for (double v : r.null_samples) nulls << format_double(v) << '\n';
  };
  write_nulls("i_q_null_samples.csv", ref_mi);
  write_nulls("i_p_null_samples.csv", test_mi);
  write_nulls("ci_pq_null_samples.csv", cross);
  json result = {{"checks", checks.entries}};
  write_json_file(writer.path("fig4_results.json"),
                  {{"kind", "figure_run"}, {"config", config}, {"result", result}});
  write_manifest(writer.dir, "simulate", config, args.seed, writer.outputs);
  return checks.all_passed ? 0 : 1;
}

int simulate_fig6(const SimulateArgs& args) {
  FigurePair fp = figure_pair_config("fig6");
  std::vector<std::size_t> sizes = figure_scaling_sizes();
  if (!args.config_json.empty()) {
    const json j = read_json_file(args.config_json);
    fp = figure_pair_from_json(j);
    if (j.contains("test_sizes")) sizes = j.at("test_sizes").get<std::vector<std::size_t>>();
  }
  EstimatorConfig cfg = args.est.config();
  cfg.rng_seed = args.seed;

  const auto pooled =
      scaling_experiment(fp.reference, fp.test, sizes, true, cfg, fp.n_reference, args.seed);
  const auto fixed =
      scaling_experiment(fp.reference, fp.test, sizes, false, cfg, fp.n_reference, args.seed);

  OutdirWriter writer(args.outdir);
  write_scaling_csv(writer.path("scaling_pooled_reference.csv"), pooled);
  write_scaling_csv(writer.path("scaling_fixed_reference.csv"), fixed);

  // monotone drift when the test data is pooled into the reference
  double concordant = 0.0;
  bool monotone = true;
  for (std::size_t i = 1; i < pooled.size(); ++i) {
    if (pooled[i].ci_pq <= pooled[i - 1].ci_pq) monotone = false;
    concordant += pooled[i].ci_pq - pooled[i - 1].ci_pq;
  }
  FigureChecks checks;
  checks.record("pooled_ci_drifts_with_test_size", monotone,
                "total drift " + format_double(concordant));

  json config = estimator_config_json(cfg);
  config["figure"] = "fig6";
  config["pair"] = figure_pair_json(fp);
  config["test_sizes"] = sizes;
  json result = {{"checks", checks.entries}};
  write_json_file(writer.path("fig6_results.json"),
                  {{"kind", "figure_run"}, {"config", config}, {"result", result}});
  write_manifest(writer.dir, "simulate", config, args.seed, writer.outputs);
  return checks.all_passed ? 0 : 1;
}

int cmd_simulate(const SimulateArgs& args) {
  if (args.figure == "fig1") return simulate_fig1(args);
  if (args.figure == "fig2a" || args.figure == "fig2b" || args.figure == "fig2c" ||
      args.figure == "fig3a" || args.figure == "fig3b") {
    return simulate_fig2_or_3(args);
  }
  if (args.figure == "fig4") return simulate_fig4(args);
  if (args.figure == "fig6") return simulate_fig6(args);
  throw Error(errc::invalid_input, "unknown figure id: " + args.figure);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross mutual information estimators and simulation pipelines"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  EstimateArgs est_args;
  CLI::App* est = app.add_subcommand("estimate", "Estimate MI or cross MI from CSV data");
  est->add_option("--test", est_args.test_csv, "Test data CSV")->required();
  est->add_option("--reference", est_args.reference_csv,
                  "Reference data CSV (omit to estimate the test data's own MI)");
  est->add_option("--x-col", est_args.x_col, "x column name");
  est->add_option("--y-col", est_args.y_col, "y column name");
  est->add_option("--label-col", est_args.label_col, "condition label column");
  est->add_option("--weights", est_args.weights_json, "condition weights JSON");
  est->add_flag("--self-exclude", est_args.self_exclude,
                "treat test row i as reference row i and exclude it from its own "
                "neighbourhood (test == reference reproduces the plain MI)");
  est->add_flag("--bits", est_args.bits, "report bits instead of nats");
  est->add_option("--out", est_args.out, "output JSON path");
  est->add_option("--locals-csv", est_args.locals_csv, "per-sample locals CSV path");
  est->add_option("--outdir", est_args.outdir, "output directory (writes manifest.json)");
  add_estimator_opts(est, est_args.est);

  TestArgs test_args;
  CLI::App* tst = app.add_subcommand("test", "Permutation significance tests");
  tst->add_option("--test", test_args.test_csv, "Test data CSV (dataset A for mi-diff)")
      ->required();
  tst->add_option("--reference", test_args.reference_csv,
                  "Reference CSV (dataset B for mi-diff)");
  tst->add_option("--x-col", test_args.x_col, "x column name");
  tst->add_option("--y-col", test_args.y_col, "y column name");
  tst->add_option("--kind", test_args.kind, "mi, mi-diff, or cross-mi")
      ->check(CLI::IsMember({"mi", "mi-diff", "cross-mi"}));
  tst->add_option("--shuffle-target", test_args.shuffle_target,
                  "cross-mi only: which series to shuffle")
      ->check(CLI::IsMember({"test", "reference"}));
  tst->add_option("--block-len", test_args.block_len, "block length or 'auto'");
  tst->add_option("--n-perms", test_args.n_perms, "number of permutations");
  tst->add_flag("--bits", test_args.bits, "report bits instead of nats");
  tst->add_option("--out", test_args.out, "output JSON path");
  tst->add_option("--outdir", test_args.outdir, "output directory (writes manifest.json)");
  add_estimator_opts(tst, test_args.est);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Reproduce a simulation study end to end");
  sim->add_option("--figure", sim_args.figure,
                  "fig1, fig2a, fig2b, fig2c, fig3a, fig3b, fig4, fig6")
      ->required();
  sim->add_option("--config", sim_args.config_json, "generator config override JSON");
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_option("--outdir", sim_args.outdir, "output directory")->required();
  sim->add_option("-k,--k", sim_args.est.k, "KSG neighbour count");

  HeatmapArgs heat_args;
  CLI::App* heat = app.add_subcommand("heatmap", "Analytical local cross MI grid");
  heat->add_option("--reference", heat_args.reference_csv, "Reference data CSV")->required();
  heat->add_option("--x-col", heat_args.x_col, "x column name");
  heat->add_option("--y-col", heat_args.y_col, "y column name");
  heat->add_option("--x-min", heat_args.x_min)->required();
  heat->add_option("--x-max", heat_args.x_max)->required();
  heat->add_option("--y-min", heat_args.y_min)->required();
  heat->add_option("--y-max", heat_args.y_max)->required();
  heat->add_option("--resolution", heat_args.resolution, "grid resolution per axis");
  heat->add_option("--out", heat_args.out, "output CSV path");
  heat->add_option("--outdir", heat_args.outdir, "output directory (writes manifest.json)");

  DiagnoseArgs diag_args;
  CLI::App* diag = app.add_subcommand("diagnose", "Support diagnostic for test vs reference");
  diag->add_option("--test", diag_args.test_csv, "Test data CSV")->required();
  diag->add_option("--reference", diag_args.reference_csv, "Reference data CSV")->required();
  diag->add_option("--x-col", diag_args.x_col, "x column name");
  diag->add_option("--y-col", diag_args.y_col, "y column name");
  diag->add_option("--out", diag_args.out, "output JSON path");
  diag->add_option("--outdir", diag_args.outdir, "output directory (writes manifest.json)");

  ScalingArgs scale_args;
  CLI::App* scale = app.add_subcommand("scaling", "Test/reference sample-ratio experiment");
  scale->add_option("--config", scale_args.config_json, "generator config JSON");
  scale->add_option("--sizes", scale_args.sizes, "test sizes")->delimiter(',');
  scale->add_option("--n-reference", scale_args.n_reference, "reference sample count");
  scale->add_flag("--include-test,!--no-include-test", scale_args.include_test,
                  "pool the test data into the reference before estimating q");
  scale->add_option("--outdir", scale_args.outdir, "output directory")->required();
  add_estimator_opts(scale, scale_args.est);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "crossmi: error[cli] " << e.what() << '\n';
    return 2;
  }

  try {
    if (est->parsed()) return cmd_estimate(est_args);
    if (tst->parsed()) return cmd_test(test_args);
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (heat->parsed()) return cmd_heatmap(heat_args);
    if (diag->parsed()) return cmd_diagnose(diag_args);
    if (scale->parsed()) return cmd_scaling(scale_args);
  } catch (const Error& e) {
    std::cerr << "crossmi: error[" << e.code_name() << "] " << e.what() << '\n';
    return e.code() == errc::check_failed ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "crossmi: error[internal] " << e.what() << '\n';
    return 2;
  }
  return 2;
}
