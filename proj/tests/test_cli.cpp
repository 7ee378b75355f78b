#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "crossmi/dataset.hpp"
#include "crossmi/gaussian.hpp"
#include "crossmi/rng.hpp"
#include "crossmi/simgen.hpp"

using namespace crossmi;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "crossmi_cli_stdout.txt";
  const fs::path err = fs::temp_directory_path() / "crossmi_cli_stderr.txt";
  const std::string cmd = std::string(CROSSMI_BIN_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (raw == -1) ? -1 : WEXITSTATUS(raw);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / "crossmi_cli_scratch") {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

json strip_timestamp(json manifest) {
  manifest.erase("created_utc");
  return manifest;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("missing input file exits 2 naming the path") {
  Scratch s;
  const RunResult r = run_cli("estimate --test " + s.file("nope.csv") + " --out " +
                              s.file("o.json"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("nope.csv") != std::string::npos);
  CHECK(r.err.find("crossmi: error[") != std::string::npos);
}

TEST_CASE("estimate on the bivariate-normal fixture recovers the closed form") {
  Scratch s;
  write_paired_csv(s.file("biv.csv"), gen_bivariate_normal(5000, 0.6, 5));
  const RunResult r = run_cli("estimate --test " + s.file("biv.csv") +
                              " -k 4 --seed 5 --out " + s.file("est.json"));
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp(s.file("est.json")));
  CHECK(doc["kind"] == "local_info_series");
  const double mean = doc["result"]["mean_nats"].get<double>();
  CHECK(std::fabs(mean - 0.2231) < 0.02);
  CHECK(doc["result"]["n_test"] == 5000);
}

TEST_CASE("gaussian backend reports the decomposition") {
  Scratch s;
  write_paired_csv(s.file("biv.csv"), gen_bivariate_normal(5000, 0.6, 20));
  const RunResult r = run_cli("estimate --test " + s.file("biv.csv") +
                              " --backend gaussian --out " + s.file("g.json"));
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp(s.file("g.json")));
  CHECK(doc["result"]["backend"] == "gaussian");
  CHECK(std::fabs(doc["result"]["mean_nats"].get<double>() - 0.2231) < 0.03);
  CHECK(doc["result"].contains("first_term_nats"));
  CHECK(doc["result"].contains("mean_correction_nats"));
  CHECK(doc["result"].contains("sum_squared_residuals"));
}

TEST_CASE("self-excluded cross run equals the plain run") {
  Scratch s;
  write_paired_csv(s.file("d.csv"), gen_bivariate_normal(400, 0.5, 7));
  REQUIRE(run_cli("estimate --test " + s.file("d.csv") + " --seed 7 --out " +
                  s.file("plain.json"))
              .exit_code == 0);
  REQUIRE(run_cli("estimate --test " + s.file("d.csv") + " --reference " +
                  s.file("d.csv") + " --self-exclude --seed 7 --out " +
                  s.file("cross.json"))
              .exit_code == 0);
  const json plain = json::parse(slurp(s.file("plain.json")));
  const json cross = json::parse(slurp(s.file("cross.json")));
  CHECK(plain["result"]["mean_nats"] == cross["result"]["mean_nats"]);
  CHECK(plain["result"]["locals"] == cross["result"]["locals"]);
}

TEST_CASE("bits flag divides by ln 2 at serialization") {
  Scratch s;
  write_paired_csv(s.file("d.csv"), gen_bivariate_normal(500, 0.6, 9));
  REQUIRE(run_cli("estimate --test " + s.file("d.csv") + " --seed 9 --out " +
                  s.file("nats.json"))
              .exit_code == 0);
  REQUIRE(run_cli("estimate --test " + s.file("d.csv") + " --seed 9 --bits --out " +
                  s.file("bits.json"))
              .exit_code == 0);
  const double nats = json::parse(slurp(s.file("nats.json")))["result"]["mean_nats"];
  const double bits = json::parse(slurp(s.file("bits.json")))["result"]["mean_bits"];
  CHECK(bits == doctest::Approx(nats / std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("condition-weighted estimate") {
  Scratch s;
  const ConditionedDataset ds = gen_state_switching(default_state_switching_spec(3));
  {
    std::ofstream out(s.file("labelled.csv"));
    out << "x,y,cond\n";
    for (std::size_t i = 0; i < ds.samples().size(); ++i) {
      out << format_double(ds.samples().x()[i]) << ','
          << format_double(ds.samples().y()[i]) << ',' << ds.labels()[i] << '\n';
    }
  }
  write_paired_csv(s.file("ref.csv"), ds.samples());
  const RunResult r = run_cli("estimate --test " + s.file("labelled.csv") +
                              " --reference " + s.file("ref.csv") +
                              " --label-col cond --seed 3 --out " + s.file("w.json"));
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp(s.file("w.json")));
  CHECK(doc["result"].contains("weighted_mean_nats"));
  CHECK(doc["result"]["by_condition"].size() == 4);
  // equal condition counts: the weighted mean equals the plain mean
  CHECK(doc["result"]["weighted_mean_nats"].get<double>() ==
        doctest::Approx(doc["result"]["mean_nats"].get<double>()).epsilon(1e-9));
}

TEST_CASE("explicit condition weights reweight the expectation") {
  Scratch s;
  {
    std::ofstream out(s.file("lab.csv"));
    out << "x,y,cond\n";
    SplitMix64 rng(40);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.normal();
      out << format_double(x) << ',' << format_double(0.8 * x + 0.3 * rng.normal())
          << ',' << (i < 100 ? "p" : "q") << '\n';
    }
  }
  write_paired_csv(s.file("ref.csv"), gen_bivariate_normal(1000, 0.8, 41));
  {
    std::ofstream w(s.file("w.json"));
    w << R"({"p": 0.9, "q": 0.1})";
  }
  const RunResult r = run_cli("estimate --test " + s.file("lab.csv") + " --reference " +
                              s.file("ref.csv") + " --label-col cond --weights " +
                              s.file("w.json") + " --seed 40 --out " + s.file("o.json"));
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp(s.file("o.json")));
  const double mp = doc["result"]["by_condition"]["p"]["mean_nats"];
  const double mq = doc["result"]["by_condition"]["q"]["mean_nats"];
  CHECK(doc["result"]["weighted_mean_nats"].get<double>() ==
        doctest::Approx(0.9 * mp + 0.1 * mq).epsilon(1e-12));
}

TEST_CASE("dependent fixture reaches the minimum p-value") {
  Scratch s;
  write_paired_csv(s.file("dep.csv"), gen_linear(1000, 1.0, 0.0, 0.05, -1.0, 1.0, 4));
  const RunResult r = run_cli("test --test " + s.file("dep.csv") +
                              " --kind mi --block-len 1 --n-perms 200 --seed 4 --out " +
                              s.file("t.json"));
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp(s.file("t.json")));
  CHECK(doc["result"]["p_value"].get<double>() == doctest::Approx(1.0 / 201).epsilon(1e-12));
}

TEST_CASE("independent fixture is not significant for the pinned seed") {
  Scratch s;
  write_paired_csv(s.file("ind.csv"),
                   gen_independent(600, MarginalSpec::normal(0.0, 1.0),
                                   MarginalSpec::normal(0.0, 1.0), 5));
  const RunResult r = run_cli("test --test " + s.file("ind.csv") +
                              " --kind mi --block-len auto --n-perms 200 --seed 5 --out " +
                              s.file("t.json"));
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(slurp(s.file("t.json")))["result"]["p_value"].get<double>() > 0.05);
}

TEST_CASE("single-row test data instructs switching the shuffle target") {
  Scratch s;
  write_paired_csv(s.file("ref.csv"), gen_bivariate_normal(300, 0.5, 6));
  {
    std::ofstream out(s.file("single.csv"));
    out << "x,y\n0.25,0.25\n";
  }
  const RunResult r =
      run_cli("test --test " + s.file("single.csv") + " --reference " + s.file("ref.csv") +
              " --kind cross-mi --shuffle-target test --block-len 1 --out " +
              s.file("t.json"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("REFERENCE") != std::string::npos);
}

TEST_CASE("heatmap of an independent reference is all zeros with exact corners") {
  Scratch s;
  // exactly zero sample covariance
  {
    std::ofstream out(s.file("ind.csv"));
    out << "x,y\n-1,-1\n1,-1\n-1,1\n1,1\n";
  }
  const RunResult r = run_cli("heatmap --reference " + s.file("ind.csv") +
                              " --x-min -1 --x-max 2 --y-min 0 --y-max 4 --resolution 2 "
                              "--out " +
                              s.file("grid.csv"));
  REQUIRE(r.exit_code == 0);
  const std::string grid = slurp(s.file("grid.csv"));
  CHECK(grid == "x,y,local_mi_nats\n-1,0,0\n2,0,0\n-1,4,0\n2,4,0\n");
}

TEST_CASE("heatmap rows peak at the trendline for a linear reference") {
  Scratch s;
  write_paired_csv(s.file("lin.csv"), gen_linear(2000, 0.8, 0.1, 0.3, -2.0, 2.0, 8));
  const RunResult r = run_cli("heatmap --reference " + s.file("lin.csv") +
                              " --x-min -3 --x-max 3 --y-min -3 --y-max 3 "
                              "--resolution 21 --out " +
                              s.file("grid.csv"));
  REQUIRE(r.exit_code == 0);
  // parse the emitted grid and locate the per-row maxima
  std::ifstream in(s.file("grid.csv"));
  std::string line;
  std::getline(in, line);  // header
  std::map<double, std::pair<double, double>> row_best;  // y -> (value, x)
  std::set<double> columns;
  while (std::getline(in, line)) {
    double x, y, v;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) == 3);
    columns.insert(x);
    auto it = row_best.find(y);
    if (it == row_best.end() || v > it->second.first) row_best[y] = {v, x};
  }
  REQUIRE(row_best.size() == 21);
  REQUIRE(columns.size() == 21);
  // the winning column must sit nearest the fitted trendline for its row
  const GaussianModel model =
      gaussian_fit(read_paired_csv(s.file("lin.csv"), "x", "y"));
  for (const auto& [y, best] : row_best) {
    double nearest = *columns.begin();
    for (double c : columns) {
      if (std::fabs(y - (model.beta * c + model.gamma)) <
          std::fabs(y - (model.beta * nearest + model.gamma))) {
        nearest = c;
      }
    }
    CHECK(best.second == nearest);
  }
}

TEST_CASE("diagnose identical files reports ratio near one; empty reference errors") {
  Scratch s;
  write_paired_csv(s.file("d.csv"), gen_bivariate_normal(500, 0.4, 10));
  const RunResult r = run_cli("diagnose --test " + s.file("d.csv") + " --reference " +
                              s.file("d.csv") + " --out " + s.file("diag.json"));
  REQUIRE(r.exit_code == 0);
  const double ratio = json::parse(slurp(s.file("diag.json")))["result"]["ratio"];
  CHECK(ratio > 0.5);
  CHECK(ratio < 2.0);

  {
    std::ofstream out(s.file("empty.csv"));
    out << "x,y\n";
  }
  CHECK(run_cli("diagnose --test " + s.file("d.csv") + " --reference " +
                s.file("empty.csv") + " --out " + s.file("e.json"))
            .exit_code == 2);
}

TEST_CASE("same command line and seed give byte-identical outputs") {
  Scratch s;
  write_paired_csv(s.file("d.csv"), gen_bivariate_normal(400, 0.5, 11));
  const std::string args = "test --test " + s.file("d.csv") +
                           " --kind mi --block-len 2 --n-perms 50 --seed 11";
  REQUIRE(run_cli(args + " --outdir " + s.file("run1")).exit_code == 0);
  REQUIRE(run_cli(args + " --outdir " + s.file("run2")).exit_code == 0);
  CHECK(slurp(s.file("run1/test.json")) == slurp(s.file("run2/test.json")));
  const json m1 = json::parse(slurp(s.file("run1/manifest.json")));
  const json m2 = json::parse(slurp(s.file("run2/manifest.json")));
  CHECK(strip_timestamp(m1) == strip_timestamp(m2));
  CHECK(m1["tool_version"] == "0.1.0");
}

TEST_CASE("manifest lists outputs that exist") {
  Scratch s;
  const RunResult r = run_cli("simulate --figure fig4 --seed 12 --outdir " +
                              s.file("fig4"));
  REQUIRE(r.exit_code == 0);
  const json manifest = json::parse(slurp(s.file("fig4/manifest.json")));
  CHECK(manifest["command"] == "simulate");
  for (const auto& name : manifest["outputs"]) {
    CHECK(fs::exists(s.dir / "fig4" / name.get<std::string>()));
  }
  CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("simulate fig2c asserts the redundancy ordering") {
  Scratch s;
  const RunResult r = run_cli("simulate --figure fig2c --seed 13 --outdir " +
                              s.file("fig2c"));
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp(s.file("fig2c/fig2c_results.json")));
  CHECK(doc["result"]["ci_pq_nats"].get<double>() >
        doc["result"]["i_p_nats"].get<double>());
}

TEST_CASE("unknown figure id exits 2") {
  Scratch s;
  CHECK(run_cli("simulate --figure fig9 --outdir " + s.file("x")).exit_code == 2);
}

TEST_CASE("simulate fig3a reports the across-draw spread") {
  Scratch s;
  const RunResult r = run_cli("simulate --figure fig3a --seed 21 --outdir " +
                              s.file("fig3a"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("INFO fig3a std of CI_pq over draws:") != std::string::npos);
  const json doc = json::parse(slurp(s.file("fig3a/fig3a_results.json")));
  CHECK(doc["result"]["ci_pq_mean_over_draws_nats"].get<double>() >
        doc["result"]["i_q_nats"].get<double>());
  const std::string draws = slurp(s.file("fig3a/ci_draws.csv"));
  CHECK(draws.find("draw,ci_pq_nats") == 0);
}

TEST_CASE("simulate fig6 emits both scaling tables") {
  Scratch s;
  // smaller sizes keep the smoke test quick
  {
    std::ofstream cfg(s.file("fig6.json"));
    cfg << R"({"reference":{"kind":"linear","x":{"kind":"uniform","lo":-2.0,"hi":2.0},)"
        << R"("slope":0.5,"intercept":0.0,"noise_std":0.1},)"
        << R"("test":{"kind":"sinusoidal","x":{"kind":"uniform","lo":-2.0,"hi":2.0},)"
        << R"("amplitude":1.0,"frequency":1.5707963267948966,"y_offset":0.0,"noise_std":0.1},)"
        << R"("n_reference":800,"n_test":100,"test_sizes":[50,100,200]})";
  }
  const RunResult r = run_cli("simulate --figure fig6 --seed 22 --config " +
                              s.file("fig6.json") + " --outdir " + s.file("fig6"));
  REQUIRE(r.exit_code == 0);
  CHECK(slurp(s.file("fig6/scaling_pooled_reference.csv")).find("n_test,") == 0);
  CHECK(slurp(s.file("fig6/scaling_fixed_reference.csv")).find("n_test,") == 0);
}

TEST_CASE("scaling subcommand writes the table") {
  Scratch s;
  const RunResult r = run_cli("scaling --sizes 50,100 --n-reference 500 --seed 14 "
                              "--include-test --outdir " +
                              s.file("scal"));
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(s.file("scal/scaling.csv"));
  CHECK(csv.find("n_test,i_p_nats,i_q_nats,ci_pq_nats") == 0);
  CHECK(csv.find("\n50,") != std::string::npos);
  CHECK(csv.find("\n100,") != std::string::npos);
}

}  // TEST_SUITE
