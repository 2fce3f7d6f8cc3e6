#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "memlab/harness.hpp"

using namespace memlab;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/memlab_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("config validation catches field errors") {
    harness::ExperimentConfig c;
    c.experiment = "onestep";
    c.k = 10;
    c.l = 2;
    CHECK_NOTHROW(c.validate());

    c.l = 10;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("l:"), harness::ConfigError);
    c.l = 2;
    c.optimizer_kind = "sgd";
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("optimizer_kind"),
                         harness::ConfigError);
    c.optimizer_kind = "gd";
    c.experiment = "multistep";
    c.steps = 0; // the empty-schedule case
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("steps"), harness::ConfigError);
    c.steps = 5;
    c.experiment = "train";
    CHECK_THROWS_AS(c.validate(), harness::ConfigError);
}

TEST_CASE("config round-trips through json") {
    harness::ExperimentConfig c;
    c.experiment = "multistep";
    c.k = 33;
    c.l = 7;
    c.alpha = 0.75;
    c.eps = 0.2;
    c.embedding_kind = "coupled_rotation";
    c.optimizer_kind = "muon_ns";
    c.seeds = {3, 9};
    c.steps = 12;
    c.eta = 0.25;
    c.format = "json";
    const auto back = harness::ExperimentConfig::from_json_text(c.to_json_text());
    CHECK(back.experiment == c.experiment);
    CHECK(back.k == c.k);
    CHECK(back.l == c.l);
    CHECK(back.alpha == c.alpha);
    CHECK(back.eps == c.eps);
    CHECK(back.embedding_kind == c.embedding_kind);
    CHECK(back.optimizer_kind == c.optimizer_kind);
    CHECK(back.seeds == c.seeds);
    CHECK(back.steps == c.steps);
    CHECK(back.eta == c.eta);
    CHECK(back.format == c.format);

    CHECK_THROWS_AS(harness::ExperimentConfig::from_json_text("{not json"),
                    harness::ConfigError);
}

TEST_CASE("presets encode the toy settings") {
    const auto one = harness::ExperimentConfig::preset("toy-one-step");
    CHECK(one.experiment == "onestep");
    CHECK(one.k == 999);
    CHECK(one.l == 199);
    CHECK(one.alpha == 0.8);
    CHECK(one.eps == 0.1);

    const auto multi = harness::ExperimentConfig::preset("toy-multi-step");
    CHECK(multi.experiment == "multistep");
    CHECK(multi.steps == 50);
    CHECK(multi.eta > 0.0);

    CHECK_THROWS_AS(harness::ExperimentConfig::preset("nope"), harness::ConfigError);
}

TEST_CASE("csv schema is fixed") {
    CHECK(harness::csv_header() ==
          "experiment,seed,step,eta,loss,delta,min_prob,max_prob,rho,h_norm,erank,top10e,"
          "q_ratio");
    CHECK(harness::to_csv({}) == harness::csv_header() + "\n");

    harness::ResultRow row;
    row.experiment = "onestep";
    row.seed = 3;
    row.step = 1;
    row.eta = 2.0;
    const std::string text = harness::to_csv({row});
    CHECK(text.find("onestep,3,1,2,") != std::string::npos);
    // NaN columns render as empty cells
    CHECK(text.find("nan") == std::string::npos);
}

TEST_CASE("result rows round-trip through json") {
    harness::ResultRow row;
    row.experiment = "multistep";
    row.seed = 5;
    row.step = 7;
    row.eta = 0.25;
    row.loss = 1.5;
    row.min_prob = 0.125;
    row.max_prob = 0.5;
    const auto back = harness::rows_from_json(harness::to_json_rows({row}));
    REQUIRE(back.size() == 1);
    CHECK(back[0].experiment == row.experiment);
    CHECK(back[0].seed == row.seed);
    CHECK(back[0].step == row.step);
    CHECK(back[0].eta == row.eta);
    CHECK(back[0].loss == row.loss);
    CHECK(back[0].min_prob == row.min_prob);
    CHECK(std::isnan(back[0].rho)); // absent column stays absent
}

TEST_CASE("onestep run produces a filled row") {
    harness::ExperimentConfig c;
    c.experiment = "onestep";
    c.k = 30;
    c.l = 6;
    c.optimizer_kind = "gd";
    const auto result = harness::run(c);
    REQUIRE(result.rows.size() == 1);
    const auto& row = result.rows[0];
    CHECK(row.max_prob == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(row.eta > 0.0);
    CHECK(row.rho > 0.0);
    CHECK(row.h_norm > 0.0);
}

TEST_CASE("runs are deterministic byte for byte") {
    harness::ExperimentConfig c;
    c.experiment = "onestep";
    c.k = 30;
    c.l = 6;
    c.embedding_kind = "random_orthonormal";
    c.seeds = {1, 2};
    const std::string a = harness::to_csv(harness::run(c).rows);
    const std::string b = harness::to_csv(harness::run(c).rows);
    CHECK(a == b);
    CHECK(a.find("onestep,1,") != std::string::npos);
    CHECK(a.find("onestep,2,") != std::string::npos);
}

TEST_CASE("multistep run emits one row per step and a final rho") {
    harness::ExperimentConfig c;
    c.experiment = "multistep";
    c.k = 30;
    c.l = 6;
    c.optimizer_kind = "muon_exact";
    c.eta = 1.0;
    c.steps = 12;
    const auto result = harness::run(c);
    REQUIRE(result.rows.size() == 12);
    for (int i = 0; i < 12; ++i) CHECK(result.rows[i].step == i + 1);
    CHECK(!std::isnan(result.rows.back().rho));

    c.eta = 0.0;
    CHECK_THROWS_AS(harness::run(c), harness::ConfigError);
}

TEST_CASE("spectra run reads a matrix dump") {
    TempFile dump("matrix.json");
    {
        std::ofstream out(dump.path);
        out << R"({"rows": 2, "cols": 2, "values": [3.0, 0.0, 0.0, 4.0]})";
    }
    harness::ExperimentConfig c;
    c.experiment = "spectra";
    c.matrix_path = dump.path;
    const auto result = harness::run(c);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].erank == doctest::Approx(1.9221).epsilon(0.001));

    c.matrix_path = "/nonexistent/memlab.json";
    CHECK_THROWS_AS(harness::run(c), harness::IoError);
}

TEST_CASE("oracle suite passes and reports json") {
    harness::ExperimentConfig c;
    c.experiment = "oracle";
    const auto result = harness::run(c);
    CHECK(result.checks_passed);
    CHECK(result.checks.size() >= 10);
    for (const auto& check : result.checks) {
        INFO(check.name, ": ", check.value, " vs ", check.threshold);
        CHECK(check.passed);
    }
    CHECK(result.report_json.find("\"passed\": true") != std::string::npos);
}

TEST_CASE("output writing honors paths") {
    TempFile out("rows.csv");
    harness::write_output(out.path, "hello\n");
    std::ifstream in(out.path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");
    CHECK_THROWS_AS(harness::write_output("/nonexistent/dir/file.csv", "x"), harness::IoError);
}
