#include "memlab/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "memlab/distributions.hpp"
#include "memlab/embeddings.hpp"
#include "memlab/linalg.hpp"
#include "memlab/model.hpp"
#include "memlab/optim.hpp"
#include "memlab/oracle.hpp"
#include "memlab/spectra.hpp"

namespace memlab::harness {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string cell(double v) { return std::isnan(v) ? std::string() : fmt(v); }

embeddings::EmbeddingPair build_embeddings(const std::string& kind, int k, std::uint64_t seed) {
    if (kind == "identity") return embeddings::identity_embeddings(k);
    if (kind == "coupled_rotation") return embeddings::coupled_embeddings(k);
    if (kind == "random_orthonormal") return embeddings::random_orthonormal(k, seed);
    throw ConfigError("embedding_kind: unknown kind '" + kind + "'");
}

model::MemoryProblem build_problem(const ExperimentConfig& c, std::uint64_t seed) {
    return model::make_problem(build_embeddings(c.embedding_kind, c.k, seed),
                               distributions::two_class_distribution(c.k, c.l, c.alpha));
}

optim::OptimizerKind optimizer_of(const ExperimentConfig& c) {
    const auto kind = optim::parse_kind(c.optimizer_kind);
    if (!kind) throw ConfigError("optimizer_kind: unknown optimizer '" + c.optimizer_kind + "'");
    return *kind;
}

void fill_spectrum_metrics(ResultRow& row, const std::vector<double>& sigma) {
    const spectra::SpectrumMetrics m = spectra::spectrum_metrics(sigma);
    row.h_norm = m.h_norm;
    row.erank = m.erank;
    row.top10e = m.top_e.at(10);
    row.q_ratio = m.q_ratio;
}

std::vector<ResultRow> run_onestep(const ExperimentConfig& c) {
    const optim::OptimizerKind kind = optimizer_of(c);
    std::vector<ResultRow> rows;
    for (std::uint64_t seed : c.seeds) {
        const model::MemoryProblem problem = build_problem(c, seed);
        const Matrix w0(c.k, c.k);
        const optim::OneStepSweep sweep = optim::make_one_step_sweep(problem, w0, kind);

        ResultRow row;
        row.experiment = c.experiment;
        row.seed = static_cast<long long>(seed);
        row.step = 1;
        if (c.eta > 0.0) {
            row.eta = c.eta;
        } else {
            const optim::EtaSearch search = optim::min_eta_for_target(sweep, c.eps);
            row.eta = search.eta;
            double rho = sweep.eval(search.eta).min_prob;
            const double target = 1.0 - c.eps;
            for (int i = 1; i <= 64 * c.grid_decades; ++i) {
                const double eta = search.eta * std::pow(10.0, i / 64.0);
                const model::Diagnostics d = sweep.eval(eta);
                if (d.max_prob >= target) rho = std::min(rho, d.min_prob);
            }
            row.rho = rho;
        }
        const model::Diagnostics d = sweep.eval(row.eta);
        row.loss = d.loss;
        row.delta = d.delta();
        row.min_prob = d.min_prob;
        row.max_prob = d.max_prob;
        fill_spectrum_metrics(row, linalg::singular_spectrum(sweep.direction));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> run_multistep(const ExperimentConfig& c) {
    if (!(c.eta > 0.0)) throw ConfigError("eta: multistep requires a positive step size");
    const optim::OptimizerKind kind = optimizer_of(c);
    std::vector<ResultRow> rows;
    for (std::uint64_t seed : c.seeds) {
        const model::MemoryProblem problem = build_problem(c, seed);
        const Matrix w0(c.k, c.k);
        optim::MultiStepOptions options;
        options.record_update_spectrum = true;
        const auto records =
            optim::multi_step(problem, w0, kind, optim::Schedule::constant(c.eta, c.steps),
                              optim::OptimizerParams{}, options);
        for (const optim::TrajectoryRecord& rec : records) {
            ResultRow row;
            row.experiment = c.experiment;
            row.seed = static_cast<long long>(seed);
            row.step = rec.step;
            row.eta = c.eta;
            row.loss = rec.loss;
            row.delta = rec.delta;
            row.min_prob = rec.min_prob;
            row.max_prob = rec.max_prob;
            if (rec.update_spectrum) fill_spectrum_metrics(row, *rec.update_spectrum);
            rows.push_back(std::move(row));
        }
        bool reachable = false;
        for (const auto& rec : records) reachable |= rec.max_prob >= 1.0 - c.eps;
        if (reachable && !rows.empty()) {
            rows.back().rho = optim::rho_trajectory(records, c.eps);
        }
    }
    return rows;
}

std::vector<ResultRow> run_spectra(const ExperimentConfig& c) {
    if (c.matrix_path.empty()) throw ConfigError("matrix_path: spectra requires an input dump");
    json doc;
    try {
        doc = json::parse(read_file(c.matrix_path));
    } catch (const json::exception& e) {
        throw ConfigError("matrix_path: cannot parse '" + c.matrix_path + "': " + e.what());
    }
    if (!doc.contains("rows") || !doc.contains("cols") || !doc.contains("values")) {
        throw ConfigError("matrix_path: dump must contain rows, cols, values");
    }
    Matrix a(doc["rows"].get<int>(), doc["cols"].get<int>());
    const auto values = doc["values"].get<std::vector<double>>();
    if (values.size() != a.values.size()) {
        throw ConfigError("matrix_path: values length does not match rows * cols");
    }
    a.values = values;
    ResultRow row;
    row.experiment = c.experiment;
    fill_spectrum_metrics(row, linalg::singular_spectrum(a));
    return {row};
}

// --- oracle cross-check suite ---------------------------------------------

Matrix block_constant_matrix(double a, double b, double c11, double c12, double c21, double c22,
                             int l, int k) {
    Matrix x(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double c = i < l ? (j < l ? c11 : c12) : (j < l ? c21 : c22);
            x(i, j) = c + (i == j ? (i < l ? a : b) : 0.0);
        }
    }
    return x;
}

double spectrum_gap(const std::vector<double>& lhs, const std::vector<double>& rhs) {
    double gap = std::fabs(static_cast<double>(lhs.size()) - static_cast<double>(rhs.size()));
    for (std::size_t i = 0; i < std::min(lhs.size(), rhs.size()); ++i) {
        gap = std::max(gap, std::fabs(lhs[i] - rhs[i]));
    }
    return gap;
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (double& v : m.values) v = normal(gen);
    return m;
}

std::vector<OracleCheck> run_oracle_checks() {
    std::vector<OracleCheck> checks;
    const auto record = [&](const std::string& name, double value, double threshold) {
        checks.push_back({name, value <= threshold, value, threshold});
    };

    {
        const oracle::TwoClassParams params{99, 20, 0.8};
        double worst = 0.0;
        for (const std::string kind : {"identity", "coupled_rotation", "random_orthonormal"}) {
            const embeddings::EmbeddingPair emb = build_embeddings(kind, 99, 7);
            const auto problem = model::make_problem(
                emb, distributions::two_class_distribution(99, 20, 0.8));
            const Matrix diff =
                model::gradient(problem, Matrix(99, 99)) - oracle::gradient_at_zero(params, emb);
            worst = std::max(worst, max_abs_entry(diff));
        }
        record("gradient_closed_form_entrywise", worst, 1e-12);
    }
    {
        const oracle::TwoClassParams params{100, 20, 0.8};
        const double eps = 0.1;
        const auto problem = model::make_problem(
            embeddings::identity_embeddings(100),
            distributions::two_class_distribution(100, 20, 0.8));
        const optim::OneStepSweep sweep =
            optim::make_one_step_sweep(problem, Matrix(100, 100), optim::OptimizerKind::gd);
        const double eta_formula = oracle::gd_eta(params, eps);
        const double eta_search = optim::min_eta_for_target(sweep, eps).eta;
        record("gd_eta_cross_check", std::fabs(eta_search - eta_formula) / eta_formula, 1e-6);
        const double measured = sweep.eval(eta_formula).min_prob;
        const double formula = oracle::gd_min_prob(params, eps);
        record("gd_min_prob_cross_check", std::fabs(measured - formula) / formula, 1e-6);
    }
    {
        const oracle::TwoClassParams params{60, 12, 0.8};
        double worst = 0.0;
        for (const std::string kind : {"identity", "coupled_rotation", "random_orthonormal"}) {
            const embeddings::EmbeddingPair emb = build_embeddings(kind, 60, 11);
            const auto problem = model::make_problem(
                emb, distributions::two_class_distribution(60, 12, 0.8));
            const Matrix numeric = optim::update_direction(
                optim::OptimizerKind::muon_exact, model::gradient(problem, Matrix(60, 60)));
            const Matrix closed = oracle::muon_update_closed_form(params, emb);
            worst = std::max(worst,
                             frobenius_norm(numeric - closed) / frobenius_norm(closed));
        }
        record("muon_closed_form_frobenius", worst, 1e-8);
    }
    {
        std::mt19937_64 gen(2026);
        std::uniform_real_distribution<double> ab(0.5, 2.0);
        std::uniform_int_distribution<int> ksize(8, 40);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int k = ksize(gen);
            const int l = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(k - 1));
            const double a = ab(gen);
            const double b = ab(gen);
            const Matrix x = block_constant_matrix(a, b, -a / k, -b / k, -a / k, -b / k, l, k);
            worst = std::max(worst, spectrum_gap(oracle::svd_simp(a, b, l, k).s,
                                                 linalg::singular_spectrum(x)));
        }
        record("svd_simp_vs_numeric", worst, 1e-9);
        worst = 0.0;
        std::uniform_real_distribution<double> cdist(-0.05, 0.05);
        for (int trial = 0; trial < 20; ++trial) {
            const int k = ksize(gen);
            const int l = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(k - 1));
            const double a = ab(gen);
            const double b = ab(gen);
            const double c11 = cdist(gen), c12 = cdist(gen), c21 = cdist(gen), c22 = cdist(gen);
            const Matrix x = block_constant_matrix(a, b, c11, c12, c21, c22, l, k);
            worst = std::max(
                worst, spectrum_gap(oracle::svd_block_constant(a, b, c11, c12, c21, c22, l, k).s,
                                    linalg::singular_spectrum(x)));
        }
        record("svd_block_constant_vs_numeric", worst, 1e-9);
    }
    {
        const oracle::AdamAdversarial adv = oracle::adam_adversarial();
        const double printed_sum[9] = {1.46552253,  1.0132908,  -0.11179563,
                                       -0.0732561,  1.00709257, -1.26935805,
                                       0.0544114,   0.89611102, 1.54147329};
        const double printed_b[9] = {-0.19288146, -1.24460331, -1.4058011,
                                     -0.20112175, -1.2977753,  -1.46585978,
                                     -0.12780259, -0.82466989, -0.93147899};
        double worst = 0.0;
        for (int i = 0; i < 9; ++i) {
            worst = std::max(worst, std::fabs(adv.rotated_sum.values[i] - printed_sum[i]));
            worst = std::max(worst, std::fabs(adv.rotated_b.values[i] - printed_b[i]));
        }
        record("adam_rotated_matrices", worst, 1e-6);
        record("adam_singular_ratio", oracle::adam_singular_ratio(), 0.25);
        record("adam_singular_values_vs_numeric",
               spectrum_gap(oracle::singular_values_3x3(adv.a_mat),
                            linalg::singular_spectrum(adv.a_mat)),
               1e-10);
    }
    {
        std::mt19937_64 gen(99);
        double worst_sign = 0.0, worst_muon = 0.0, worst_ns = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix g = random_matrix(12, 12, gen);
            double l1 = 0.0;
            for (double v : g.values) l1 += std::fabs(v);
            const double pair_sign = frobenius_inner(
                g, optim::update_direction(optim::OptimizerKind::sign_gd, g));
            worst_sign = std::max(worst_sign, std::fabs(pair_sign - l1) / l1);

            double nuclear = 0.0;
            for (double s : linalg::singular_spectrum(g)) nuclear += s;
            const Matrix muon_dir =
                optim::update_direction(optim::OptimizerKind::muon_exact, g);
            const double pair_muon = frobenius_inner(g, muon_dir);
            worst_muon = std::max(worst_muon, std::fabs(pair_muon - nuclear) / nuclear);

            // conditioned input: rebuild g with singular values in [0.1, 1],
            // the regime where the default iteration count converges
            linalg::SvdFactors f = linalg::svd(g);
            std::uniform_real_distribution<double> sig(0.1, 1.0);
            for (double& s : f.s) s = sig(gen);
            const Matrix cond = f.reconstruct();
            const Matrix ns = linalg::newton_schulz(cond);
            worst_ns = std::max(
                worst_ns,
                frobenius_norm(
                    ns - optim::update_direction(optim::OptimizerKind::muon_exact, cond)));
        }
        record("dual_norm_sign", worst_sign, 1e-9);
        record("dual_norm_muon", worst_muon, 1e-8);
        record("newton_schulz_vs_exact", worst_ns, 1e-2);
    }
    return checks;
}

std::string checks_to_json(const std::vector<OracleCheck>& checks, bool passed) {
    json doc;
    doc["passed"] = passed;
    doc["checks"] = json::array();
    for (const OracleCheck& c : checks) {
        doc["checks"].push_back({{"name", c.name},
                                 {"passed", c.passed},
                                 {"value", c.value},
                                 {"threshold", c.threshold}});
    }
    return doc.dump(2) + "\n";
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (doc.contains("preset")) c = preset(doc["preset"].get<std::string>());
    try {
        if (doc.contains("experiment")) c.experiment = doc["experiment"].get<std::string>();
        if (doc.contains("k")) c.k = doc["k"].get<int>();
        if (doc.contains("l")) c.l = doc["l"].get<int>();
        if (doc.contains("alpha")) c.alpha = doc["alpha"].get<double>();
        if (doc.contains("eps")) c.eps = doc["eps"].get<double>();
        if (doc.contains("embedding_kind")) {
            c.embedding_kind = doc["embedding_kind"].get<std::string>();
        }
        if (doc.contains("optimizer_kind")) {
            c.optimizer_kind = doc["optimizer_kind"].get<std::string>();
        }
        if (doc.contains("seeds")) c.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
        if (doc.contains("steps")) c.steps = doc["steps"].get<int>();
        if (doc.contains("eta")) c.eta = doc["eta"].get<double>();
        if (doc.contains("grid_decades")) c.grid_decades = doc["grid_decades"].get<int>();
        if (doc.contains("matrix_path")) c.matrix_path = doc["matrix_path"].get<std::string>();
        if (doc.contains("out")) c.out = doc["out"].get<std::string>();
        if (doc.contains("format")) c.format = doc["format"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad field type: ") + e.what());
    }
    return c;
}

std::string ExperimentConfig::to_json_text() const {
    json doc;
    doc["experiment"] = experiment;
    doc["k"] = k;
    doc["l"] = l;
    doc["alpha"] = alpha;
    doc["eps"] = eps;
    doc["embedding_kind"] = embedding_kind;
    doc["optimizer_kind"] = optimizer_kind;
    doc["seeds"] = seeds;
    doc["steps"] = steps;
    doc["eta"] = eta;
    doc["grid_decades"] = grid_decades;
    doc["matrix_path"] = matrix_path;
    doc["out"] = out;
    doc["format"] = format;
    return doc.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
    ExperimentConfig c;
    if (name == "toy-one-step") {
        c.experiment = "onestep";
        c.k = 999;
        c.l = 199;
    } else if (name == "toy-one-step-small") {
        c.experiment = "onestep";
        c.k = 99;
        c.l = 20;
    } else if (name == "toy-multi-step") {
        c.experiment = "multistep";
        c.k = 999;
        c.l = 199;
        c.eta = 0.2;
        c.steps = 50;
    } else if (name == "toy-multi-step-small") {
        c.experiment = "multistep";
        c.k = 99;
        c.l = 20;
        c.eta = 0.6;
        c.steps = 20;
    } else if (name == "oracle-suite") {
        c.experiment = "oracle";
    } else {
        throw ConfigError("preset: unknown preset '" + name + "'");
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (experiment != "onestep" && experiment != "multistep" && experiment != "oracle" &&
        experiment != "spectra") {
        throw ConfigError("experiment: must be onestep, multistep, oracle, or spectra");
    }
    if (experiment == "oracle" || experiment == "spectra") return;
    if (k < 2) throw ConfigError("k: must be >= 2");
    if (l < 1 || l >= k) throw ConfigError("l: need 1 <= l < k");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha: must be in (0, 1)");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps: must be in (0, 1)");
    if (seeds.empty()) throw ConfigError("seeds: need at least one seed");
    if (experiment == "multistep" && steps < 1) throw ConfigError("steps: must be >= 1");
    if (eta < 0.0) throw ConfigError("eta: must be >= 0");
    if (grid_decades < 1) throw ConfigError("grid_decades: must be >= 1");
    if (!optim::parse_kind(optimizer_kind)) {
        throw ConfigError("optimizer_kind: unknown optimizer '" + optimizer_kind + "'");
    }
    if (embedding_kind != "identity" && embedding_kind != "coupled_rotation" &&
        embedding_kind != "random_orthonormal") {
        throw ConfigError("embedding_kind: unknown kind '" + embedding_kind + "'");
    }
    if (embedding_kind == "coupled_rotation" && k % 3 != 0) {
        throw ConfigError("k: coupled_rotation requires k divisible by 3");
    }
    if (format != "csv" && format != "json") throw ConfigError("format: must be csv or json");
}

const std::string& csv_header() {
    static const std::string header =
        "experiment,seed,step,eta,loss,delta,min_prob,max_prob,rho,h_norm,erank,top10e,q_ratio";
    return header;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << csv_header() << "\n";
    for (const ResultRow& r : rows) {
        out << r.experiment << ',' << (r.seed >= 0 ? std::to_string(r.seed) : std::string())
            << ',' << r.step << ',' << cell(r.eta) << ',' << cell(r.loss) << ','
            << cell(r.delta) << ',' << cell(r.min_prob) << ',' << cell(r.max_prob) << ','
            << cell(r.rho) << ',' << cell(r.h_norm) << ',' << cell(r.erank) << ','
            << cell(r.top10e) << ',' << cell(r.q_ratio) << "\n";
    }
    return out.str();
}

namespace {

void set_if_finite(json& obj, const char* key, double v) {
    if (!std::isnan(v)) obj[key] = v;
}

} // namespace

std::string to_json_rows(const std::vector<ResultRow>& rows) {
    json arr = json::array();
    for (const ResultRow& r : rows) {
        json obj;
        obj["experiment"] = r.experiment;
        if (r.seed >= 0) obj["seed"] = r.seed;
        obj["step"] = r.step;
        set_if_finite(obj, "eta", r.eta);
        set_if_finite(obj, "loss", r.loss);
        set_if_finite(obj, "delta", r.delta);
        set_if_finite(obj, "min_prob", r.min_prob);
        set_if_finite(obj, "max_prob", r.max_prob);
        set_if_finite(obj, "rho", r.rho);
        set_if_finite(obj, "h_norm", r.h_norm);
        set_if_finite(obj, "erank", r.erank);
        set_if_finite(obj, "top10e", r.top10e);
        set_if_finite(obj, "q_ratio", r.q_ratio);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

std::vector<ResultRow> rows_from_json(const std::string& text) {
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("rows: invalid JSON: ") + e.what());
    }
    std::vector<ResultRow> rows;
    for (const json& obj : arr) {
        ResultRow r;
        r.experiment = obj.value("experiment", std::string());
        r.seed = obj.contains("seed") ? obj["seed"].get<long long>() : -1;
        r.step = obj.value("step", 0);
        const auto get = [&](const char* key, double& slot) {
            if (obj.contains(key)) slot = obj[key].get<double>();
        };
        get("eta", r.eta);
        get("loss", r.loss);
        get("delta", r.delta);
        get("min_prob", r.min_prob);
        get("max_prob", r.max_prob);
        get("rho", r.rho);
        get("h_norm", r.h_norm);
        get("erank", r.erank);
        get("top10e", r.top10e);
        get("q_ratio", r.q_ratio);
        rows.push_back(std::move(r));
    }
    return rows;
}

RunResult run(const ExperimentConfig& config) {
    config.validate();
    RunResult result;
    if (config.experiment == "onestep") {
        result.rows = run_onestep(config);
    } else if (config.experiment == "multistep") {
        result.rows = run_multistep(config);
    } else if (config.experiment == "spectra") {
        result.rows = run_spectra(config);
    } else {
        result.checks = run_oracle_checks();
        for (const OracleCheck& c : result.checks) result.checks_passed &= c.passed;
        result.report_json = checks_to_json(result.checks, result.checks_passed);
    }
    return result;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace memlab::harness
