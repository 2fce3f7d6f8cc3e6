#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memlab/harness.hpp"

namespace {

using memlab::harness::ExperimentConfig;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        seeds.push_back(std::stoull(item));
    }
    if (seeds.empty()) throw memlab::harness::ConfigError("seeds: empty list");
    return seeds;
}

struct Flags {
    std::string config_path;
    std::string preset;
    int k = -1;
    int l = -1;
    double alpha = -1.0;
    double eps = -1.0;
    std::string optimizer;
    std::string embeddings;
    std::string seeds;
    int steps = -1;
    double eta = -1.0;
    int grid_decades = -1;
    std::string matrix_path;
    std::string out;
    std::string format;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--preset", f.preset, "named experiment preset");
    cmd->add_option("--k", f.k, "number of classes K");
    cmd->add_option("--l", f.l, "head size L");
    cmd->add_option("--alpha", f.alpha, "head probability mass");
    cmd->add_option("--eps", f.eps, "target slack epsilon");
    cmd->add_option("--optimizer", f.optimizer, "gd|sign_gd|muon_exact|muon_ns|muon_momentum|adam_full");
    cmd->add_option("--embeddings", f.embeddings, "identity|coupled_rotation|random_orthonormal");
    cmd->add_option("--seeds", f.seeds, "comma-separated seed list");
    cmd->add_option("--steps", f.steps, "multistep schedule length");
    cmd->add_option("--eta", f.eta, "step size (onestep: 0 searches eta*)");
    cmd->add_option("--grid-decades", f.grid_decades, "eta grid decades past eta*");
    cmd->add_option("--matrix", f.matrix_path, "matrix dump for the spectra command");
    cmd->add_option("--out", f.out, "output path (default stdout)");
    cmd->add_option("--format", f.format, "csv|json");
}

ExperimentConfig build_config(const std::string& experiment, const Flags& f) {
    ExperimentConfig c;
    if (!f.preset.empty()) c = ExperimentConfig::preset(f.preset);
    if (!f.config_path.empty()) {
        c = ExperimentConfig::from_json_text(memlab::harness::read_file(f.config_path));
    }
    c.experiment = experiment;
    if (f.k >= 0) c.k = f.k;
    if (f.l >= 0) c.l = f.l;
    if (f.alpha >= 0.0) c.alpha = f.alpha;
    if (f.eps >= 0.0) c.eps = f.eps;
    if (!f.optimizer.empty()) c.optimizer_kind = f.optimizer;
    if (!f.embeddings.empty()) c.embedding_kind = f.embeddings;
    if (!f.seeds.empty()) c.seeds = parse_seed_list(f.seeds);
    if (f.steps >= 0) c.steps = f.steps;
    if (f.eta >= 0.0) c.eta = f.eta;
    if (f.grid_decades >= 0) c.grid_decades = f.grid_decades;
    if (!f.matrix_path.empty()) c.matrix_path = f.matrix_path;
    if (!f.out.empty()) c.out = f.out;
    if (!f.format.empty()) c.format = f.format;
    return c;
}

int run_command(const std::string& experiment, const Flags& flags) {
    const ExperimentConfig config = build_config(experiment, flags);
    const memlab::harness::RunResult result = memlab::harness::run(config);
    if (experiment == "oracle") {
        memlab::harness::write_output(config.out, result.report_json);
        int passed = 0;
        for (const auto& c : result.checks) passed += c.passed;
        std::cerr << "oracle: " << passed << "/" << result.checks.size() << " checks passed\n";
        if (!result.checks_passed) {
            for (const auto& c : result.checks) {
                if (!c.passed) {
                    std::cerr << "  FAIL " << c.name << ": " << c.value << " > " << c.threshold
                              << "\n";
                }
            }
            return memlab::harness::kExitCheck;
        }
        return memlab::harness::kExitOk;
    }
    const std::string text = config.format == "json"
                                 ? memlab::harness::to_json_rows(result.rows)
                                 : memlab::harness::to_csv(result.rows);
    memlab::harness::write_output(config.out, text);
    if (!config.out.empty()) {
        std::cerr << experiment << ": wrote " << result.rows.size() << " rows to " << config.out
                  << "\n";
    }
    return memlab::harness::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-layer associative-memory optimizer laboratory"};
    app.require_subcommand(1);

    Flags flags;
    const char* names[] = {"onestep", "multistep", "oracle", "spectra"};
    const char* descs[] = {"single-update eta sweeps", "fixed-schedule trajectories",
                           "closed-form cross-check suite", "singular-spectrum metrics"};
    for (int i = 0; i < 4; ++i) add_common_flags(app.add_subcommand(names[i], descs[i]), flags);

    CLI11_PARSE(app, argc, argv);

    const std::string experiment = app.get_subcommands().front()->get_name();
    try {
        return run_command(experiment, flags);
    } catch (const memlab::harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return memlab::harness::kExitConfig;
    } catch (const memlab::harness::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return memlab::harness::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return memlab::harness::kExitConfig;
    }
}
