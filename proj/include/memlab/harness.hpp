#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace memlab::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCheck = 2;
inline constexpr int kExitIo = 3;

struct ExperimentConfig {
    std::string experiment; // onestep | multistep | oracle | spectra
    int k = 999;
    int l = 199;
    double alpha = 0.8;
    double eps = 0.1;
    std::string embedding_kind = "identity";
    std::string optimizer_kind = "muon_exact";
    std::vector<std::uint64_t> seeds = {0};
    int steps = 50;
    double eta = 0.0; // 0 means "search eta*" (onestep only)
    int grid_decades = 3;
    std::string matrix_path; // spectra input: JSON {rows, cols, values}
    std::string out;         // empty -> stdout
    std::string format = "csv"; // csv | json

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig preset(const std::string& name);
    std::string to_json_text() const;
    void validate() const; // throws ConfigError with the offending field
};

struct ResultRow {
    std::string experiment;
    long long seed = -1; // -1 renders as an empty cell
    int step = 0;
    double eta = std::numeric_limits<double>::quiet_NaN();
    double loss = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN();
    double min_prob = std::numeric_limits<double>::quiet_NaN();
    double max_prob = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    double h_norm = std::numeric_limits<double>::quiet_NaN();
    double erank = std::numeric_limits<double>::quiet_NaN();
    double top10e = std::numeric_limits<double>::quiet_NaN();
    double q_ratio = std::numeric_limits<double>::quiet_NaN();
};

const std::string& csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json_rows(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const std::string& text);

struct OracleCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;     // measured discrepancy or quantity
    double threshold = 0.0; // what it was compared against
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<OracleCheck> checks; // oracle experiment only
    std::string report_json;         // oracle experiment only
    bool checks_passed = true;
};

// Runs the configured experiment. Throws ConfigError / IoError; oracle
// failures are reported through checks_passed, not exceptions.
RunResult run(const ExperimentConfig& config);

// Writes text to the path, or stdout when the path is empty.
void write_output(const std::string& path, const std::string& text);

std::string read_file(const std::string& path);

} // namespace memlab::harness
