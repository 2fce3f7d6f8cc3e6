#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memlab/linalg.hpp"
#include "memlab/model.hpp"

namespace memlab::optim {

enum class OptimizerKind { gd, sign_gd, muon_exact, muon_ns, muon_momentum, adam_full };

const char* kind_name(OptimizerKind k);
std::optional<OptimizerKind> parse_kind(const std::string& name);

struct OptimizerParams {
    double momentum = 0.95;       // muon_momentum
    double beta1 = 0.9;           // adam_full
    double beta2 = 0.999;         // adam_full
    double eps_adam = 1e-8;       // adam_full
    int ns_iterations = 14;       // muon_ns
    double rank_tolerance = linalg::kDefaultRankTolerance;
};

// Stateless update direction for gd / sign_gd / muon_exact / muon_ns.
// Muon variants map a zero gradient to a zero direction.
Matrix update_direction(OptimizerKind kind, const Matrix& grad,
                        const OptimizerParams& params = {});

Matrix one_step(const model::MemoryProblem& problem, const Matrix& w0, OptimizerKind kind,
                double eta, const OptimizerParams& params = {});

// One-step sweeps: the update direction is fixed, so the logits are affine
// in eta and each evaluation is O(K^2).
struct OneStepSweep {
    Matrix direction;
    Matrix base_logits; // E~^T W0 E
    Matrix dir_logits;  // E~^T direction E
    std::vector<double> p;

    model::Diagnostics eval(double eta) const;
};

OneStepSweep make_one_step_sweep(const model::MemoryProblem& problem, const Matrix& w0,
                                 OptimizerKind kind, const OptimizerParams& params = {});

struct EtaSearch {
    double eta = 0.0;
    // false when the coarse 64-points-per-decade scan found the feasible
    // set {eta : max prob >= 1 - eps} broken into disjoint pieces
    bool feasible_set_is_interval = true;
};

// Smallest eta with max_k correct prob >= 1 - eps (exponential bracketing,
// then bisection to relative width 1e-10). Throws if unreachable for
// eta <= 1e9.
EtaSearch min_eta_for_target(const OneStepSweep& sweep, double eps);
EtaSearch min_eta_for_target(const model::MemoryProblem& problem, const Matrix& w0,
                             OptimizerKind kind, double eps,
                             const OptimizerParams& params = {});

struct RhoResult {
    double rho_grid = 0.0;     // infimum of min prob over the feasible grid
    double rho_at_eta_star = 0.0;
    double eta_star = 0.0;
    bool feasible_set_is_interval = true;
};

// Eq-style infimum over a log grid [eta*, 10^decades * eta*], 64 points
// per decade, restricted to points where the max-prob condition holds.
RhoResult rho_one_step_detail(const model::MemoryProblem& problem, const Matrix& w0,
                              OptimizerKind kind, double eps, int eta_grid_decades = 3,
                              const OptimizerParams& params = {});
double rho_one_step(const model::MemoryProblem& problem, const Matrix& w0, OptimizerKind kind,
                    double eps, int eta_grid_decades = 3, const OptimizerParams& params = {});

struct Schedule {
    std::vector<double> etas;

    static Schedule constant(double eta, int steps);
};

struct TrajectoryRecord {
    int step = 0;
    double loss = 0.0;
    double delta = 0.0;
    double min_prob = 0.0;
    double max_prob = 0.0;
    std::optional<std::vector<double>> update_spectrum;
};

struct MultiStepOptions {
    bool record_update_spectrum = false;
    std::vector<Matrix>* states = nullptr; // receives W_1..W_T when set
};

std::vector<TrajectoryRecord> multi_step(const model::MemoryProblem& problem, const Matrix& w0,
                                         OptimizerKind kind, const Schedule& schedule,
                                         const OptimizerParams& params = {},
                                         const MultiStepOptions& options = {});

// Infimum of min_prob over records whose max_prob reaches 1 - eps.
double rho_trajectory(const std::vector<TrajectoryRecord>& records, double eps);

// Stateful variants (Muon momentum accumulator / full Adam moments).
struct MomentumState {
    Matrix buffer; // Muon accumulator B_t
    Matrix m;      // Adam first moment
    Matrix v;      // Adam second moment
    long long t = 0;
};

Matrix momentum_update(MomentumState& state, OptimizerKind kind, const Matrix& grad,
                       const OptimizerParams& params = {});

} // namespace memlab::optim
