#include "memlab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace memlab::optim {

namespace {

Matrix sign_matrix(const Matrix& g) {
    Matrix s = g;
    for (double& v : s.values) v = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    return s;
}

} // namespace

const char* kind_name(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::gd: return "gd";
        case OptimizerKind::sign_gd: return "sign_gd";
        case OptimizerKind::muon_exact: return "muon_exact";
        case OptimizerKind::muon_ns: return "muon_ns";
        case OptimizerKind::muon_momentum: return "muon_momentum";
        case OptimizerKind::adam_full: return "adam_full";
    }
    return "?";
}

std::optional<OptimizerKind> parse_kind(const std::string& name) {
    for (OptimizerKind k : {OptimizerKind::gd, OptimizerKind::sign_gd, OptimizerKind::muon_exact,
                            OptimizerKind::muon_ns, OptimizerKind::muon_momentum,
                            OptimizerKind::adam_full}) {
        if (name == kind_name(k)) return k;
    }
    return std::nullopt;
}

Matrix update_direction(OptimizerKind kind, const Matrix& grad, const OptimizerParams& params) {
    std::string diag;
    if (!all_finite(grad, &diag)) throw std::invalid_argument("update_direction: " + diag);
    switch (kind) {
        case OptimizerKind::gd:
            return grad;
        case OptimizerKind::sign_gd:
            return sign_matrix(grad);
        case OptimizerKind::muon_exact:
            if (frobenius_norm(grad) == 0.0) return Matrix(grad.rows, grad.cols);
            return linalg::orthogonal_factor_exact(grad, params.rank_tolerance);
        case OptimizerKind::muon_ns:
            if (frobenius_norm(grad) == 0.0) return Matrix(grad.rows, grad.cols);
            return linalg::newton_schulz(grad, params.ns_iterations);
        default:
            throw std::invalid_argument(
                "update_direction: stateful optimizer; use momentum_update");
    }
}

Matrix one_step(const model::MemoryProblem& problem, const Matrix& w0, OptimizerKind kind,
                double eta, const OptimizerParams& params) {
    if (eta < 0.0) throw std::invalid_argument("one_step: eta must be >= 0");
    const Matrix dir = update_direction(kind, model::gradient(problem, w0), params);
    return w0 - eta * dir;
}

model::Diagnostics OneStepSweep::eval(double eta) const {
    Matrix l = base_logits - eta * dir_logits;
    return model::diagnostics_from_logits(l, p);
}

OneStepSweep make_one_step_sweep(const model::MemoryProblem& problem, const Matrix& w0,
                                 OptimizerKind kind, const OptimizerParams& params) {
    OneStepSweep s;
    s.direction = update_direction(kind, model::gradient(problem, w0), params);
    s.base_logits = model::logits(problem, w0);
    s.dir_logits = model::logits(problem, s.direction);
    s.p = problem.dist.p;
    return s;
}

EtaSearch min_eta_for_target(const OneStepSweep& sweep, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("min_eta_for_target: eps in (0,1)");
    constexpr double kEtaCap = 1e9;
    const double target = 1.0 - eps;
    const auto feasible = [&](double eta) { return sweep.eval(eta).max_prob >= target; };

    EtaSearch result;
    if (feasible(0.0)) {
        result.eta = 0.0;
        return result;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (!feasible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > kEtaCap) throw std::runtime_error("min_eta_for_target: target unreachable");
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) hi = mid;
        else lo = mid;
    }
    result.eta = hi;

    // coarse monotonicity guard past eta*: one decade at 64 points
    bool seen_infeasible = false;
    for (int i = 0; i <= 64; ++i) {
        const double eta = result.eta * std::pow(10.0, static_cast<double>(i) / 64.0);
        const bool ok = feasible(eta);
        if (!ok) seen_infeasible = true;
        if (ok && seen_infeasible) {
            result.feasible_set_is_interval = false;
            break;
        }
    }
    return result;
}

EtaSearch min_eta_for_target(const model::MemoryProblem& problem, const Matrix& w0,
                             OptimizerKind kind, double eps, const OptimizerParams& params) {
    return min_eta_for_target(make_one_step_sweep(problem, w0, kind, params), eps);
}

RhoResult rho_one_step_detail(const model::MemoryProblem& problem, const Matrix& w0,
                              OptimizerKind kind, double eps, int eta_grid_decades,
                              const OptimizerParams& params) {
    if (eta_grid_decades < 1) {
        throw std::invalid_argument("rho_one_step: eta_grid_decades must be >= 1");
    }
    const OneStepSweep sweep = make_one_step_sweep(problem, w0, kind, params);
    const EtaSearch search = min_eta_for_target(sweep, eps);

    RhoResult r;
    r.eta_star = search.eta;
    r.feasible_set_is_interval = search.feasible_set_is_interval;
    r.rho_at_eta_star = sweep.eval(search.eta).min_prob;
    r.rho_grid = r.rho_at_eta_star;
    if (search.eta == 0.0) return r; // degenerate: already at target before any update

    const double target = 1.0 - eps;
    const int points = 64 * eta_grid_decades;
    for (int i = 1; i <= points; ++i) {
        const double eta = search.eta * std::pow(10.0, static_cast<double>(i) / 64.0);
        const model::Diagnostics d = sweep.eval(eta);
        if (d.max_prob >= target && d.min_prob < r.rho_grid) r.rho_grid = d.min_prob;
    }
    return r;
}

double rho_one_step(const model::MemoryProblem& problem, const Matrix& w0, OptimizerKind kind,
                    double eps, int eta_grid_decades, const OptimizerParams& params) {
    return rho_one_step_detail(problem, w0, kind, eps, eta_grid_decades, params).rho_grid;
}

Schedule Schedule::constant(double eta, int steps) {
    if (steps < 1) throw std::invalid_argument("Schedule::constant: steps must be >= 1");
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("Schedule::constant: eta must be positive and finite");
    }
    Schedule s;
    s.etas.assign(static_cast<std::size_t>(steps), eta);
    return s;
}

std::vector<TrajectoryRecord> multi_step(const model::MemoryProblem& problem, const Matrix& w0,
                                         OptimizerKind kind, const Schedule& schedule,
                                         const OptimizerParams& params,
                                         const MultiStepOptions& options) {
    if (schedule.etas.empty()) throw std::invalid_argument("multi_step: empty schedule");
    std::vector<TrajectoryRecord> records;
    records.reserve(schedule.etas.size());
    Matrix w = w0;
    MomentumState state;
    int step = 0;
    for (double eta : schedule.etas) {
        ++step;
        const Matrix grad = model::gradient(problem, w);
        Matrix dir;
        std::optional<std::vector<double>> spectrum;
        if (kind == OptimizerKind::muon_momentum || kind == OptimizerKind::adam_full) {
            dir = momentum_update(state, kind, grad, params);
        } else if (kind == OptimizerKind::muon_exact && options.record_update_spectrum) {
            // reuse the factorization: the exact orthogonal factor has
            // rank-many unit singular values and zeros elsewhere
            const int nmin = std::min(grad.rows, grad.cols);
            spectrum.emplace(static_cast<std::size_t>(nmin), 0.0);
            if (frobenius_norm(grad) == 0.0) {
                dir = Matrix(grad.rows, grad.cols);
            } else {
                const linalg::SvdFactors f = linalg::svd(grad, params.rank_tolerance);
                dir = linalg::orthogonal_from_factors(f);
                std::fill_n(spectrum->begin(), f.rank(), 1.0);
            }
        } else {
            dir = update_direction(kind, grad, params);
        }
        w = w - eta * dir;
        if (!all_finite(w)) {
            throw std::runtime_error("multi_step: non-finite state at step " +
                                     std::to_string(step));
        }
        const model::Diagnostics d =
            model::diagnostics_from_logits(model::logits(problem, w), problem.dist.p);
        TrajectoryRecord rec;
        rec.step = step;
        rec.loss = d.loss;
        rec.min_prob = d.min_prob;
        rec.max_prob = d.max_prob;
        rec.delta = d.delta();
        if (options.record_update_spectrum) {
            rec.update_spectrum =
                spectrum ? std::move(*spectrum) : linalg::singular_spectrum(dir);
        }
        records.push_back(std::move(rec));
        if (options.states) options.states->push_back(w);
    }
    return records;
}

double rho_trajectory(const std::vector<TrajectoryRecord>& records, double eps) {
    if (records.empty()) throw std::invalid_argument("rho_trajectory: no records");
    const double target = 1.0 - eps;
    bool met = false;
    double rho = 1.0;
    for (const TrajectoryRecord& r : records) {
        if (r.max_prob >= target) {
            met = true;
            rho = std::min(rho, r.min_prob);
        }
    }
    if (!met) throw std::runtime_error("rho_trajectory: condition never met");
    return rho;
}

Matrix momentum_update(MomentumState& state, OptimizerKind kind, const Matrix& grad,
                       const OptimizerParams& params) {
    if (state.t == 0) {
        state.buffer = Matrix(grad.rows, grad.cols);
        state.m = Matrix(grad.rows, grad.cols);
        state.v = Matrix(grad.rows, grad.cols);
    }
    ++state.t;
    switch (kind) {
        case OptimizerKind::muon_momentum: {
            state.buffer = params.momentum * state.buffer + grad;
            if (frobenius_norm(state.buffer) == 0.0) return Matrix(grad.rows, grad.cols);
            return linalg::orthogonal_factor_exact(state.buffer, params.rank_tolerance);
        }
        case OptimizerKind::adam_full: {
            Matrix dir(grad.rows, grad.cols);
            const double b1 = params.beta1;
            const double b2 = params.beta2;
            const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
            const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
            for (std::size_t i = 0; i < grad.values.size(); ++i) {
                const double g = grad.values[i];
                state.m.values[i] = b1 * state.m.values[i] + (1.0 - b1) * g;
                state.v.values[i] = b2 * state.v.values[i] + (1.0 - b2) * g * g;
                const double mhat = state.m.values[i] / bc1;
                const double vhat = state.v.values[i] / bc2;
                dir.values[i] = mhat / (std::sqrt(vhat) + params.eps_adam);
            }
            return dir;
        }
        default:
            throw std::invalid_argument("momentum_update: stateless optimizer kind");
    }
}

} // namespace memlab::optim
