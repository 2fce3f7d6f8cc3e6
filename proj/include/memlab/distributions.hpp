#pragma once

#include <cstdint>
#include <vector>

namespace memlab::distributions {

/// Class-frequency vector p over K facts plus the parameters it was
/// built from.
struct ClassDistribution {
    std::vector<double> p;

    // two-class parameters (valid when l > 0)
    int l = 0;
    double alpha = 0.0;
    double beta = 0.0; // realized L/K

    // power-law parameters (valid when groups > 0)
    int power_law_m = -1;
    std::int64_t n_qa = 0;

    int k() const { return static_cast<int>(p.size()); }
};

// p_i = alpha/l for i < l, (1-alpha)/(k-l) otherwise.
ClassDistribution two_class_distribution(int k, int l, double alpha);

// Head-first grouped power law: group g in [0, m] has N_g classes
// (N_0 = 1, N_g = 2^{g-1}) with S_g * n_qa samples each, S_g = 2^{m-g}.
ClassDistribution power_law_distribution(int m, std::int64_t n_qa);

// Per-group sample count for a class in group g (before normalization).
std::int64_t power_law_samples_per_class(int m, int g, std::int64_t n_qa);

// min{ alpha(1-beta)/(beta(1-alpha)), beta(1-alpha)/(alpha(1-beta)) } in (0, 1].
double imbalance_ratio(double alpha, double beta);

} // namespace memlab::distributions
