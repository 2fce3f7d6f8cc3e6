#pragma once

#include <map>
#include <vector>

#include "memlab/matrix.hpp"

namespace memlab::spectra {

/// Isotropy metrics of a singular spectrum.
struct SpectrumMetrics {
    double h_norm = 0.0;          // normalized SVD entropy, in [0, 1]
    double erank = 0.0;           // perplexity of the energy distribution
    std::map<int, double> top_e;  // top-k energy fraction, k -> value
    double q_ratio = 0.0;         // 75th/25th percentile ratio of sigma^2
    int n_nonzero = 0;
};

// q_i = sigma_i^2 / sum sigma_j^2 after dropping values <= 1e-12 * max.
// Throws on an all-zero spectrum.
std::vector<double> energy_distribution(const std::vector<double>& sigma);

// -(1/ln n) sum q_i ln q_i; 1 by convention when a single value survives.
double normalized_entropy(const std::vector<double>& sigma);

// exp(-sum q_i ln q_i).
double effective_rank(const std::vector<double>& sigma);

// sum of the first k energies; k is clamped to the number of nonzeros.
double top_k_energy(const std::vector<double>& sigma, int k);

// Q3/Q1 of {sigma_i^2}, linear interpolation at p*(n-1) on the sorted
// values. Throws "lower quartile vanishes" when Q1 = 0.
double quantile_ratio(const std::vector<double>& sigma);

// All metrics of a matrix's singular spectrum; top_e at k in {1, 10}.
SpectrumMetrics matrix_metrics(const Matrix& a);

SpectrumMetrics spectrum_metrics(const std::vector<double>& sigma);

} // namespace memlab::spectra
