#include "memlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memlab/linalg.hpp"

namespace memlab::spectra {

namespace {

constexpr double kZeroFraction = 1e-12; // relative cutoff for "zero" sigma

std::vector<double> nonzero_values(const std::vector<double>& sigma) {
    double mx = 0.0;
    for (double s : sigma) {
        if (s < 0.0) throw std::invalid_argument("spectra: negative singular value");
        mx = std::max(mx, s);
    }
    if (mx == 0.0) throw std::invalid_argument("spectra: empty spectrum");
    std::vector<double> out;
    out.reserve(sigma.size());
    for (double s : sigma) {
        if (s > kZeroFraction * mx) out.push_back(s);
    }
    return out;
}

double entropy_nats(const std::vector<double>& q) {
    double h = 0.0;
    for (double v : q) h -= v * std::log(v);
    return h;
}

double quantile_type7(const std::vector<double>& sorted_ascending, double p) {
    const double pos = p * (sorted_ascending.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - lo;
    if (lo + 1 >= sorted_ascending.size()) return sorted_ascending.back();
    return (1.0 - frac) * sorted_ascending[lo] + frac * sorted_ascending[lo + 1];
}

} // namespace

std::vector<double> energy_distribution(const std::vector<double>& sigma) {
    const std::vector<double> s = nonzero_values(sigma);
    double total = 0.0;
    for (double v : s) total += v * v;
    std::vector<double> q(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) q[i] = s[i] * s[i] / total;
    return q;
}

double normalized_entropy(const std::vector<double>& sigma) {
    const std::vector<double> q = energy_distribution(sigma);
    if (q.size() == 1) return 1.0; // single direction: uniform over its support
    return entropy_nats(q) / std::log(static_cast<double>(q.size()));
}

double effective_rank(const std::vector<double>& sigma) {
    return std::exp(entropy_nats(energy_distribution(sigma)));
}

double top_k_energy(const std::vector<double>& sigma, int k) {
    if (k < 1) throw std::invalid_argument("top_k_energy: k must be >= 1");
    std::vector<double> q = energy_distribution(sigma);
    std::sort(q.begin(), q.end(), std::greater<>());
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), q.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) sum += q[i];
    return sum;
}

double quantile_ratio(const std::vector<double>& sigma) {
    const std::vector<double> s = nonzero_values(sigma);
    if (s.size() < 2) throw std::invalid_argument("quantile_ratio: need at least two values");
    std::vector<double> eig(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) eig[i] = s[i] * s[i];
    std::sort(eig.begin(), eig.end());
    const double q1 = quantile_type7(eig, 0.25);
    const double q3 = quantile_type7(eig, 0.75);
    if (q1 <= 0.0) throw std::invalid_argument("quantile_ratio: lower quartile vanishes");
    return q3 / q1;
}

SpectrumMetrics spectrum_metrics(const std::vector<double>& sigma) {
    SpectrumMetrics m;
    m.n_nonzero = static_cast<int>(energy_distribution(sigma).size());
    m.h_norm = normalized_entropy(sigma);
    m.erank = effective_rank(sigma);
    m.top_e[1] = top_k_energy(sigma, 1);
    m.top_e[10] = top_k_energy(sigma, 10);
    m.q_ratio = m.n_nonzero >= 2 ? quantile_ratio(sigma) : 1.0;
    return m;
}

SpectrumMetrics matrix_metrics(const Matrix& a) {
    if (frobenius_norm(a) == 0.0) throw std::invalid_argument("matrix_metrics: zero matrix");
    return spectrum_metrics(linalg::singular_spectrum(a));
}

} // namespace memlab::spectra
