#include "memlab/distributions.hpp"

#include <stdexcept>

namespace memlab::distributions {

ClassDistribution two_class_distribution(int k, int l, double alpha) {
    if (k < 2) throw std::invalid_argument("two_class_distribution: k must be >= 2");
    if (l < 1 || l >= k) throw std::invalid_argument("two_class_distribution: need 1 <= l < k");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("two_class_distribution: alpha must be in (0, 1)");
    }
    ClassDistribution d;
    d.p.resize(k);
    const double head = alpha / l;
    const double tail = (1.0 - alpha) / (k - l);
    for (int i = 0; i < k; ++i) d.p[i] = i < l ? head : tail;
    d.l = l;
    d.alpha = alpha;
    d.beta = static_cast<double>(l) / k;
    return d;
}

std::int64_t power_law_samples_per_class(int m, int g, std::int64_t n_qa) {
    if (g < 0 || g > m) throw std::invalid_argument("power_law_samples_per_class: g out of range");
    return (std::int64_t{1} << (m - g)) * n_qa;
}

ClassDistribution power_law_distribution(int m, std::int64_t n_qa) {
    if (m < 0) throw std::invalid_argument("power_law_distribution: m must be >= 0");
    if (n_qa < 1) throw std::invalid_argument("power_law_distribution: n_qa must be >= 1");
    ClassDistribution d;
    d.power_law_m = m;
    d.n_qa = n_qa;
    std::int64_t total = 0;
    std::vector<std::int64_t> samples;
    for (int g = 0; g <= m; ++g) {
        const std::int64_t classes = g == 0 ? 1 : (std::int64_t{1} << (g - 1));
        const std::int64_t per_class = power_law_samples_per_class(m, g, n_qa);
        for (std::int64_t c = 0; c < classes; ++c) {
            samples.push_back(per_class);
            total += per_class;
        }
    }
    d.p.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        d.p[i] = static_cast<double>(samples[i]) / static_cast<double>(total);
    }
    return d;
}

double imbalance_ratio(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("imbalance_ratio: alpha, beta must be in (0, 1)");
    }
    const double odds = (alpha * (1.0 - beta)) / (beta * (1.0 - alpha));
    return odds < 1.0 / odds ? odds : 1.0 / odds;
}

} // namespace memlab::distributions
