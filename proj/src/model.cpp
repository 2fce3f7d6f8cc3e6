#include "memlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memlab::model {

namespace {
constexpr double kLogFloor = 1e-300; // clamp for log only, never for gradients
}

void MemoryProblem::validate() const {
    const int kk = emb.k();
    if (emb.e.rows != kk || emb.e_til.rows != kk || emb.e_til.cols != kk) {
        throw std::invalid_argument("MemoryProblem: embeddings must be K x K");
    }
    if (dist.k() != kk) {
        throw std::invalid_argument("MemoryProblem: distribution length " +
                                    std::to_string(dist.k()) + " != K = " + std::to_string(kk));
    }
}

MemoryProblem make_problem(embeddings::EmbeddingPair emb, distributions::ClassDistribution dist) {
    MemoryProblem p{std::move(emb), std::move(dist)};
    p.validate();
    return p;
}

Matrix logits(const MemoryProblem& problem, const Matrix& w) {
    if (w.rows != problem.k() || w.cols != problem.k()) {
        throw std::invalid_argument("logits: W must be K x K");
    }
    return matmul(transpose(problem.emb.e_til), matmul(w, problem.emb.e));
}

Matrix softmax_columns(const Matrix& logit_matrix) {
    const int rows = logit_matrix.rows;
    const int cols = logit_matrix.cols;
    // work on the transpose so every column is contiguous
    Matrix t = transpose(logit_matrix);
    parallel_for(cols, [&](int k) {
        double* col = t.row(k);
        double mx = col[0];
        for (int i = 1; i < rows; ++i) mx = std::max(mx, col[i]);
        double sum = 0.0;
        for (int i = 0; i < rows; ++i) {
            col[i] = std::exp(col[i] - mx);
            sum += col[i];
        }
        const double inv = 1.0 / sum;
        for (int i = 0; i < rows; ++i) col[i] *= inv;
    });
    return transpose(t);
}

Matrix scores(const MemoryProblem& problem, const Matrix& w) {
    return softmax_columns(logits(problem, w));
}

Diagnostics diagnostics_from_logits(const Matrix& logit_matrix, const std::vector<double>& p) {
    const int k = logit_matrix.rows;
    if (logit_matrix.cols != k || static_cast<int>(p.size()) != k) {
        throw std::invalid_argument("diagnostics_from_logits: dimension mismatch");
    }
    Diagnostics d;
    d.min_prob = 1.0;
    d.max_prob = 0.0;
    const Matrix t = transpose(logit_matrix);
    for (int col = 0; col < k; ++col) {
        const double* z = t.row(col);
        double mx = z[0];
        for (int i = 1; i < k; ++i) mx = std::max(mx, z[i]);
        double sum = 0.0;
        for (int i = 0; i < k; ++i) sum += std::exp(z[i] - mx);
        const double prob = std::exp(z[col] - mx) / sum;
        d.loss -= p[col] * std::log(std::max(prob, kLogFloor));
        d.min_prob = std::min(d.min_prob, prob);
        d.max_prob = std::max(d.max_prob, prob);
    }
    return d;
}

double loss(const MemoryProblem& problem, const Matrix& w) {
    return diagnostics_from_logits(logits(problem, w), problem.dist.p).loss;
}

Matrix gradient(const MemoryProblem& problem, const Matrix& w) {
    // grad = E~ (S - I) diag(p) E^T, column k of S the softmax scores of E_k
    Matrix inner = scores(problem, w);
    const int k = problem.k();
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double centered = inner(i, j) - (i == j ? 1.0 : 0.0);
            inner(i, j) = centered * problem.dist.p[j];
        }
    }
    return matmul(problem.emb.e_til, matmul(inner, transpose(problem.emb.e)));
}

std::vector<double> correct_probabilities(const MemoryProblem& problem, const Matrix& w) {
    const Matrix s = scores(problem, w);
    std::vector<double> out(problem.k());
    for (int i = 0; i < problem.k(); ++i) out[i] = s(i, i);
    return out;
}

double max_prob_gap(const MemoryProblem& problem, const Matrix& w) {
    const auto probs = correct_probabilities(problem, w);
    const auto [mn, mx] = std::minmax_element(probs.begin(), probs.end());
    return *mx - *mn;
}

} // namespace memlab::model
