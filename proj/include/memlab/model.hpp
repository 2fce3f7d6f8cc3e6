#pragma once

#include <vector>

#include "memlab/distributions.hpp"
#include "memlab/embeddings.hpp"
#include "memlab/matrix.hpp"

namespace memlab::model {

/// One-layer linear associative memory instance: the embedding pair,
/// the class-frequency vector and the fact count K.
struct MemoryProblem {
    embeddings::EmbeddingPair emb;
    distributions::ClassDistribution dist;

    int k() const { return emb.k(); }
    void validate() const; // distribution length == embedding columns
};

MemoryProblem make_problem(embeddings::EmbeddingPair emb, distributions::ClassDistribution dist);

// Logit matrix E~^T W E; column k holds the scores for query E_k.
Matrix logits(const MemoryProblem& problem, const Matrix& w);

// Column-wise softmax with per-column max subtraction.
Matrix softmax_columns(const Matrix& logit_matrix);

// K x K score matrix; every column is a probability vector.
Matrix scores(const MemoryProblem& problem, const Matrix& w);

// Population cross-entropy -sum_k p_k log [f_W(E_k)]_k.
double loss(const MemoryProblem& problem, const Matrix& w);

// Analytic gradient of the population loss at w.
Matrix gradient(const MemoryProblem& problem, const Matrix& w);

// Diagonal of the score matrix: the correct-class probabilities.
std::vector<double> correct_probabilities(const MemoryProblem& problem, const Matrix& w);

// Delta(W) = max_i correct prob - min_j correct prob.
double max_prob_gap(const MemoryProblem& problem, const Matrix& w);

// Loss/diagnostics evaluated from a precomputed logit matrix; used by the
// step-size sweeps where the logits are affine in eta.
struct Diagnostics {
    double loss = 0.0;
    double min_prob = 0.0;
    double max_prob = 0.0;
    double delta() const { return max_prob - min_prob; }
};

Diagnostics diagnostics_from_logits(const Matrix& logit_matrix, const std::vector<double>& p);

} // namespace memlab::model
