#pragma once

#include <vector>

#include "memlab/embeddings.hpp"
#include "memlab/linalg.hpp"
#include "memlab/matrix.hpp"

namespace memlab::oracle {

/// Two-class setting parameters and the derived quantities the closed
/// forms are written in.
struct TwoClassParams {
    int k = 0;
    int l = 0;
    double alpha = 0.0;

    double beta() const { return static_cast<double>(l) / k; }
    double gamma1() const { return alpha / l; }
    double gamma2() const { return (1.0 - alpha) / (k - l); }
    double lambda() const;

    void validate() const;
};

// Closed-form gradient of the population loss at W = 0 (returned with the
// sign of the gradient, so the descent direction is its negation).
Matrix gradient_at_zero(const TwoClassParams& params, const embeddings::EmbeddingPair& emb);

// Step size at which the fastest class reaches probability 1 - eps under
// one-step gradient descent.
double gd_eta(const TwoClassParams& params, double eps);

// Worst correct-class probability after that one GD step.
double gd_min_prob(const TwoClassParams& params, double eps);

// Closed-form Muon update G at W = 0 (so the step is W1 = W0 - eta * G).
Matrix muon_update_closed_form(const TwoClassParams& params,
                               const embeddings::EmbeddingPair& emb);

// Closed-form SVD of X = diag(x) - (1/K) 1 x^T with x two-valued
// (a on the first l coordinates, b after). Includes the structural zero
// singular value; factors are sorted descending.
linalg::SvdFactors svd_simp(double a, double b, int l, int k);

// Closed-form SVD of diag(a*1_l, b*1_{k-l}) plus a block-wise constant
// matrix with values c11, c12, c21, c22.
linalg::SvdFactors svd_block_constant(double a, double b, double c11, double c12, double c21,
                                      double c22, int l, int k);

// Helmert-style orthonormal basis of the subspace orthogonal to the
// all-ones vector in R^n; n x (n-1).
Matrix ones_complement_basis(int n);

/// Fixed matrices behind the support-coupled sign-descent construction and
/// the rates they imply.
struct AdamAdversarial {
    Matrix a_mat;        // 3x3 A
    Matrix b_mat;        // 3x3 B
    Matrix sum_mat;      // A + B
    Matrix rotated_sum;  // R1^T (A + B) R2
    Matrix rotated_b;    // R1^T B R2
    double r_exponent = 0.0;      // 1.668 / 2.471
    double eta_bound_rate = 0.0;  // 2.471
};

AdamAdversarial adam_adversarial();

// sigma_min(A) / sigma_max(A) for the 3x3 block above.
double adam_singular_ratio();

// Singular values of a 3x3 matrix through the characteristic cubic of
// M^T M (trigonometric solve, no iterative SVD); descending.
std::vector<double> singular_values_3x3(const Matrix& m);

/// Projection of a Muon trajectory onto the {diagonal blocks, J blocks}
/// basis of the structural hypothesis.
struct StructureStep {
    int step = 0;
    double a = 0.0;
    double b = 0.0;
    double c11 = 0.0, c12 = 0.0, c21 = 0.0, c22 = 0.0;
    double residual = 0.0; // Frobenius distance of X_t to the fitted form
};

struct StructureReport {
    std::vector<StructureStep> steps;
    double max_residual = 0.0;
    double max_ab_gap = 0.0;
    double max_c_ratio = 0.0; // max over steps of max|c| * K / a
    bool structure_ok = true; // residual <= 1e-6 everywhere
};

StructureReport multi_step_structure_check(const std::vector<Matrix>& states,
                                           const embeddings::EmbeddingPair& emb,
                                           const TwoClassParams& params);

} // namespace memlab::oracle
