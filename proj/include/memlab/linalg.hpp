#pragma once

#include <vector>

#include "memlab/matrix.hpp"

namespace memlab::linalg {

inline constexpr double kDefaultRankTolerance = 1e-10;

/// Thin SVD restricted to the r singular directions above
/// rank_tolerance * s[0]. Columns of u (m x r) and v (n x r) are
/// orthonormal; s is descending and nonnegative.
struct SvdFactors {
    Matrix u;
    std::vector<double> s;
    Matrix v;
    double rank_tolerance = kDefaultRankTolerance;

    int rank() const { return static_cast<int>(s.size()); }
    Matrix reconstruct() const; // u * diag(s) * v^T
};

// One-sided Jacobi SVD (cyclic sweeps). Deterministic column signs:
// the largest-magnitude entry of each u column is made nonnegative.
SvdFactors svd(const Matrix& a, double rank_tolerance = kDefaultRankTolerance);

// U V^T over retained directions: the nearest (semi)-orthogonal matrix.
// The zero matrix maps to the zero matrix.
Matrix orthogonal_factor_exact(const Matrix& a, double rank_tolerance = kDefaultRankTolerance);

// U V^T of already-computed factors; lets callers reuse one decomposition
// for both the factor and its (rank-many ones) spectrum.
Matrix orthogonal_from_factors(const SvdFactors& f);

// Cubic Newton-Schulz approximation of orthogonal_factor_exact: pre-scale
// by the Frobenius norm, then X <- 1.5 X - 0.5 X X^T X. Throws on zero input.
// The default covers spectra down to 0.1 of the largest singular value on
// matrices up to 64x64 after the Frobenius pre-scale.
Matrix newton_schulz(const Matrix& a, int iterations = 14);

// All min(m, n) singular values, descending, including numerical zeros.
std::vector<double> singular_spectrum(const Matrix& a);

} // namespace memlab::linalg
