#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace memlab {

/// Dense real matrix, row-major. The universal carrier for weights,
/// embeddings, gradients, and update directions.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

    static Matrix identity(int n);

    double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }

    double* row(int i) { return values.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return values.data() + static_cast<std::size_t>(i) * cols; }
};

bool operator==(const Matrix& a, const Matrix& b);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double c, const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

double frobenius_norm(const Matrix& a);
double frobenius_inner(const Matrix& a, const Matrix& b);
double max_abs_entry(const Matrix& a);

// true iff every entry is finite; on failure names the first offending entry
bool all_finite(const Matrix& a, std::string* diagnostic = nullptr);

// Kronecker product a (x) b.
Matrix kronecker(const Matrix& a, const Matrix& b);

// Runs fn(i) for i in [0, n) across a few worker threads; used for the
// row loops of large matmuls. Results must be index-independent.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace memlab
