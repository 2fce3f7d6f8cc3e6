#include "memlab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "memlab/kernels.hpp"

namespace memlab {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    std::to_string(a.rows) + "x" + std::to_string(a.cols) + " vs " +
                                    std::to_string(b.rows) + "x" + std::to_string(b.cols));
    }
}

} // namespace

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.values == b.values;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "add");
    Matrix c = a;
    for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] += b.values[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "sub");
    Matrix c = a;
    for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] -= b.values[i];
    return c;
}

Matrix operator*(double c, const Matrix& a) {
    Matrix r = a;
    kernels::scale(c, r.values.data(), r.values.size());
    return r;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
    if (n < 64 || workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols) +
                                    " vs " + std::to_string(b.rows));
    }
    Matrix c(a.rows, b.cols);
    // Nonzero span of each b row: identity/block-diagonal operands (common as
    // embedding factors) then cost O(span) per axpy instead of O(cols).
    std::vector<int> lo(static_cast<std::size_t>(b.rows));
    std::vector<int> hi(static_cast<std::size_t>(b.rows));
    for (int k = 0; k < b.rows; ++k) {
        const double* row = b.row(k);
        int first = 0;
        int last = b.cols;
        while (first < last && row[first] == 0.0) ++first;
        while (last > first && row[last - 1] == 0.0) --last;
        lo[static_cast<std::size_t>(k)] = first;
        hi[static_cast<std::size_t>(k)] = last;
    }
    parallel_for(a.rows, [&](int i) {
        double* crow = c.row(i);
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const int first = lo[static_cast<std::size_t>(k)];
            const int last = hi[static_cast<std::size_t>(k)];
            if (last > first) {
                kernels::axpy(aik, b.row(k) + first, crow + first,
                              static_cast<std::size_t>(last - first));
            }
        }
    });
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

double frobenius_norm(const Matrix& a) {
    return std::sqrt(kernels::nrm2sq(a.values.data(), a.values.size()));
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "frobenius_inner");
    return kernels::dot(a.values.data(), b.values.data(), a.values.size());
}

double max_abs_entry(const Matrix& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::fabs(v));
    return m;
}

bool all_finite(const Matrix& a, std::string* diagnostic) {
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) {
            if (!std::isfinite(a(i, j))) {
                if (diagnostic) {
                    *diagnostic = "non-finite entry at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")";
                }
                return false;
            }
        }
    }
    return true;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows * b.rows, a.cols * b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (int p = 0; p < b.rows; ++p)
                for (int q = 0; q < b.cols; ++q)
                    c(i * b.rows + p, j * b.cols + q) = aij * b(p, q);
        }
    return c;
}

} // namespace memlab
