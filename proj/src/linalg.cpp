#include "memlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "memlab/kernels.hpp"

namespace memlab::linalg {

namespace {

constexpr double kJacobiTol = 1e-14; // relative off-diagonal threshold
constexpr int kMaxSweeps = 60;

// One-sided Jacobi on the columns of a (m x n, m >= n not required).
// Works on a^T so each column is a contiguous row. On return `cols`
// holds the rotated columns of a and `vt` the rows of V^T's transpose,
// i.e. row j of vt is the j-th right singular vector.
struct JacobiCore {
    Matrix cols; // n x m
    Matrix vt;   // n x n
    std::vector<double> sigma;
    std::vector<int> order; // descending by sigma
};

// Columns are visited in block pairs so a working set of 2*kBlock columns
// (plus their V^T rows) stays cache-resident; the dominant cost at large n is
// the per-pair dot product, which is memory-bound under a flat cyclic order.
constexpr int kBlock = 24;

JacobiCore jacobi(const Matrix& a, bool accumulate_v) {
    const int m = a.rows;
    const int n = a.cols;
    JacobiCore jc;
    jc.cols = transpose(a);
    jc.vt = Matrix::identity(n);
    const std::size_t len = static_cast<std::size_t>(m);
    const std::size_t vlen = static_cast<std::size_t>(n);

    // sq caches the squared column norms; the annihilating rotation moves
    // t*apq of energy between the pair, and a fresh recompute at the start of
    // each sweep kills any drift.
    std::vector<double> sq(static_cast<std::size_t>(n), 0.0);
    const auto do_pair = [&](int p, int q) -> bool {
        double* cp = jc.cols.row(p);
        double* cq = jc.cols.row(q);
        const double app = sq[static_cast<std::size_t>(p)];
        const double aqq = sq[static_cast<std::size_t>(q)];
        const double apq = kernels::dot(cp, cq, len);
        if (std::fabs(apq) <= kJacobiTol * std::sqrt(app * aqq)) return false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        kernels::rot(cp, cq, c, s, len);
        if (accumulate_v) kernels::rot(jc.vt.row(p), jc.vt.row(q), c, s, vlen);
        sq[static_cast<std::size_t>(p)] = app - t * apq;
        sq[static_cast<std::size_t>(q)] = aqq + t * apq;
        return true;
    };

    const int nb = (n + kBlock - 1) / kBlock;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        for (int j = 0; j < n; ++j) {
            sq[static_cast<std::size_t>(j)] = kernels::nrm2sq(jc.cols.row(j), len);
        }
        bool rotated = false;
        for (int bi = 0; bi < nb; ++bi) {
            const int p0 = bi * kBlock;
            const int p1 = std::min(n, p0 + kBlock);
            for (int bj = bi; bj < nb; ++bj) {
                const int q0 = bj * kBlock;
                const int q1 = std::min(n, q0 + kBlock);
                for (int p = p0; p < p1; ++p) {
                    for (int q = std::max(p + 1, q0); q < q1; ++q) {
                        rotated |= do_pair(p, q);
                    }
                }
            }
        }
        if (!rotated) break;
    }

    jc.sigma.resize(n);
    for (int j = 0; j < n; ++j) {
        jc.sigma[j] = std::sqrt(kernels::nrm2sq(jc.cols.row(j), len));
    }
    jc.order.resize(n);
    std::iota(jc.order.begin(), jc.order.end(), 0);
    std::stable_sort(jc.order.begin(), jc.order.end(),
                     [&](int i, int j) { return jc.sigma[i] > jc.sigma[j]; });
    return jc;
}

void require_finite(const Matrix& a, const char* op) {
    std::string diag;
    if (!all_finite(a, &diag)) {
        throw std::invalid_argument(std::string(op) + ": " + diag);
    }
}

} // namespace

Matrix SvdFactors::reconstruct() const {
    Matrix r(u.rows, v.rows);
    for (int i = 0; i < u.rows; ++i) {
        for (int k = 0; k < rank(); ++k) {
            const double c = u(i, k) * s[static_cast<std::size_t>(k)];
            for (int j = 0; j < v.rows; ++j) r(i, j) += c * v(j, k);
        }
    }
    return r;
}

SvdFactors svd(const Matrix& a, double rank_tolerance) {
    require_finite(a, "svd");
    if (!(rank_tolerance > 0.0 && rank_tolerance <= 1e-3)) {
        throw std::invalid_argument("svd: rank_tolerance must be in (0, 1e-3]");
    }
    // Factor the wider side as the transpose so the Jacobi core always
    // rotates the shorter list of columns.
    const bool flip = a.rows < a.cols;
    const Matrix& work = a;
    const Matrix t = flip ? transpose(a) : Matrix();
    const Matrix& input = flip ? t : work;

    JacobiCore jc = jacobi(input, true);
    const double smax = jc.sigma.empty() ? 0.0 : jc.sigma[jc.order[0]];
    const double cutoff = rank_tolerance * smax;

    int r = 0;
    for (int idx : jc.order) {
        if (smax == 0.0 || jc.sigma[idx] <= cutoff) break;
        ++r;
    }

    SvdFactors f;
    f.rank_tolerance = rank_tolerance;
    f.u = Matrix(a.rows, r);
    f.v = Matrix(a.cols, r);
    f.s.resize(r);

    const int m = input.rows;
    const int n = input.cols;
    for (int k = 0; k < r; ++k) {
        const int j = jc.order[k];
        const double sj = jc.sigma[j];
        f.s[k] = sj;
        // left vector = rotated column / sigma, right vector = vt row
        for (int i = 0; i < m; ++i) {
            const double ui = jc.cols(j, i) / sj;
            if (flip) f.v(i, k) = ui;
            else f.u(i, k) = ui;
        }
        for (int i = 0; i < n; ++i) {
            const double vi = jc.vt(j, i);
            if (flip) f.u(i, k) = vi;
            else f.v(i, k) = vi;
        }
    }

    // Deterministic signs: largest-magnitude entry of each u column >= 0.
    for (int k = 0; k < r; ++k) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < f.u.rows; ++i) {
            const double v = std::fabs(f.u(i, k));
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        if (f.u(arg, k) < 0.0) {
            for (int i = 0; i < f.u.rows; ++i) f.u(i, k) = -f.u(i, k);
            for (int i = 0; i < f.v.rows; ++i) f.v(i, k) = -f.v(i, k);
        }
    }
    return f;
}

Matrix orthogonal_factor_exact(const Matrix& a, double rank_tolerance) {
    return orthogonal_from_factors(svd(a, rank_tolerance));
}

Matrix orthogonal_from_factors(const SvdFactors& f) {
    return matmul(f.u, transpose(f.v));
}

Matrix newton_schulz(const Matrix& a, int iterations) {
    require_finite(a, "newton_schulz");
    if (iterations < 1) throw std::invalid_argument("newton_schulz: iterations must be >= 1");
    const double fn = frobenius_norm(a);
    if (fn == 0.0) throw std::invalid_argument("newton_schulz: degenerate input (zero matrix)");
    Matrix x = (1.0 / fn) * a;
    const bool tall = a.rows >= a.cols;
    for (int it = 0; it < iterations; ++it) {
        Matrix cubic = tall ? matmul(x, matmul(transpose(x), x))
                            : matmul(matmul(x, transpose(x)), x);
        x = 1.5 * x - 0.5 * cubic;
    }
    return x;
}

std::vector<double> singular_spectrum(const Matrix& a) {
    require_finite(a, "singular_spectrum");
    const bool flip = a.rows < a.cols;
    JacobiCore jc = jacobi(flip ? transpose(a) : a, false);
    std::vector<double> out;
    out.reserve(jc.order.size());
    for (int idx : jc.order) out.push_back(jc.sigma[idx]);
    return out;
}

} // namespace memlab::linalg
