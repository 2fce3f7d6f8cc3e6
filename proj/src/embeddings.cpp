#include "memlab/embeddings.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "memlab/kernels.hpp"

namespace memlab::embeddings {

namespace {

// Angle constants kept at the printed 3-decimal precision; the numeric
// 3x3 products downstream are only reproducible with these exact values.
constexpr double kTilAngles[3] = {3.638, 2.949, 5.218};
constexpr double kAngles[3] = {1.715, 0.876, 3.098};

double uniform01(std::mt19937_64& gen) {
    // 53-bit mantissa in (0, 1]; avoids the exact zero Box-Muller cannot take
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1p-53;
}

void fill_gaussian(std::mt19937_64& gen, Matrix& m) {
    // Box-Muller, spelled out so the stream is identical across standard
    // library implementations
    std::size_t i = 0;
    const std::size_t n = m.values.size();
    while (i < n) {
        const double u1 = uniform01(gen);
        const double u2 = uniform01(gen);
        const double r = std::sqrt(-2.0 * std::log(u1));
        m.values[i++] = r * std::cos(2.0 * M_PI * u2);
        if (i < n) m.values[i++] = r * std::sin(2.0 * M_PI * u2);
    }
}

// Modified Gram-Schmidt on columns, with a second pass.
void orthonormalize(Matrix& m) {
    const int n = m.cols;
    Matrix t = transpose(m); // columns as contiguous rows
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < n; ++j) {
            double* cj = t.row(j);
            for (int i = 0; i < j; ++i) {
                const double proj = kernels::dot(t.row(i), cj, static_cast<std::size_t>(n));
                kernels::axpy(-proj, t.row(i), cj, static_cast<std::size_t>(n));
            }
            const double norm = std::sqrt(kernels::nrm2sq(cj, static_cast<std::size_t>(n)));
            if (norm == 0.0) throw std::runtime_error("orthonormalize: rank-deficient sample");
            kernels::scale(1.0 / norm, cj, static_cast<std::size_t>(n));
        }
    }
    m = transpose(t);
}

} // namespace

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::identity: return "identity";
        case Kind::coupled_rotation: return "coupled_rotation";
        case Kind::random_orthonormal: return "random_orthonormal";
    }
    return "?";
}

EmbeddingPair identity_embeddings(int k) {
    if (k < 2) throw std::invalid_argument("identity_embeddings: k must be >= 2");
    EmbeddingPair p;
    p.e = Matrix::identity(k);
    p.e_til = Matrix::identity(k);
    p.kind = Kind::identity;
    return p;
}

Matrix rotation_block(double a, double b, double c) {
    const double ca = std::cos(a), sa = std::sin(a);
    const double cb = std::cos(b), sb = std::sin(b);
    const double cc = std::cos(c), sc = std::sin(c);
    Matrix r(3, 3);
    r(0, 0) = ca * cb * cc - sa * sc;
    r(0, 1) = -ca * cb * sc - sa * cc;
    r(0, 2) = ca * sb;
    r(1, 0) = sa * cb * cc + ca * sc;
    r(1, 1) = -sa * cb * sc + ca * cc;
    r(1, 2) = sa * sb;
    r(2, 0) = -sb * cc;
    r(2, 1) = sb * sc;
    r(2, 2) = cb;
    return r;
}

EmbeddingPair coupled_embeddings(int k) {
    if (k < 3 || k % 3 != 0) {
        throw std::invalid_argument(
            "coupled_embeddings: k must be divisible by 3 (3x3 rotation blocks)");
    }
    const Matrix eye = Matrix::identity(k / 3);
    EmbeddingPair p;
    p.e_til = kronecker(eye, rotation_block(kTilAngles[0], kTilAngles[1], kTilAngles[2]));
    p.e = kronecker(eye, rotation_block(kAngles[0], kAngles[1], kAngles[2]));
    p.kind = Kind::coupled_rotation;
    return p;
}

EmbeddingPair random_orthonormal(int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("random_orthonormal: k must be >= 2");
    std::mt19937_64 gen(seed);
    EmbeddingPair p;
    p.e = Matrix(k, k);
    p.e_til = Matrix(k, k);
    fill_gaussian(gen, p.e);
    fill_gaussian(gen, p.e_til);
    orthonormalize(p.e);
    orthonormalize(p.e_til);
    p.kind = Kind::random_orthonormal;
    p.seed = seed;
    return p;
}

} // namespace memlab::embeddings
