#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "memlab/linalg.hpp"
#include "memlab/matrix.hpp"

using namespace memlab;

namespace {

Matrix diag(std::initializer_list<double> values) {
    Matrix m(static_cast<int>(values.size()), static_cast<int>(values.size()));
    int i = 0;
    for (double v : values) m(i, i) = v, ++i;
    return m;
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (double& v : m.values) v = normal(gen);
    return m;
}

// Random orthogonal factor through QR-free means: orthogonal factor of a
// random gaussian matrix.
Matrix random_orthogonal(int n, std::mt19937_64& gen) {
    return linalg::orthogonal_factor_exact(random_matrix(n, n, gen));
}

// The two-valued X = diag(x) - (1/K) 1 x^T used across the suite.
Matrix simp_matrix(double a, double b, int l, int k) {
    Matrix x(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double xj = j < l ? a : b;
            x(i, j) = (i == j ? xj : 0.0) - xj / k;
        }
    }
    return x;
}

// Eigenvalues of X^T X by cyclic Jacobi on the symmetric matrix itself --
// an SVD-free oracle for the spectrum.
std::vector<double> spectrum_via_gram(const Matrix& x) {
    const int n = x.cols;
    Matrix s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int r = 0; r < n; ++r) acc += x(r, i) * x(r, j);
            s(i, j) = acc;
        }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                off = std::max(off, std::fabs(s(p, q)));
                if (std::fabs(s(p, q)) < 1e-15) continue;
                const double zeta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = c * t;
                for (int i = 0; i < n; ++i) {
                    const double sip = s(i, p), siq = s(i, q);
                    s(i, p) = c * sip - sn * siq;
                    s(i, q) = sn * sip + c * siq;
                }
                for (int i = 0; i < n; ++i) {
                    const double spi = s(p, i), sqi = s(q, i);
                    s(p, i) = c * spi - sn * sqi;
                    s(q, i) = sn * spi + c * sqi;
                }
            }
        }
        if (off < 1e-14) break;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = std::sqrt(std::max(s(i, i), 0.0));
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

} // namespace

TEST_CASE("svd of a diagonal matrix") {
    const auto f = linalg::svd(diag({3.0, 2.0}));
    REQUIRE(f.rank() == 2);
    CHECK(f.s[0] == doctest::Approx(3.0));
    CHECK(f.s[1] == doctest::Approx(2.0));
    CHECK(max_abs_entry(f.reconstruct() - diag({3.0, 2.0})) < 1e-12);
}

TEST_CASE("svd of the zero matrix is empty") {
    const auto f = linalg::svd(Matrix(4, 4));
    CHECK(f.rank() == 0);
}

TEST_CASE("svd rejects non-finite input with a located diagnostic") {
    Matrix m(2, 2);
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(linalg::svd(m), doctest::Contains("(1,0)"), std::invalid_argument);
}

TEST_CASE("svd rejects out-of-range rank tolerance") {
    CHECK_THROWS_AS(linalg::svd(diag({1.0}), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(linalg::svd(diag({1.0}), 1e-2), std::invalid_argument);
}

TEST_CASE("two-valued correction matrix has the predicted spectrum") {
    const Matrix x = simp_matrix(2.0, 1.0, 2, 4);
    const auto f = linalg::svd(x);
    REQUIRE(f.rank() == 3); // structural zero direction excluded
    CHECK(f.s[0] == doctest::Approx(2.0));
    CHECK(f.s[1] == doctest::Approx(std::sqrt(10.0) / 2.0)); // 1.58114
    CHECK(f.s[2] == doctest::Approx(1.0));

    const auto spectrum = linalg::singular_spectrum(x);
    REQUIRE(spectrum.size() == 4);
    CHECK(spectrum[3] == doctest::Approx(0.0).epsilon(1e-12));

    const auto gram = spectrum_via_gram(x);
    for (int i = 0; i < 4; ++i) CHECK(spectrum[i] == doctest::Approx(gram[i]).epsilon(1e-10));
}

TEST_CASE("svd factors are orthonormal and reconstruct the input") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 8; ++trial) {
        const int rows = 3 + static_cast<int>(gen() % 10);
        const int cols = 3 + static_cast<int>(gen() % 10);
        const Matrix a = random_matrix(rows, cols, gen);
        const auto f = linalg::svd(a);

        const Matrix utu = matmul(transpose(f.u), f.u);
        const Matrix vtv = matmul(transpose(f.v), f.v);
        CHECK(frobenius_norm(utu - Matrix::identity(f.rank())) < 1e-10);
        CHECK(frobenius_norm(vtv - Matrix::identity(f.rank())) < 1e-10);
        CHECK(frobenius_norm(f.reconstruct() - a) / frobenius_norm(a) < 1e-9);
        for (std::size_t i = 1; i < f.s.size(); ++i) CHECK(f.s[i] <= f.s[i - 1]);
    }
}

TEST_CASE("orthogonal factor basics") {
    CHECK(max_abs_entry(linalg::orthogonal_factor_exact(diag({5.0, 0.1})) -
                        Matrix::identity(2)) < 1e-12);
    CHECK(frobenius_norm(linalg::orthogonal_factor_exact(Matrix(3, 3))) == 0.0);
}

TEST_CASE("orthogonal factor attains the nuclear norm") {
    std::mt19937_64 gen(11);
    const Matrix g = random_matrix(6, 6, gen);
    const Matrix f = linalg::orthogonal_factor_exact(g);
    double nuclear = 0.0;
    for (double s : linalg::singular_spectrum(g)) nuclear += s;
    CHECK(frobenius_inner(g, f) == doctest::Approx(nuclear).epsilon(1e-8));
}

TEST_CASE("orthogonal factor maximizes the pairing over spectral-norm-1 candidates") {
    std::mt19937_64 gen(13);
    const Matrix g = random_matrix(7, 7, gen);
    const double attained = frobenius_inner(g, linalg::orthogonal_factor_exact(g));
    for (int trial = 0; trial < 100; ++trial) {
        // random candidate with spectral norm exactly 1
        const Matrix t = matmul(random_orthogonal(7, gen), random_orthogonal(7, gen));
        CHECK(frobenius_inner(g, t) <= attained + 1e-9);
    }
}

TEST_CASE("orthogonal factor is scale invariant") {
    std::mt19937_64 gen(17);
    const Matrix g = random_matrix(5, 5, gen);
    const Matrix base = linalg::orthogonal_factor_exact(g);
    for (double c : {1e-4, 0.5, 3.0, 1e5}) {
        CHECK(max_abs_entry(linalg::orthogonal_factor_exact(c * g) - base) < 1e-10);
    }
}

TEST_CASE("newton-schulz fixes orthogonal inputs") {
    std::mt19937_64 gen(19);
    const Matrix q = random_orthogonal(6, gen);
    CHECK(frobenius_norm(linalg::newton_schulz(q, 8) - q) < 1e-10);
}

TEST_CASE("newton-schulz approaches the exact factor") {
    CHECK(frobenius_norm(linalg::newton_schulz(diag({1.0, 0.5}), 10) - Matrix::identity(2)) <
          1e-2);

    // well-conditioned 8x8: singular values in [0.1, 1] by construction
    std::mt19937_64 gen(23);
    const Matrix u = random_orthogonal(8, gen);
    const Matrix v = random_orthogonal(8, gen);
    Matrix s(8, 8);
    for (int i = 0; i < 8; ++i) s(i, i) = 0.1 + 0.9 * (i / 7.0);
    const Matrix a = matmul(u, matmul(s, transpose(v)));
    const Matrix exact = linalg::orthogonal_factor_exact(a);
    CHECK(frobenius_norm(linalg::newton_schulz(a, 10) - exact) <= 1e-2);
}

TEST_CASE("newton-schulz rejects the zero matrix") {
    CHECK_THROWS_WITH_AS(linalg::newton_schulz(Matrix(3, 3), 5),
                         doctest::Contains("degenerate"), std::invalid_argument);
}

TEST_CASE("singular spectrum includes zeros") {
    const auto id = linalg::singular_spectrum(Matrix::identity(3));
    CHECK(id == std::vector<double>{1.0, 1.0, 1.0});
    const auto d = linalg::singular_spectrum(diag({2.0, 1.0, 0.0}));
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(2.0));
    CHECK(d[1] == doctest::Approx(1.0));
    CHECK(d[2] == doctest::Approx(0.0).epsilon(1e-12));
}
