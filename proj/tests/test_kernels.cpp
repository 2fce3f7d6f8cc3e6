#include <doctest.h>

#include <random>
#include <vector>

#include "memlab/kernels.hpp"

using namespace memlab;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    std::vector<double> v(n);
    for (double& x : v) x = normal(gen);
    return v;
}

} // namespace

TEST_CASE("scalar kernels on small vectors") {
    const double x[4] = {1.0, -2.0, 3.0, 0.5};
    const double y[4] = {2.0, 1.0, -1.0, 4.0};
    CHECK(kernels::ref::dot(x, y, 4) == doctest::Approx(-1.0));
    CHECK(kernels::ref::nrm2sq(x, 4) == doctest::Approx(14.25));

    double z[4] = {2.0, 1.0, -1.0, 4.0};
    kernels::ref::axpy(2.0, x, z, 4);
    CHECK(z[0] == doctest::Approx(4.0));
    CHECK(z[1] == doctest::Approx(-3.0));

    double a[2] = {1.0, 0.0};
    double b[2] = {0.0, 1.0};
    kernels::ref::rot(a, b, 0.0, 1.0, 2); // quarter turn
    CHECK(a[0] == doctest::Approx(0.0));
    CHECK(b[0] == doctest::Approx(1.0));
    CHECK(a[1] == doctest::Approx(-1.0));
    CHECK(b[1] == doctest::Approx(0.0));

    double s[3] = {1.0, -2.0, 4.0};
    kernels::ref::scale(0.5, s, 3);
    CHECK(s[2] == doctest::Approx(2.0));
}

TEST_CASE("dispatched backend agrees with the scalar reference") {
    std::mt19937_64 gen(42);
    for (std::size_t n : {1u, 3u, 7u, 8u, 17u, 100u, 999u}) {
        auto x = random_vec(n, gen);
        auto y = random_vec(n, gen);

        CHECK(kernels::dot(x.data(), y.data(), n) ==
              doctest::Approx(kernels::ref::dot(x.data(), y.data(), n)).epsilon(1e-12));
        CHECK(kernels::nrm2sq(x.data(), n) ==
              doctest::Approx(kernels::ref::nrm2sq(x.data(), n)).epsilon(1e-12));

        auto y1 = y;
        auto y2 = y;
        kernels::axpy(1.7, x.data(), y1.data(), n);
        kernels::ref::axpy(1.7, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));

        auto a1 = x, b1 = y, a2 = x, b2 = y;
        kernels::rot(a1.data(), b1.data(), 0.8, 0.6, n);
        kernels::ref::rot(a2.data(), b2.data(), 0.8, 0.6, n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(a1[i] == doctest::Approx(a2[i]).epsilon(1e-13));
            CHECK(b1[i] == doctest::Approx(b2[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("backend name is reported") {
    const std::string name = kernels::active_backend();
    CHECK((name == "avx2" || name == "scalar"));
}
