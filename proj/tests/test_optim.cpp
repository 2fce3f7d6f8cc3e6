#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "memlab/optim.hpp"
#include "memlab/oracle.hpp"

using namespace memlab;

namespace {

model::MemoryProblem two_class_problem(embeddings::EmbeddingPair emb, int l, double alpha) {
    const int k = emb.k();
    return model::make_problem(std::move(emb),
                               distributions::two_class_distribution(k, l, alpha));
}

Matrix random_matrix(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    Matrix m(n, n);
    for (double& v : m.values) v = normal(gen);
    return m;
}

} // namespace

TEST_CASE("optimizer kind names round-trip") {
    for (auto kind : {optim::OptimizerKind::gd, optim::OptimizerKind::sign_gd,
                      optim::OptimizerKind::muon_exact, optim::OptimizerKind::muon_ns,
                      optim::OptimizerKind::muon_momentum, optim::OptimizerKind::adam_full}) {
        CHECK(optim::parse_kind(optim::kind_name(kind)) == kind);
    }
    CHECK(!optim::parse_kind("adamw"));
}

TEST_CASE("sign direction") {
    Matrix g(2, 2);
    g(0, 0) = 0.3;
    g(0, 1) = -2.0;
    g(1, 1) = 5.0;
    const Matrix s = optim::update_direction(optim::OptimizerKind::sign_gd, g);
    CHECK(s(0, 0) == 1.0);
    CHECK(s(0, 1) == -1.0);
    CHECK(s(1, 0) == 0.0);
    CHECK(s(1, 1) == 1.0);
}

TEST_CASE("muon direction has unit singular values") {
    const auto problem = two_class_problem(embeddings::random_orthonormal(12, 4), 3, 0.8);
    const Matrix g = model::gradient(problem, Matrix(12, 12));
    const Matrix dir = optim::update_direction(optim::OptimizerKind::muon_exact, g);
    for (double s : linalg::svd(dir).s) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("muon maps a zero gradient to a zero direction") {
    const Matrix z(5, 5);
    CHECK(frobenius_norm(optim::update_direction(optim::OptimizerKind::muon_exact, z)) == 0.0);
    CHECK(frobenius_norm(optim::update_direction(optim::OptimizerKind::muon_ns, z)) == 0.0);
}

TEST_CASE("sign descent at zero init reproduces 2I - J on identity embeddings") {
    const auto problem = two_class_problem(embeddings::identity_embeddings(50), 10, 0.8);
    const Matrix dir =
        optim::update_direction(optim::OptimizerKind::sign_gd,
                                model::gradient(problem, Matrix(50, 50)));
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            CHECK(-dir(i, j) == (i == j ? 2.0 : 0.0) - 1.0);
        }
    }
}

TEST_CASE("one step with eta zero is the starting point") {
    const auto problem = two_class_problem(embeddings::identity_embeddings(6), 2, 0.8);
    Matrix w0(6, 6);
    w0(1, 2) = 0.5;
    CHECK(optim::one_step(problem, w0, optim::OptimizerKind::gd, 0.0) == w0);
}

TEST_CASE("one-step gd at the closed-form step size puts the head at the target") {
    const oracle::TwoClassParams params{999, 199, 0.8};
    const auto problem = two_class_problem(embeddings::identity_embeddings(999), 199, 0.8);
    const auto sweep =
        optim::make_one_step_sweep(problem, Matrix(999, 999), optim::OptimizerKind::gd);
    const auto d = sweep.eval(oracle::gd_eta(params, 0.1));
    CHECK(d.max_prob == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("eta search handles the already-satisfied boundary") {
    const auto problem = two_class_problem(embeddings::identity_embeddings(10), 2, 0.8);
    // eps > 1 - 1/K: satisfied at w0, so eta* = 0
    const auto search =
        optim::min_eta_for_target(problem, Matrix(10, 10), optim::OptimizerKind::gd, 0.95);
    CHECK(search.eta == 0.0);
}

TEST_CASE("eta search rejects invalid eps and unreachable targets") {
    const auto problem = two_class_problem(embeddings::identity_embeddings(6), 2, 0.8);
    CHECK_THROWS_AS(
        optim::min_eta_for_target(problem, Matrix(6, 6), optim::OptimizerKind::gd, 0.0),
        std::invalid_argument);
    // a direction of zeros can never move the probabilities
    optim::OneStepSweep sweep;
    sweep.direction = Matrix(6, 6);
    sweep.base_logits = Matrix(6, 6);
    sweep.dir_logits = Matrix(6, 6);
    sweep.p.assign(6, 1.0 / 6);
    CHECK_THROWS_WITH_AS(optim::min_eta_for_target(sweep, 0.1),
                         doctest::Contains("unreachable"), std::runtime_error);
}

TEST_CASE("sign descent rho is perfectly balanced on identity embeddings") {
    const auto problem = two_class_problem(embeddings::identity_embeddings(99), 20, 0.8);
    const double rho =
        optim::rho_one_step(problem, Matrix(99, 99), optim::OptimizerKind::sign_gd, 0.1, 2);
    CHECK(rho == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("schedule construction rejects degenerate inputs") {
    CHECK_THROWS_AS(optim::Schedule::constant(0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(optim::Schedule::constant(1.0, 0), std::invalid_argument);
    const auto s = optim::Schedule::constant(0.5, 3);
    CHECK(s.etas == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("multi-step with a schedule of zeros is a constant trajectory") {
    const auto problem = two_class_problem(embeddings::identity_embeddings(8), 2, 0.8);
    optim::Schedule frozen;
    frozen.etas = {0.0, 0.0, 0.0};
    const auto records = optim::multi_step(problem, Matrix(8, 8), optim::OptimizerKind::gd, frozen);
    REQUIRE(records.size() == 3);
    for (const auto& r : records) {
        CHECK(r.loss == doctest::Approx(std::log(8.0)).epsilon(1e-12));
        CHECK(r.delta == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(
        optim::multi_step(problem, Matrix(8, 8), optim::OptimizerKind::gd, optim::Schedule{}),
        std::invalid_argument);
}

TEST_CASE("gd multi-step first inflates then shrinks the gap") {
    const auto problem = two_class_problem(embeddings::identity_embeddings(60), 12, 0.8);
    const auto records = optim::multi_step(problem, Matrix(60, 60), optim::OptimizerKind::gd,
                                           optim::Schedule::constant(30.0, 60));
    double peak = 0.0;
    for (const auto& r : records) peak = std::max(peak, r.delta);
    CHECK(peak > 0.5);
    CHECK(records.back().delta < peak); // the gap eventually closes
}

TEST_CASE("rho over a trajectory") {
    std::vector<optim::TrajectoryRecord> records(1);
    records[0].min_prob = 0.9;
    records[0].max_prob = 0.9;
    CHECK(optim::rho_trajectory(records, 0.1) == doctest::Approx(0.9));

    records[0].max_prob = 0.5;
    CHECK_THROWS_WITH_AS(optim::rho_trajectory(records, 0.1),
                         doctest::Contains("condition never met"), std::runtime_error);
}

TEST_CASE("momentum variants reduce to their stateless forms") {
    std::mt19937_64 gen(77);
    const Matrix g = random_matrix(8, gen);

    optim::OptimizerParams mu0;
    mu0.momentum = 0.0;
    optim::MomentumState state;
    const Matrix dir = optim::momentum_update(state, optim::OptimizerKind::muon_momentum, g, mu0);
    CHECK(max_abs_entry(dir - optim::update_direction(optim::OptimizerKind::muon_exact, g)) <
          1e-12);

    optim::OptimizerParams adam_as_sign;
    adam_as_sign.beta1 = 0.0;
    adam_as_sign.beta2 = 0.0;
    adam_as_sign.eps_adam = 1e-300;
    optim::MomentumState astate;
    const Matrix adir =
        optim::momentum_update(astate, optim::OptimizerKind::adam_full, g, adam_as_sign);
    const Matrix sdir = optim::update_direction(optim::OptimizerKind::sign_gd, g);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (g.values[i] != 0.0) CHECK(adir.values[i] == doctest::Approx(sdir.values[i]));
    }
}

TEST_CASE("muon momentum direction is invariant to repeating the same gradient") {
    std::mt19937_64 gen(78);
    const Matrix g = random_matrix(6, gen);
    optim::OptimizerParams params;
    params.momentum = 0.95;
    optim::MomentumState state;
    optim::momentum_update(state, optim::OptimizerKind::muon_momentum, g, params);
    const Matrix second =
        optim::momentum_update(state, optim::OptimizerKind::muon_momentum, g, params);
    // buffer is a positive multiple of g, so the orthogonal factor is unchanged
    CHECK(max_abs_entry(second - optim::update_direction(optim::OptimizerKind::muon_exact, g)) <
          1e-10);
}

TEST_CASE("stateless and stateful entry points reject the wrong kinds") {
    const Matrix g(3, 3);
    CHECK_THROWS_AS(optim::update_direction(optim::OptimizerKind::adam_full, g),
                    std::invalid_argument);
    optim::MomentumState state;
    CHECK_THROWS_AS(optim::momentum_update(state, optim::OptimizerKind::gd, g),
                    std::invalid_argument);
}

TEST_CASE("update directions are scale invariant where the theory says so") {
    std::mt19937_64 gen(79);
    const Matrix g = random_matrix(7, gen);
    for (double c : {0.01, 7.0}) {
        CHECK(max_abs_entry(optim::update_direction(optim::OptimizerKind::sign_gd, c * g) -
                            optim::update_direction(optim::OptimizerKind::sign_gd, g)) == 0.0);
        CHECK(max_abs_entry(optim::update_direction(optim::OptimizerKind::muon_exact, c * g) -
                            optim::update_direction(optim::OptimizerKind::muon_exact, g)) <
              1e-10);
    }
}
