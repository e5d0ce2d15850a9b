#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pctate/estimators.hpp"
#include "pctate/rng.hpp"
#include "pctate/shares.hpp"

using namespace pctate;

namespace {

ShareEstimates weights(std::initializer_list<double> w) {
    Eigen::VectorXd v(static_cast<long>(w.size()));
    long i = 0;
    for (double x : w) v[i++] = x;
    return fixed_shares(v);
}

EffectEstimates effects_of(std::initializer_list<double> tau,
                           std::initializer_list<double> var = {}, int df = 100) {
    EffectEstimates effects;
    effects.tau_hat.resize(static_cast<long>(tau.size()));
    long i = 0;
    for (double t : tau) effects.tau_hat[i++] = t;
    effects.cov_tau = Eigen::MatrixXd::Zero(effects.tau_hat.size(), effects.tau_hat.size());
    i = 0;
    for (double v : var) effects.cov_tau(i, i) = v, ++i;
    effects.residual_df = df;
    return effects;
}

// Independent series oracle in extended precision, fixed term count.
long double hyp0f1_oracle(long double a, long double b, int terms = 50) {
    long double sum = 1.0L, term = 1.0L;
    for (int n = 0; n < terms; ++n) {
        term *= b / ((a + n) * (n + 1));
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_CASE("tau_bar is the share-weighted average of tau") {
    CHECK(ate_log(weights({0.5, 0.5}), effects_of({-0.2, 0.2})) ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ate_log(weights({1.0}), effects_of({0.07})) == doctest::Approx(0.07).epsilon(1e-14));
    CHECK(ate_log(weights({0.8, 0.2}), effects_of({0.08, -0.02})) ==
          doctest::Approx(0.06).epsilon(1e-13));
}

TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(ate_log(weights({0.5, 0.5}), effects_of({0.1})), DimensionError);
}

TEST_CASE("rho_a is expm1") {
    CHECK(rho_a(0.0) == 0.0);
    CHECK(rho_a(-0.2) == doctest::Approx(std::exp(-0.2) - 1.0).epsilon(1e-14));
}

TEST_CASE("rho_b reproduces the worked Jensen-gap examples") {
    CHECK(rho_b(weights({0.5, 0.5}), effects_of({-0.2, 0.2})) ==
          doctest::Approx(0.0200667).epsilon(1e-5));
    CHECK(rho_b(weights({0.8, 0.2}), effects_of({0.08, -0.02})) ==
          doctest::Approx(0.0627).epsilon(1e-3));
    CHECK(rho_b(weights({0.3, 0.7}), effects_of({0.0, 0.0})) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("rho_c applies the half-variance correction") {
    CHECK(rho_c(weights({0.5, 0.5}), effects_of({-0.2, 0.2})) ==
          rho_b(weights({0.5, 0.5}), effects_of({-0.2, 0.2})));
    CHECK(rho_c(weights({1.0}), effects_of({0.1}, {0.02})) ==
          doctest::Approx(std::exp(0.09) - 1.0).epsilon(1e-14));
    CHECK(rho_c(weights({0.5, 0.5}), effects_of({0.1, 0.1}, {0.02, 0.02})) ==
          doctest::Approx(std::exp(0.09) - 1.0).epsilon(1e-13));
}

TEST_CASE("negative variances are rejected") {
    CHECK_THROWS_AS(rho_c(weights({1.0}), effects_of({0.1}, {-0.01})), InvalidCovariance);
}

TEST_CASE("Jensen ordering holds for random inputs") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int g = 2 + static_cast<int>(rng.next_u64() % 5);
        Eigen::VectorXd w(g);
        for (int i = 0; i < g; ++i) w[i] = rng.uniform() + 0.05;
        const ShareEstimates shares = fixed_shares(w);
        EffectEstimates effects;
        effects.tau_hat.resize(g);
        for (int i = 0; i < g; ++i) effects.tau_hat[i] = rng.normal();
        effects.cov_tau = Eigen::MatrixXd::Zero(g, g);
        effects.residual_df = 50;

        const double tb = ate_log(shares, effects);
        const double ra = rho_a(tb);
        const double rb = rho_b(shares, effects);
        CHECK(rb >= ra - 1e-12);
        CHECK(ra >= tb - 1e-12);
    }
}

TEST_CASE("rho_c never exceeds rho_b under nonnegative variances") {
    Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        const ShareEstimates shares = weights({0.2, 0.3, 0.5});
        EffectEstimates effects = effects_of({rng.normal(), rng.normal(), rng.normal()});
        for (int i = 0; i < 3; ++i) effects.cov_tau(i, i) = rng.uniform() * 0.1;
        CHECK(rho_c(shares, effects) <= rho_b(shares, effects) + 1e-14);
    }
}

TEST_CASE("hyp0f1 basic values") {
    CHECK(hyp0f1(3.0, 0.0) == 1.0);
    CHECK(hyp0f1(0.5, 1.0) == doctest::Approx(std::cosh(2.0)).epsilon(1e-13));
}

TEST_CASE("hyp0f1 matches the cosh identity on a grid") {
    for (int i = 1; i <= 10; ++i) {
        const double x = 0.1 * i;
        CHECK(std::fabs(hyp0f1(0.5, x * x) - std::cosh(2.0 * x)) < 1e-12);
    }
}

TEST_CASE("hyp0f1 matches a high-precision series oracle") {
    CHECK(hyp0f1(9.0, -0.09) ==
          doctest::Approx(static_cast<double>(hyp0f1_oracle(9.0L, -0.09L))).epsilon(1e-14));
    CHECK(hyp0f1(2.5, 0.4) ==
          doctest::Approx(static_cast<double>(hyp0f1_oracle(2.5L, 0.4L))).epsilon(1e-14));
}

TEST_CASE("hyp0f1 approaches exp monotonically in m") {
    for (double x : {-0.5, -0.1, 0.3, 0.5}) {
        double previous = 1e300;
        for (double m : {1e2, 1e3, 1e4, 1e5}) {
            const double err = std::fabs(hyp0f1(m / 2.0, (m / 2.0) * x) - std::exp(x));
            CHECK(err < previous);
            previous = err;
        }
        CHECK(std::fabs(hyp0f1(5e5, 5e5 * x) - std::exp(x)) <= 1e-6);
    }
}

TEST_CASE("hyp0f1 rejects nonpositive a") {
    CHECK_THROWS_AS(hyp0f1(0.0, 1.0), InputError);
}

TEST_CASE("rho_d equals rho_b at zero variance and tracks the oracle") {
    CHECK(rho_d(weights({0.5, 0.5}), effects_of({-0.2, 0.2})) ==
          rho_b(weights({0.5, 0.5}), effects_of({-0.2, 0.2})));

    const double expected =
        std::exp(0.1) * static_cast<double>(hyp0f1_oracle(9.0L, -0.09L)) - 1.0;
    CHECK(rho_d(weights({1.0}), effects_of({0.1}, {0.02}, 18)) ==
          doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("rho_d converges to rho_c for huge residual df") {
    const ShareEstimates shares = weights({0.4, 0.6});
    EffectEstimates effects = effects_of({0.15, -0.05}, {0.03, 0.01}, 1000000);
    CHECK(std::fabs(rho_d(shares, effects) - rho_c(shares, effects)) <= 1e-6);
}

TEST_CASE("point_estimates bundles everything and flags clustering") {
    const ShareEstimates shares = weights({1.0});
    EffectEstimates effects = effects_of({0.0}, {0.0});
    PointEstimates points = point_estimates(shares, effects);
    CHECK(points.tau_bar == 0.0);
    CHECK(points.rho_a == 0.0);
    CHECK(points.rho_b == 0.0);
    CHECK(points.rho_c == 0.0);
    CHECK(points.rho_d == 0.0);
    CHECK_FALSE(points.rho_d_approximate);

    effects.clustered_cov = true;
    points = point_estimates(shares, effects);
    CHECK(points.rho_d_approximate);
    CHECK(points.rho_a == points.rho_b);
}
