#include <doctest.h>

#include <cmath>

#include "rmtedge/decomposition.hpp"
#include "rmtedge/errors.hpp"
#include "rmtedge/rng.hpp"
#include "rmtedge/theta.hpp"
#include "support/oracles.hpp"

using namespace rmtedge;

TEST_CASE("build_theta solves the two-piece law") {
    const ThetaSpec s = build_theta(3.0, 1.0);
    CHECK(s.core_height == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(s.tail_amplitude == doctest::Approx(0.375).epsilon(1e-14));
    // c = 0.125 * 2 sqrt(pi)
    CHECK(s.c_const == doctest::Approx(0.25 * std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(s.c_const == doctest::Approx(0.443113).epsilon(1e-5));
}

TEST_CASE("build_theta invariants hold by quadrature at alpha = 2.2") {
    const ThetaSpec s = build_theta(2.2, 1.0);
    // mass on the core + closed-form tail mass
    const double core_mass = testsupport::adaptive_simpson(
        [&](double x) { return theta_density(s, x); }, -s.s0, s.s0, 1e-14);
    const double tail_mass = 2.0 * (s.tail_amplitude / s.alpha) * std::pow(s.s0, -s.alpha);
    CHECK(core_mass + tail_mass == doctest::Approx(1.0).epsilon(1e-12));
    // variance: numeric core + numeric tail out to a far cutoff + closed remainder
    const double var_core = testsupport::adaptive_simpson(
        [&](double x) { return x * x * theta_density(s, x); }, -s.s0, s.s0, 1e-14);
    const double far = 1e6;
    const double var_tail = 2.0 * testsupport::adaptive_simpson(
        [&](double x) { return x * x * theta_density(s, x); }, s.s0, far, 1e-14);
    const double var_rem = 2.0 * s.tail_amplitude * std::pow(far, 2.0 - s.alpha) / (s.alpha - 2.0);
    CHECK(var_core + var_tail + var_rem == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("build_theta rejects infeasible s0 and names the boundary") {
    // A = 0 at s0 = sqrt(3), h = 0 at s0 = sqrt((alpha-2)/alpha)
    CHECK_THROWS_AS(build_theta(3.0, 2.0), ConfigError);
    try {
        build_theta(3.0, 2.0);
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1.732") != std::string::npos);
    }
    CHECK_THROWS_AS(build_theta(3.0, 0.5), ConfigError);
    CHECK_THROWS_AS(build_theta(1.9, 1.0), ConfigError);
    CHECK_THROWS_AS(build_theta(4.0, 1.0), ConfigError);
}

TEST_CASE("theta_tail closed form") {
    const ThetaSpec s = build_theta(3.0, 1.0);
    CHECK(theta_tail(s, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(theta_tail(s, 1.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(theta_tail(s, 2.0) == doctest::Approx(0.015625).epsilon(1e-15));
}

TEST_CASE("tail-law exactness: P(Theta>s) Gamma(1-a/2)/(-c) = s^{-alpha}") {
    const ThetaSpec s = build_theta(2.7, 1.3);
    Rng rng(42);
    const double g = std::tgamma(1.0 - s.alpha / 2.0);
    for (int i = 0; i < 100; ++i) {
        const double x = s.s0 * (1.0 + 40.0 * rng.uniform());
        const double lhs = theta_tail(s, x) * g / (-s.c_const);
        CHECK(lhs == doctest::Approx(std::pow(x, -s.alpha)).epsilon(1e-13));
    }
}

TEST_CASE("sample_matrix determinism and moments") {
    const ThetaSpec s = build_theta(3.0, 1.0);
    const auto y1 = sample_matrix(s, 30, 60, 777);
    const auto y2 = sample_matrix(s, 30, 60, 777);
    CHECK((y1 - y2).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(sample_matrix(s, 60, 60, 1), ConfigError);

    const int m = 200, n = 400;
    const auto y = sample_matrix(s, m, n, 2024);
    double sum2 = 0.0;
    int big = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double th = y(i, j) * std::sqrt(static_cast<double>(n));
            sum2 += th * th;
            if (std::abs(th) > 2.0) ++big;
        }
    }
    CHECK(sum2 / (m * n) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(static_cast<double>(big) / (m * n) == doctest::Approx(0.03125).epsilon(0.32));
}

TEST_CASE("decompose thresholds and reconstruction") {
    const ThetaSpec s = build_theta(3.0, 1.0);
    const int n = 100;
    const auto params = DecompositionParams::paper_defaults(3.0, n);

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(4, n);
    SUBCASE("all zero") {
        const Decomposition d = decompose(y, params, s);
        CHECK(d.a_part.cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.b_part.cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.c_part.cwiseAbs().maxCoeff() == 0.0);
        CHECK_FALSE(d.psi_mask.any());
        CHECK_FALSE(d.chi_mask.any());
    }
    SUBCASE("single heavy entry lands in C") {
        y(1, 2) = params.hi_y * 1.5;
        const Decomposition d = decompose(y, params, s);
        CHECK(d.psi_mask(1, 2));
        CHECK(d.c_part(1, 2) == y(1, 2));
        CHECK(d.a_part(1, 2) == 0.0);
        CHECK(d.b_part(1, 2) == 0.0);
    }
    SUBCASE("intermediate entry lands in B") {
        y(0, 5) = 0.5 * (params.lo_y + params.hi_y);
        const Decomposition d = decompose(y, params, s);
        CHECK(d.chi_mask(0, 5));
        CHECK(d.b_part(0, 5) == y(0, 5));
        CHECK_FALSE(d.psi_mask(0, 5));
    }
    SUBCASE("reconstruction and mask partition on a sampled matrix") {
        const auto ys = sample_matrix(s, 40, n, 5);
        const Decomposition d = decompose(ys, params, s);
        CHECK(((d.a_part + d.b_part + d.c_part) - ys).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < 40; ++i) {
            for (int j = 0; j < n; ++j) {
                int nonzero = (d.a_part(i, j) != 0.0) + (d.b_part(i, j) != 0.0) +
                              (d.c_part(i, j) != 0.0);
                if (ys(i, j) != 0.0) CHECK(nonzero == 1);
            }
        }
    }
}

TEST_CASE("paper epsilon window is enforced") {
    CHECK_THROWS_AS(DecompositionParams::paper(3.0, 100, 1e-6, 0.2), ConfigError);
    CHECK_NOTHROW(DecompositionParams::paper(3.0, 100, 1e-7, 0.03));
    CHECK_NOTHROW(DecompositionParams::paper(3.0, 100, 0.01, 0.4, /*relax=*/true));
}

TEST_CASE("gaussian_time closed form") {
    const ThetaSpec s = build_theta(3.0, 1.0);
    // eps_a = 0: cutoff 1 = s0, pure core integral
    CHECK(gaussian_time(s, 1000, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
    // decreasing in eps_a
    double prev = 1.0;
    for (double e : {0.01, 0.05, 0.1, 0.3}) {
        const double t = gaussian_time(s, 1000, e);
        CHECK(t < prev);
        prev = t;
    }
    // full-mass limit is the unit variance
    CHECK(truncated_second_moment(s, 1e9) == doctest::Approx(1.0).epsilon(1e-10));
    // cutoff_for_time inverts
    const double q = cutoff_for_time(s, 0.25);
    CHECK(q == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("is_good threshold arithmetic") {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
    mask.setConstant(50, 100, false);
    SUBCASE("all false is good") {
        const auto rep = is_good(mask, 3.0);
        CHECK(rep.good);
        CHECK(rep.count == 0);
    }
    SUBCASE("count 74 at N=100, alpha=3 is not good; 73 is") {
        // threshold = 100^{14/15} ~ 73.56
        const double thr = std::pow(100.0, 14.0 / 15.0);
        CHECK(thr == doctest::Approx(73.56).epsilon(1e-3));
        int placed = 0;
        for (int i = 0; i < 50 && placed < 74; ++i) {
            for (int j = 0; j < 100 && placed < 74; ++j) {
                mask(i, j) = true;
                ++placed;
            }
        }
        auto rep = is_good(mask, 3.0);
        CHECK(rep.count == 74);
        CHECK_FALSE(rep.good);
        mask(0, 0) = false;
        rep = is_good(mask, 3.0);
        CHECK(rep.count == 73);
        CHECK(rep.good);
    }
    SUBCASE("goodness is monotone in the mask") {
        Rng rng(9);
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 100; ++j) {
                mask(i, j) = rng.uniform() < 0.007;
            }
        }
        auto before = is_good(mask, 3.0);
        mask(10, 10) = true;
        auto after = is_good(mask, 3.0);
        if (!before.good) CHECK_FALSE(after.good);
    }
}

TEST_CASE("phi_char basics and expansion agreement") {
    const ThetaSpec s = build_theta(3.0, 1.0);
    SUBCASE("lambda = 0 gives exactly 1") {
        const PhiChar p = phi_char(s, 0.0, 1000);
        CHECK(std::abs(p.quadrature - 1.0) < 1e-12);
        CHECK(std::abs(p.expansion - 1.0) < 1e-15);
    }
    SUBCASE("characteristic-function bound") {
        Rng rng(3);
        for (int i = 0; i < 10; ++i) {
            const std::complex<double> lam(4.0 * rng.uniform() - 2.0, -rng.uniform());
            const PhiChar p = phi_char(s, lam, 500);
            CHECK(std::abs(p.quadrature) <= 1.0 + 1e-10);
        }
    }
    SUBCASE("difference bounded by the remainder scale") {
        // constructed law has zero Assumption-1 remainder; the surviving
        // difference is of the (|lambda|/N)^{alpha/2} order itself
        const int n = 10000;
        const PhiChar p = phi_char(s, 1.0, n);
        const double scale = std::pow(static_cast<double>(n), -s.alpha / 2.0);
        CHECK(std::abs(p.difference) <= 5.0 * scale);
        CHECK_THROWS_AS(phi_char(s, {0.0, 0.5}, n), ConfigError);
    }
}
