#include <doctest.h>

#include <cmath>
#include <complex>

#include "rmtedge/errors.hpp"
#include "rmtedge/mp_law.hpp"
#include "rmtedge/rng.hpp"
#include "support/oracles.hpp"

using namespace rmtedge;
using cplx = std::complex<double>;

TEST_CASE("mp_edges closed form") {
    CHECK(mp_edges(MPParams(0.25)).first == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mp_edges(MPParams(0.25)).second == doctest::Approx(2.25).epsilon(1e-15));
    const double r = std::sqrt(0.5);
    CHECK(mp_edges(MPParams(0.5)).first == doctest::Approx((1 - r) * (1 - r)));
    CHECK(mp_edges(MPParams(0.5)).second == doctest::Approx((1 + r) * (1 + r)));
    CHECK_THROWS_AS(MPParams(1.0), ConfigError);
}

TEST_CASE("mp_density support, mass, and edge vanishing") {
    const MPParams p(0.25);
    auto [lm, lp] = mp_edges(p);
    CHECK(mp_density(p, lm * 0.5) == 0.0);
    CHECK(mp_density(p, lp * 1.5) == 0.0);
    const double mass = testsupport::adaptive_simpson(
        [&](double x) { return mp_density(p, x); }, lm, lp, 1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    // atom only for c > 1
    CHECK(mp_atom_mass(p) == 0.0);
    CHECK(mp_atom_mass(MPParams(2.0)) == doctest::Approx(0.5));
    const double heavy_mass = testsupport::adaptive_simpson(
        [&](double x) { return mp_density(MPParams(2.0), x); },
        mp_edges(MPParams(2.0)).first, mp_edges(MPParams(2.0)).second, 1e-12);
    CHECK(heavy_mass == doctest::Approx(0.5).epsilon(1e-8));
    // square-root vanishing at the left edge: rho(lm + d)/sqrt(d) stabilizes
    const double r1 = mp_density(p, lm + 1e-6) / std::sqrt(1e-6);
    const double r2 = mp_density(p, lm + 1e-8) / std::sqrt(1e-8);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-3));
}

TEST_CASE("mp_stieltjes closed form and quadratic residual") {
    SUBCASE("value at the left edge is 1/(sqrt(c) - c)") {
        for (double c : {0.1, 0.25, 0.5, 0.8}) {
            const MPParams p(c);
            const double lm = mp_edges(p).first;
            const cplx m = mp_stieltjes(p, {lm, 0.0});
            CHECK(std::abs(m - 1.0 / (std::sqrt(c) - c)) < 1e-10);
        }
    }
    SUBCASE("quadratic residual on an upper-half-plane grid") {
        const MPParams p(0.25);
        const double c = 0.25;
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 10; ++j) {
                const cplx z(-1.0 + 0.25 * i, 0.05 + 0.3 * j);
                const cplx m = mp_stieltjes(p, z);
                const cplx resid = z * c * m * m + (z - (1.0 - c)) * m + 1.0;
                CHECK(std::abs(resid) <= 1e-12);
            }
        }
    }
    SUBCASE("agrees with the quadratic-root oracle at c = 0.5, z = i") {
        const double c = 0.5;
        const cplx z(0.0, 1.0);
        // roots of c z m^2 + (z - (1-c)) m + 1 = 0, pick Im > 0
        const cplx a = c * z, b = z - (1.0 - c), d = 1.0;
        const cplx disc = std::sqrt(b * b - 4.0 * a * d);
        cplx r1 = (-b + disc) / (2.0 * a), r2 = (-b - disc) / (2.0 * a);
        const cplx want = r1.imag() > 0.0 ? r1 : r2;
        CHECK(std::abs(mp_stieltjes(MPParams(c), z) - want) < 1e-13);
    }
    SUBCASE("z = 0 is a pole") {
        CHECK_THROWS_AS(mp_stieltjes(MPParams(0.25), {0.0, 0.0}), PoleError);
    }
}

TEST_CASE("mp_stieltjes branch properties") {
    const MPParams p(0.25);
    SUBCASE("Herglotz on a 50x50 grid") {
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                const cplx z(-2.0 + 0.12 * i, 1e-3 + 0.08 * j);
                CHECK(mp_stieltjes(p, z).imag() > 0.0);
            }
        }
    }
    SUBCASE("conjugate symmetry") {
        Rng rng(5);
        for (int i = 0; i < 25; ++i) {
            const cplx z(3.0 * rng.uniform() - 0.5, 0.01 + 2.0 * rng.uniform());
            const cplx m1 = mp_stieltjes(p, z);
            const cplx m2 = mp_stieltjes(p, std::conj(z));
            CHECK(std::abs(m2 - std::conj(m1)) < 1e-13);
        }
    }
    SUBCASE("large-z decay |z m + 1| <= C/|z|") {
        for (double r : {100.0, 300.0, 1000.0}) {
            const cplx z(r, r);
            CHECK(std::abs(z * mp_stieltjes(p, z) + 1.0) <= 10.0 / std::abs(z));
        }
    }
    SUBCASE("density/transform consistency in the bulk") {
        auto [lm, lp] = mp_edges(p);
        for (double x : {0.4, 0.8, 1.2, 1.8, 2.1}) {
            REQUIRE(x > lm);
            REQUIRE(x < lp);
            const double im = mp_stieltjes(p, {x, 1e-8}).imag() / M_PI;
            CHECK(im == doctest::Approx(mp_density(p, x)).epsilon(1e-4));
        }
    }
}

TEST_CASE("mp_stieltjes_scaled values and derivatives") {
    const MPParams p(0.25);
    const double c = 0.25;
    SUBCASE("t = 0 reduces to the plain transform") {
        const cplx z(0.1, 0.2);
        CHECK(std::abs(mp_stieltjes_scaled(p, 0.0, z, 0) - mp_stieltjes(p, z)) < 1e-14);
    }
    SUBCASE("derivatives match finite differences") {
        const cplx z(0.15, 0.0);
        const double h = 1e-6;
        for (int k = 1; k <= 3; ++k) {
            const cplx fd = (mp_stieltjes_scaled(p, 0.1, z + h, k - 1) -
                             mp_stieltjes_scaled(p, 0.1, z - h, k - 1)) /
                            (2.0 * h);
            const cplx an = mp_stieltjes_scaled(p, 0.1, z, k);
            CHECK(std::abs(fd - an) / std::abs(an) < 1e-6);
        }
    }
    SUBCASE("value at zeta_bar matches the small-t expansion") {
        const double lm = mp_edges(p).first;
        const double m0 = 1.0 / (std::sqrt(c) - c);
        for (double t : {0.05, 0.1}) {
            const double zbar = (1.0 - t) * lm - std::sqrt(c) * t * t;
            const cplx m = mp_stieltjes_scaled(p, t, {zbar, 0.0}, 0);
            const double expect = m0 - t / (std::sqrt(c) * (1.0 - std::sqrt(c)) *
                                            (1.0 - std::sqrt(c)));
            CHECK(std::abs(m - expect) <= 8.0 * std::pow(t, 1.5));
        }
    }
    SUBCASE("t times derivative at zeta_bar approaches the stated limit") {
        const double lm = mp_edges(p).first;
        const double limit = 1.0 / (c * (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c))) / 2.0;
        for (double t : {0.02, 0.05}) {
            const double zbar = (1.0 - t) * lm - std::sqrt(c) * t * t;
            const cplx d1 = mp_stieltjes_scaled(p, t, {zbar, 0.0}, 1);
            CHECK(std::abs(t * d1 - limit) <= 30.0 * std::sqrt(t));
        }
    }
}
