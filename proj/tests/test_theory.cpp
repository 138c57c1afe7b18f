#include <doctest.h>

#include <cmath>
#include <complex>

#include "rmtedge/errors.hpp"
#include "rmtedge/free_convolution.hpp"
#include "rmtedge/rng.hpp"
#include "rmtedge/theory.hpp"

using namespace rmtedge;
using cplx = std::complex<double>;

namespace {

TheoryInputs inputs(double alpha, double c, double cc, double n, double t) {
    return TheoryInputs{alpha, c, cc, n, t};
}

}  // namespace

TEST_CASE("gamma function accuracy anchors") {
    CHECK(std::tgamma(-0.5) == doctest::Approx(-2.0 * std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(std::tgamma(2.5) == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(std::tgamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
    // Gamma(7/3) high-precision reference
    CHECK(std::tgamma(7.0 / 3.0) == doctest::Approx(1.190639348758999).epsilon(1e-13));
    CHECK(std::tgamma(1.0 - 1.1) == doctest::Approx(-10.686287021193193).epsilon(1e-13));
}

TEST_CASE("sigma_alpha closed form") {
    const auto inp = inputs(3.0, 0.25, 1.0, 1e3, 0.1);
    const double want2 = std::pow(0.25, 0.25) * std::pow(0.5, 4.0) * 0.5 * std::tgamma(2.5);
    CHECK(sigma_alpha(inp) == doctest::Approx(std::sqrt(want2)).epsilon(1e-13));
    // vanishes toward alpha = 2
    CHECK(sigma_alpha(inputs(2.0001, 0.25, 1.0, 1e3, 0.1)) < 0.02);
    // sqrt-linearity in the tail constant
    CHECK(sigma_alpha(inputs(3.0, 0.25, 2.0, 1e3, 0.1)) ==
          doctest::Approx(std::sqrt(2.0) * sigma_alpha(inp)).epsilon(1e-13));
}

TEST_CASE("lambda_shift closed form") {
    const auto inp = inputs(3.0, 0.25, 1.0, 1000.0, 0.1);
    const double term = std::pow(1000.0, -0.5) * 0.25 / std::pow(0.25, 0.25) * std::tgamma(2.5);
    CHECK(lambda_shift_term(inp) == doctest::Approx(term).epsilon(1e-13));
    CHECK(lambda_shift(inp) == doctest::Approx(0.25 - term).epsilon(1e-13));
    // N -> infinity recovers the MP edge
    CHECK(lambda_shift(inputs(3.0, 0.25, 1.0, 1e12, 0.1)) ==
          doctest::Approx(0.25).epsilon(1e-5));
    // alpha = 10/3: the shift term scaled by N^{2/3} is N-free
    const double a = 10.0 / 3.0;
    const double s1 = lambda_shift_term(inputs(a, 0.25, 1.0, 1e4, 0.1)) * std::pow(1e4, 2.0 / 3.0);
    const double s2 = lambda_shift_term(inputs(a, 0.25, 1.0, 1e6, 0.1)) * std::pow(1e6, 2.0 / 3.0);
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
}

TEST_CASE("tilde_sigma_critical closed form") {
    const double want2 =
        std::pow(0.25, 2.0 / 3.0) * std::pow(0.5, 4.0 / 3.0) * std::tgamma(7.0 / 3.0) / 3.0;
    CHECK(tilde_sigma_critical(0.25, 1.0) == doctest::Approx(std::sqrt(want2)).epsilon(1e-13));
    CHECK(tilde_sigma_critical(0.25, 2.0) ==
          doctest::Approx(std::sqrt(2.0) * tilde_sigma_critical(0.25, 1.0)).epsilon(1e-13));
    // at alpha = 8/3 the fluctuation exponents alpha/4 and 2/3 coincide
    CHECK((8.0 / 3.0) / 4.0 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("p_transform identity at the MP edge point") {
    const double c = 0.25;
    const double m0 = 1.0 / (std::sqrt(c) - c);
    const auto inp = inputs(3.0, c, 1.0, 1e4, 0.05);
    const PTransform p = p_transform(inp, m0);
    // m^{a/2} (1 + c m)^{-a/2-1} = c^{-a/4} (1 - sqrt(c))
    const double simplified = std::pow(c, -3.0 / 4.0) * (1.0 - std::sqrt(c));
    const double want = 1.0 * std::pow(1e4, -0.5) * c * std::tgamma(2.5) * simplified;
    CHECK(p.closed_form.real() == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(p.closed_form.imag()) < 1e-18);
    CHECK(std::abs(p.quadrature - p.closed_form) / std::abs(p.closed_form) <= 1e-9);
}

TEST_CASE("p_transform agreement on random admissible points") {
    Rng rng(77);
    for (double alpha : {2.2, 2.7, 3.0, 3.6}) {
        const auto inp = inputs(alpha, 0.25, 0.7, 1e5, 0.05);
        for (int k = 0; k < 12; ++k) {
            const cplx m(0.2 + 6.0 * rng.uniform(), 2.0 * rng.uniform() - 1.0);
            const PTransform p = p_transform(inp, m);
            CHECK(std::abs(p.quadrature - p.closed_form) / std::abs(p.closed_form) <= 1e-9);
        }
    }
    SUBCASE("real positive m gives a real positive transform at alpha = 3") {
        const auto inp = inputs(3.0, 0.25, 1.0, 1e4, 0.05);
        const PTransform p = p_transform(inp, 2.0);
        CHECK(p.closed_form.real() > 0.0);
        CHECK(std::abs(p.closed_form.imag()) < 1e-18);
    }
    SUBCASE("inadmissible m rejected") {
        const auto inp = inputs(3.0, 0.25, 1.0, 1e4, 0.05);
        CHECK_THROWS_AS(p_transform(inp, cplx(-8.0, 0.0)), ConfigError);
    }
}

TEST_CASE("m_shift evaluation near the deterministic edge") {
    const double c = 0.25, t = 0.05, n = 1e5, alpha = 3.0;
    const auto inp = inputs(alpha, c, 1.0, n, t);
    const MPParams mp(c);
    const double zbar = deterministic_edge(mp, t).zeta_bar;
    const cplx zh(zbar, 1e-12);
    const MShift ms = m_shift_eval(inp, zh);

    SUBCASE("matches the edge-limit integral form within C t N^{1-alpha/2}") {
        const double m0 = 1.0 / (std::sqrt(c) - c);
        // int e^{-s(1+c m0)} (s m0)^{a/2} ds = Gamma(a/2+1) m0^{a/2} (1+c m0)^{-a/2-1}
        const double integral = std::tgamma(alpha / 2.0 + 1.0) * std::pow(m0, alpha / 2.0) /
                                std::pow(1.0 + c * m0, alpha / 2.0 + 1.0);
        const double c2 = 1.0 * std::pow(n, 1.0 - alpha / 2.0) * integral /
                          (2.0 * std::sqrt(c) * (1.0 - std::sqrt(c)));
        const double scale = t * std::pow(n, 1.0 - alpha / 2.0);
        CHECK(std::abs(t * ms.m_shift - c2) <= 10.0 * scale);
    }
    SUBCASE("order bound |m_shift| <= C t^{-1} N^{1-alpha/2}") {
        CHECK(std::abs(ms.m_shift) <= 10.0 / t * std::pow(n, 1.0 - alpha / 2.0));
    }
    SUBCASE("composite expectation expansion stays near m^(t)") {
        const cplx mt = mp_stieltjes_scaled(mp, t, zh, 0);
        const double bound = 100.0 / t * std::pow(n, 1.0 - alpha / 2.0);
        CHECK(std::abs(ms.em_x - mt) <= bound);
    }
    SUBCASE("real-axis point inside the support is a branch error") {
        CHECK_THROWS_AS(m_shift_eval(inp, cplx(0.3, 0.0)), BranchError);
    }
}

TEST_CASE("m_shift route reproduces the lambda_shift displacement at t = 0.01") {
    const double c = 0.25, t = 0.01, alpha = 3.0, n = 1e6;
    const auto inp = inputs(alpha, c, 1.0, n, t);
    const double zbar = deterministic_edge(MPParams(c), t).zeta_bar;
    const MShift ms = m_shift_eval(inp, cplx(zbar, 1e-12));
    const double lm = 0.25;
    const double route = 2.0 * c * lm * (t * ms.m_shift).real();
    CHECK(std::abs(route - lambda_shift_term(inp)) / lambda_shift_term(inp) <= 0.10);
}

TEST_CASE("clt_kernel symmetry, conjugation, and the sigma identity") {
    const double c = 0.25, t = 0.05, alpha = 3.0;
    const auto inp = inputs(alpha, c, 1.0, 1e4, t);
    const double zbar = deterministic_edge(MPParams(c), t).zeta_bar;
    SUBCASE("symmetry in the two arguments") {
        const cplx z(zbar, 1e-6), zp(zbar * 0.999, 2e-6);
        const cplx k1 = clt_kernel(inp, z, zp);
        const cplx k2 = clt_kernel(inp, zp, z);
        CHECK(std::abs(k1 - k2) / std::abs(k1) < 1e-9);
    }
    SUBCASE("conjugation") {
        const cplx z(zbar, 1e-6), zp(zbar * 0.999, 2e-6);
        const cplx k1 = clt_kernel(inp, z, zp);
        const cplx k2 = clt_kernel(inp, std::conj(z), std::conj(zp));
        CHECK(std::abs(k2 - std::conj(k1)) / std::abs(k1) < 1e-9);
    }
    SUBCASE("2 c lambda_- sigma_m tracks sigma_alpha within 25%") {
        const double sm = sigma_m(inp);
        const double sa = sigma_alpha(inp);
        CHECK(std::abs(2.0 * c * 0.25 * sm - sa) / sa <= 0.25);
    }
}
