#include "rmtedge/theory.hpp"

#include <cmath>
#include <sstream>

#include "rmtedge/errors.hpp"
#include "rmtedge/free_convolution.hpp"
#include "rmtedge/quadrature.hpp"

namespace rmtedge {

namespace {

using cplx = std::complex<double>;

void validate(const TheoryInputs& inp) {
    if (!(inp.alpha > 2.0 && inp.alpha < 4.0)) throw ConfigError("theory: alpha in (2,4) required");
    if (!(inp.c > 0.0) || inp.c == 1.0) throw ConfigError("theory: c in (0,1)u(1,inf) required");
    if (!(inp.c_const > 0.0)) throw ConfigError("theory: c_const > 0 required");
}

}  // namespace

double sigma_alpha(const TheoryInputs& inp) {
    validate(inp);
    const double r = std::sqrt(inp.c);
    const double s2 = inp.c_const * std::pow(inp.c, (4.0 - inp.alpha) / 4.0) *
                      std::pow(1.0 - r, 4.0) * (inp.alpha - 2.0) / 2.0 *
                      std::tgamma(inp.alpha / 2.0 + 1.0);
    return std::sqrt(s2);
}

double lambda_shift_term(const TheoryInputs& inp) {
    validate(inp);
    const double r = std::sqrt(inp.c);
    return inp.c_const * std::pow(inp.n, 1.0 - inp.alpha / 2.0) * (1.0 - r) * (1.0 - r) /
           std::pow(inp.c, (inp.alpha - 2.0) / 4.0) * std::tgamma(inp.alpha / 2.0 + 1.0);
}

double lambda_shift(const TheoryInputs& inp) {
    const double r = std::sqrt(inp.c);
    return (1.0 - r) * (1.0 - r) - lambda_shift_term(inp);
}

double tilde_sigma_critical(double c, double c_const) {
    if (!(c > 0.0) || c == 1.0) throw ConfigError("tilde_sigma_critical: bad c");
    const double r = std::sqrt(c);
    const double s2 = c_const * std::pow(c, 2.0 / 3.0) * std::pow(1.0 - r, 4.0 / 3.0) *
                      std::tgamma(7.0 / 3.0) / 3.0;
    return std::sqrt(s2);
}

PTransform p_transform(const TheoryInputs& inp, cplx m) {
    validate(inp);
    const double c = inp.c;
    const cplx one_cm = 1.0 + c * m;
    if (!(one_cm.real() > 0.0)) {
        throw ConfigError("p_transform: Re(1 + c m) > 0 required");
    }
    const double a2 = inp.alpha / 2.0;
    const double pref = inp.c_const * std::pow(inp.n, 1.0 - a2) * c;

    PTransform out;
    out.closed_form =
        pref * std::tgamma(a2 + 1.0) * std::pow(m, a2) / std::pow(one_cm, a2 + 1.0);

    auto integrand = [&](double s) -> cplx {
        return std::exp(-s * one_cm) * std::pow(s * m, a2);
    };
    const double span = 50.0 / std::max(one_cm.real(), 1e-3);
    int panels_used = 0;
    double delta = 0.0;
    cplx integral = converge_doubling(
        [&](int panels) { return graded_integrate(integrand, 0.0, span, panels); },
        8, 256, 1e-11, &panels_used, &delta);
    if (delta > 1e-10) {
        std::ostringstream msg;
        msg << "p_transform: quadrature stalled at " << panels_used
            << " panels, delta " << delta;
        throw NumericError(msg.str());
    }
    out.quadrature = pref * integral;

    const double rel = std::abs(out.quadrature - out.closed_form) /
                       std::max(std::abs(out.closed_form), 1e-300);
    if (rel > 1e-9) {
        std::ostringstream msg;
        msg << "p_transform: quadrature/closed-form disagreement " << rel;
        throw NumericError(msg.str());
    }
    return out;
}

MShift m_shift_eval(const TheoryInputs& inp, cplx z) {
    validate(inp);
    const MPParams mp(inp.c);
    auto [lm, lp] = mp_edges(mp);
    const double omt = 1.0 - inp.t;
    const cplx w = z / omt;
    if (w.imag() == 0.0 && z.imag() == 0.0) {
        const double wr = w.real();
        if (wr >= lm && wr <= lp) {
            throw BranchError("m_shift_eval: z/(1-t) inside the MP support on the real axis");
        }
    }
    const cplx mt = mp_stieltjes_scaled(mp, inp.t, z, 0);
    const cplx p = p_transform(inp, mt).closed_form;
    const cplx i(0.0, 1.0);
    const cplx rad = (w - lm) * (lp - w);
    const cplx root = std::sqrt(rad);
    if (root == cplx(0.0, 0.0)) {
        throw BranchError("m_shift_eval: z/(1-t) at an MP edge");
    }
    MShift out;
    out.p_value = p;
    out.m_shift = i * (w - inp.c + 1.0) * p / (2.0 * inp.c * z * root);
    out.em_x = mt + out.m_shift - p / (2.0 * inp.c * z);
    return out;
}

cplx clt_kernel(const TheoryInputs& inp, cplx z, cplx zp) {
    validate(inp);
    const MPParams mp(inp.c);
    const double c = inp.c;
    const double a2 = inp.alpha / 2.0;
    const cplx mz = mp_stieltjes_scaled(mp, inp.t, z, 0);
    const cplx mw = mp_stieltjes_scaled(mp, inp.t, zp, 0);
    const cplx dz = mp_stieltjes_scaled(mp, inp.t, z, 1);
    const cplx dw = mp_stieltjes_scaled(mp, inp.t, zp, 1);
    const cplx a = 1.0 + c * mz;
    const cplx b = 1.0 + c * mw;
    if (!(a.real() > 0.0 && b.real() > 0.0 && mz.real() > 0.0 && mw.real() > 0.0)) {
        throw BranchError("clt_kernel: evaluation point outside the admissible region "
                          "(Re m and Re(1 + c m) must be positive)");
    }
    const double g0 = std::tgamma(a2);
    const double g1 = std::tgamma(a2 + 1.0);
    const double g2 = std::tgamma(a2 + 2.0);

    // the radial part of the double Laguerre integral is exact; xi remains:
    //   G(xi) = c^2 g2 A^{-a2-2} [mu^{a2} - (xi mz)^{a2} - ((1-xi) mw)^{a2}]
    //         - a2 c g1 A^{-a2-1} [2 mu^{a2-1} - (xi mz)^{a2-1} - ((1-xi) mw)^{a2-1}]
    //         + a2 (a2-1) g0 A^{-a2} mu^{a2-2},
    // with A(xi) = xi a + (1-xi) b and mu(xi) = xi mz + (1-xi) mw.
    auto g = [&](double xi) -> cplx {
        const cplx A = xi * a + (1.0 - xi) * b;
        const cplx mu = xi * mz + (1.0 - xi) * mw;
        const cplx sm = xi * mz;
        const cplx sw = (1.0 - xi) * mw;
        const cplx t1 = c * c * g2 * std::pow(A, -a2 - 2.0) *
                        (std::pow(mu, a2) - std::pow(sm, a2) - std::pow(sw, a2));
        const cplx t23 = -a2 * c * g1 * std::pow(A, -a2 - 1.0) *
                         (2.0 * std::pow(mu, a2 - 1.0) - std::pow(sm, a2 - 1.0) -
                          std::pow(sw, a2 - 1.0));
        const cplx t4 = a2 * (a2 - 1.0) * g0 * std::pow(A, -a2) * std::pow(mu, a2 - 2.0);
        return t1 + t23 + t4;
    };
    int n_used = 0;
    double delta = 0.0;
    cplx integral = converge_doubling(
        [&](int n) { return gl_integrate(g, 0.0, 1.0, n); }, 64, 8192, 1e-7,
        &n_used, &delta);
    if (delta > 1e-7) {
        std::ostringstream msg;
        msg << "clt_kernel: quadrature not converged at n = " << n_used
            << ", last delta " << delta;
        throw NumericError(msg.str());
    }
    const double pref = inp.c_const * std::pow(inp.n, 1.0 - a2) * inp.t * inp.t * c;
    return pref * dz * dw * integral;
}

double sigma_m(const TheoryInputs& inp) {
    const MPParams mp(inp.c);
    const double zbar = deterministic_edge(mp, inp.t).zeta_bar;
    const cplx k = clt_kernel(inp, zbar, zbar);
    const double s2 = k.real() * std::pow(inp.n, inp.alpha / 2.0 - 1.0) / inp.c;
    if (!(s2 > 0.0)) throw NumericError("sigma_m: nonpositive variance");
    return std::sqrt(s2);
}

}  // namespace rmtedge
