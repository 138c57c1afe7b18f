#include "rmtedge/free_convolution.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "rmtedge/errors.hpp"

namespace rmtedge {

namespace {

using cplx = std::complex<double>;

cplx zeta_of(cplx z, cplx m, double c, double t) {
    const cplx b = 1.0 + c * t * m;
    return b * b * z - t * (1.0 - c) * b;
}

// RHS of the fixed-point equation at given m
cplx fpe_rhs(const Spectrum& spec, double t, cplx z, cplx m) {
    const double c = spec.c_n;
    const cplx b = 1.0 + c * t * m;
    const cplx zeta = zeta_of(z, m, c, t);
    cplx acc(0.0, 0.0);
    for (double lam : spec.values) acc += 1.0 / (lam - zeta);
    return b * acc / static_cast<double>(spec.size());
}

// d/dm of the RHS (for Newton)
cplx fpe_rhs_prime(const Spectrum& spec, double t, cplx z, cplx m) {
    const double c = spec.c_n;
    const cplx b = 1.0 + c * t * m;
    const cplx zeta = zeta_of(z, m, c, t);
    const cplx dzeta = 2.0 * c * t * b * z - c * t * t * (1.0 - c);
    cplx s1(0.0, 0.0), s2(0.0, 0.0);
    for (double lam : spec.values) {
        const cplx d = lam - zeta;
        s1 += 1.0 / d;
        s2 += 1.0 / (d * d);
    }
    const double inv_m = 1.0 / static_cast<double>(spec.size());
    return c * t * s1 * inv_m + b * dzeta * s2 * inv_m;
}

SubordinationState solve_at(const Spectrum& spec, double t, cplx z, cplx m0,
                            std::string* history) {
    const double c = spec.c_n;
    cplx m = m0;
    double theta = 0.5;
    double res = std::abs(fpe_rhs(spec, t, z, m) - m);
    std::ostringstream hist;
    for (int it = 0; it < 600 && res > 1e-13; ++it) {
        const cplx rhs = fpe_rhs(spec, t, z, m);
        cplx m_try = (1.0 - theta) * m + theta * rhs;
        double res_try = std::abs(fpe_rhs(spec, t, z, m_try) - m_try);
        int halvings = 0;
        while (res_try > res && halvings < 40) {
            theta *= 0.5;
            m_try = (1.0 - theta) * m + theta * rhs;
            res_try = std::abs(fpe_rhs(spec, t, z, m_try) - m_try);
            ++halvings;
        }
        m = m_try;
        res = res_try;
        if (halvings == 0) theta = std::min(1.0, theta * 1.2);
        if ((it & 63) == 0) hist << "(" << it << "," << theta << "," << res << ") ";
    }
    // Newton polish on F(m) = m - rhs(m)
    for (int it = 0; it < 30 && res > 1e-14; ++it) {
        const cplx f = m - fpe_rhs(spec, t, z, m);
        const cplx fp = 1.0 - fpe_rhs_prime(spec, t, z, m);
        if (fp == cplx(0.0, 0.0)) break;
        cplx step = f / fp;
        cplx m_try = m - step;
        double res_try = std::abs(fpe_rhs(spec, t, z, m_try) - m_try);
        int halvings = 0;
        while (res_try > res && halvings < 20) {
            step *= 0.5;
            m_try = m - step;
            res_try = std::abs(fpe_rhs(spec, t, z, m_try) - m_try);
            ++halvings;
        }
        if (res_try >= res) break;
        m = m_try;
        res = res_try;
    }
    if (history) *history = hist.str();
    SubordinationState st;
    st.z = z;
    st.m_t = m;
    st.b_t = 1.0 + c * t * m;
    st.zeta_t = zeta_of(z, m, c, t);
    st.residual = res;
    return st;
}

}  // namespace

SubordinationState solve_subordination(const Spectrum& spec, double t, cplx z,
                                        std::optional<cplx> init) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("solve_subordination: t in (0,1) required");
    const double c = spec.c_n;

    if (z.imag() > 0.0) {
        std::string hist;
        // Stieltjes transform of the X spectrum as the starting point
        const cplx m0 = init ? *init : stieltjes(spec, z, 0);
        SubordinationState st = solve_at(spec, t, z, m0, &hist);
        if (st.residual > 1e-11) {
            throw SolverError("solve_subordination: residual " + std::to_string(st.residual) +
                              " after damping history " + hist);
        }
        if (!(st.m_t.imag() > 0.0) || !(std::imag(z * st.m_t) > 0.0)) {
            throw BranchError("solve_subordination: Herglotz condition violated");
        }
        if (!(st.b_t.real() > 0.0)) {
            throw BranchError("solve_subordination: Re(1 + c t m) <= 0");
        }
        const double bound = 1.0 / std::sqrt(c * t * std::abs(z));
        if (std::abs(st.m_t) > bound * (1.0 + 1e-6)) {
            throw BranchError("solve_subordination: |m_t| exceeds (c t |z|)^{-1/2}");
        }
        return st;
    }
    if (z.imag() < 0.0) {
        // conjugate symmetry
        std::optional<cplx> conj_init;
        if (init) conj_init = std::conj(*init);
        SubordinationState st = solve_subordination(spec, t, std::conj(z), conj_init);
        st.z = z;
        st.m_t = std::conj(st.m_t);
        st.b_t = std::conj(st.b_t);
        st.zeta_t = std::conj(st.zeta_t);
        return st;
    }

    // real z: continuation in decreasing eta, then a real-axis polish
    const double scale = std::max({t * t, std::abs(z), 1.0});
    double eta = 1e-2 * scale;
    cplx m = stieltjes(spec, cplx(z.real(), eta), 0);
    SubordinationState st;
    while (true) {
        st = solve_at(spec, t, cplx(z.real(), eta), m, nullptr);
        m = st.m_t;
        if (eta <= 1e-10) break;
        eta = std::max(eta / 10.0, 1e-10);
    }
    // real Newton using the drop-to-axis start
    Spectrum dummy = spec;
    cplx mr(m.real(), 0.0);
    std::string hist;
    st = solve_at(spec, t, cplx(z.real(), 0.0), mr, &hist);
    const cplx zeta = st.zeta_t;
    if (!(zeta.real() < spec.smallest()) || std::abs(zeta.imag()) > 1e-8) {
        throw SolverError("solve_subordination: real z lacks a verified off-support continuation");
    }
    if (st.residual > 1e-11) {
        throw SolverError("solve_subordination: residual " + std::to_string(st.residual) +
                          " on the real axis; history " + hist);
    }
    return st;
}

double phi_map(const Spectrum& spec, double t, double zeta, int order) {
    if (order < 0 || order > 2) throw ConfigError("phi_map: order in {0,1,2}");
    for (double lam : spec.values) {
        if (std::abs(lam - zeta) < 1e-12) {
            throw PoleError("phi_map: zeta within 1e-12 of eigenvalue " + std::to_string(lam));
        }
    }
    const double c = spec.c_n;
    const double m = stieltjes_real(spec, zeta, 0);
    const double u = 1.0 - c * t * m;
    if (order == 0) return u * u * zeta + (1.0 - c) * t * u;
    const double m1 = stieltjes_real(spec, zeta, 1);
    if (order == 1) {
        return u * u - 2.0 * c * t * m1 * zeta * u - c * (1.0 - c) * t * t * m1;
    }
    const double m2 = stieltjes_real(spec, zeta, 2);
    return -2.0 * c * t * m2 * zeta * u - 4.0 * c * t * m1 * u +
           2.0 * zeta * (c * t * m1) * (c * t * m1) - c * (1.0 - c) * t * t * m2;
}

EdgeSolution find_left_edge(const Spectrum& spec, double t) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("find_left_edge: t in (0,1) required");
    if (!spec.values.empty() && spec.smallest() < 0.0) {
        throw ConfigError("find_left_edge: spectrum must be nonnegative");
    }
    const double c = spec.c_n;
    const double lam_m = spec.smallest();
    auto dphi = [&](double zeta) { return phi_map(spec, t, zeta, 1); };

    // phase A: walk left from lambda_M until Phi' < 0 (inside the dip whose
    // left end is zeta_{1,-}); the start offset 1e-3 t^2 may still sit in the
    // pole zone where Phi' > 0
    double delta = 1e-3 * t * t;
    double hi = lam_m - delta;
    std::ostringstream trace;
    int expansions = 0;
    while (dphi(hi) >= 0.0) {
        trace << "Phi'(" << hi << ")=" << dphi(hi) << " ";
        delta *= 2.0;
        hi = lam_m - delta;
        if (++expansions > 200) {
            throw SolverError("find_left_edge: no Phi' < 0 region found; trace " + trace.str());
        }
    }
    // phase B: expand the lower bracket geometrically through 0 into
    // negatives until Phi' > 0
    double step = std::max(t * t, delta);
    double lo = hi - step;
    expansions = 0;
    while (dphi(lo) <= 0.0) {
        trace << "Phi'(" << lo << ")=" << dphi(lo) << " ";
        step *= 2.0;
        lo -= step;
        if (++expansions > 60) {
            throw SolverError("find_left_edge: no sign change after 60 expansions; trace " +
                              trace.str());
        }
    }
    // bisection on the + -> - crossing
    double a = lo, b = hi;
    for (int it = 0; it < 200 && (b - a) > 1e-16 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        if (dphi(mid) > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    double zeta = 0.5 * (a + b);
    // Newton polish
    const double tol = 1e-12 * std::max(1.0, std::abs(phi_map(spec, t, zeta, 2)) * t * t);
    for (int it = 0; it < 40; ++it) {
        const double f = dphi(zeta);
        if (std::abs(f) <= tol) break;
        const double fp = phi_map(spec, t, zeta, 2);
        if (fp == 0.0) break;
        double znew = zeta - f / fp;
        if (znew <= a || znew >= b) znew = 0.5 * (a + b);  // stay inside the bracket
        if (dphi(znew) > 0.0) {
            a = znew;
        } else {
            b = znew;
        }
        zeta = znew;
    }

    EdgeSolution sol;
    sol.zeta_minus = zeta;
    sol.lambda_minus_t = phi_map(spec, t, zeta, 0);
    sol.phi_second = phi_map(spec, t, zeta, 2);
    sol.gap = lam_m - zeta;
    if (!(sol.phi_second < 0.0)) {
        throw SolverError("find_left_edge: located critical point is not a local maximum");
    }
    const double inner = 0.5 *
                         (4.0 * sol.lambda_minus_t * zeta + (1.0 - c) * (1.0 - c) * t * t) *
                         c * c * t * t * sol.phi_second;
    if (inner == 0.0) throw SolverError("find_left_edge: degenerate curvature");
    sol.gamma_n = (inner < 0.0) ? std::pow(-inner, -1.0 / 3.0) : -std::pow(inner, -1.0 / 3.0);

    // light post-scan for extra sign changes of Phi' on the scanned range
    int sign_changes = 0;
    double prev = dphi(lo);
    for (int k = 1; k <= 64; ++k) {
        const double x = lo + (hi - lo) * k / 64.0;
        const double f = dphi(x);
        if ((prev > 0.0 && f < 0.0) || (prev < 0.0 && f > 0.0)) ++sign_changes;
        prev = f;
    }
    sol.multiple_sign_changes = sign_changes > 1;
    return sol;
}

DeterministicEdge deterministic_edge(const MPParams& p, double t) {
    auto [lm, lp] = mp_edges(p);
    (void)lp;
    DeterministicEdge e;
    e.zeta_bar = (1.0 - t) * lm - std::sqrt(p.c) * t * t;
    e.gamma_limit = std::pow(p.c, -0.5) * std::pow(std::abs(1.0 - std::sqrt(p.c)), -4.0 / 3.0);
    return e;
}

SubordinationResiduals subordination_residuals(const Spectrum& spec, double t,
                                               const EdgeSolution& edge) {
    const double c = spec.c_n;
    const double z = edge.lambda_minus_t;
    const double zeta = edge.zeta_minus;
    if (zeta == 0.0) throw ConfigError("subordination_residuals: zeta = 0");
    const double arg = t * t * (1.0 - c) * (1.0 - c) + 4.0 * zeta * z;
    if (arg < 0.0) {
        throw BranchError("subordination_residuals: square-root argument negative, " +
                          std::to_string(arg));
    }
    const double r = std::sqrt(arg);
    const double m = stieltjes_real(spec, zeta, 0);
    const double m1 = stieltjes_real(spec, zeta, 1);
    SubordinationResiduals out;
    out.f_val = 1.0 + (t * (1.0 - c) - r) / (2.0 * zeta) - c * t * m;
    out.f_zeta = (-2.0 * z * zeta / r - t * (1.0 - c) + r) / (2.0 * zeta * zeta) - c * t * m1;
    return out;
}

}  // namespace rmtedge
