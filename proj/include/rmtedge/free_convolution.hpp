#pragma once

#include <complex>
#include <optional>

#include "rmtedge/mp_law.hpp"
#include "rmtedge/spectral.hpp"

namespace rmtedge {

// Solution of m = (1/M) sum (1 + c t m) / (lambda_i - zeta_t(m)) at one z,
// with zeta_t(z) = (1 + c t m)^2 z - t (1 - c)(1 + c t m).
struct SubordinationState {
    std::complex<double> z;
    std::complex<double> m_t;
    std::complex<double> zeta_t;
    std::complex<double> b_t;   // 1 + c t m_t
    double residual = 0.0;
};

// Damped fixed-point iteration with Newton polish; residual <= 1e-11.
// Real z below the support is reached by decreasing-eta continuation.
// `init` overrides the default starting point (uniqueness probes).
SubordinationState solve_subordination(const Spectrum& spec, double t,
                                       std::complex<double> z,
                                       std::optional<std::complex<double>> init = {});

// Phi_t(zeta) = (1 - c t m_X(zeta))^2 zeta + (1-c) t (1 - c t m_X(zeta)),
// orders 0..2 via analytic Stieltjes derivatives. zeta must be off-spectrum.
double phi_map(const Spectrum& spec, double t, double zeta, int order);

struct EdgeSolution {
    double zeta_minus = 0.0;      // zeta_{1,-}(t)
    double lambda_minus_t = 0.0;  // Phi_t(zeta_{1,-})
    double phi_second = 0.0;      // Phi_t'' at zeta_{1,-} (< 0)
    double gamma_n = 0.0;         // edge curvature scaling, > 0
    double gap = 0.0;             // lambda_M(S(X)) - zeta_{1,-}
    bool multiple_sign_changes = false;  // >1 sign change of Phi' in the scan
};

// Locates the leftmost critical point of Phi_t below lambda_M (negative zeta
// admitted for degenerate spectra), then lambda_{-,t} = Phi_t(zeta_{1,-}) and
// gamma_N = -( [4 lambda zeta + (1-c)^2 t^2] c^2 t^2 Phi''(zeta) / 2 )^{-1/3}.
EdgeSolution find_left_edge(const Spectrum& spec, double t);

// Deterministic MP counterparts: zeta_bar_{-,t} = (1-t) lambda_-^mp - sqrt(c) t^2
// and the limiting scaling gamma = c^{-1/2} (1 - sqrt(c))^{-4/3}.
struct DeterministicEdge {
    double zeta_bar;
    double gamma_limit;
};
DeterministicEdge deterministic_edge(const MPParams& p, double t);

// F_t(z, zeta) = 1 + [t(1-c) - sqrt(t^2 (1-c)^2 + 4 zeta z)]/(2 zeta) - c t m_X(zeta)
// and d F_t / d zeta, evaluated at (lambda_{-,t}, zeta_{1,-}).
struct SubordinationResiduals {
    double f_val;
    double f_zeta;
};
SubordinationResiduals subordination_residuals(const Spectrum& spec, double t,
                                               const EdgeSolution& edge);

}  // namespace rmtedge
