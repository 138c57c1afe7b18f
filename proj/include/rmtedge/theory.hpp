#pragma once

#include <complex>

#include "rmtedge/mp_law.hpp"

namespace rmtedge {

struct TheoryInputs {
    double alpha;    // tail index in (2, 4)
    double c;        // aspect ratio, != 1
    double c_const;  // tail constant, > 0
    double n;        // matrix dimension N (enters via explicit N^{1-alpha/2} only)
    double t;        // Gaussian time
};

// sigma_alpha^2 = c_const c^{(4-alpha)/4} (1-sqrt(c))^4 (alpha-2)/2 * Gamma(alpha/2+1)
double sigma_alpha(const TheoryInputs& inp);

// lambda_shift = lambda_-^mp - c_const N^{1-alpha/2} (1-sqrt(c))^2 c^{-(alpha-2)/4} Gamma(alpha/2+1)
double lambda_shift(const TheoryInputs& inp);
double lambda_shift_term(const TheoryInputs& inp);  // the displacement alone

// critical-regime sigma_tilde^2 = c_const c^{2/3} (1-sqrt(c))^{4/3} Gamma(7/3) / 3
double tilde_sigma_critical(double c, double c_const);

// p(z) = c_const N^{1-alpha/2} c int_0^inf e^{-s - s c m} (s m)^{alpha/2} ds,
// both by graded-panel quadrature and in closed form
// Gamma(alpha/2+1) m^{alpha/2} / (1+c m)^{alpha/2+1}; enforced to 1e-9 agreement.
struct PTransform {
    std::complex<double> quadrature;
    std::complex<double> closed_form;
};
PTransform p_transform(const TheoryInputs& inp, std::complex<double> m);

// m_shift(z) = i (z/(1-t) - c + 1) p(z) / (2 c z sqrt((z/(1-t)-lm)(lp-z/(1-t))))
// plus the composite three-term expectation expansion
//   E m_X(z) ~ m^(t)(z) + m_shift(z) - p(z)/(2 c z).
struct MShift {
    std::complex<double> m_shift;
    std::complex<double> p_value;
    std::complex<double> em_x;
};
MShift m_shift_eval(const TheoryInputs& inp, std::complex<double> z);

// CLT kernel K(z,z') with the d/dz d/dz' applied analytically; the radial
// part of the double Laguerre integral is integrated exactly, leaving a 1-D
// smooth integral evaluated by doubling Gauss-Legendre until 1e-7.
std::complex<double> clt_kernel(const TheoryInputs& inp, std::complex<double> z,
                                std::complex<double> zp);

// sigma_m for the mesoscopic CLT N^{alpha/4} t (m_X - E m_X) / sigma_m => N(0,1),
// evaluated at zeta_bar_{-,t}: sigma_m^2 = K(zeta_bar, zeta_bar) N^{alpha/2-1} / c.
// The 1/c closes the t->0 identity sigma_alpha = 2 c lambda_-^mp sigma_m exactly.
double sigma_m(const TheoryInputs& inp);

}  // namespace rmtedge
