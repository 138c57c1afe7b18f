#pragma once

#include <complex>
#include <utility>

namespace rmtedge {

// Aspect ratio c = M/N, hard edge c = 1 excluded.
struct MPParams {
    double c;
    explicit MPParams(double c_n);
};

// (lambda_minus, lambda_plus) = ((1 -+ sqrt(c))^2, (1 + sqrt(c))^2)
std::pair<double, double> mp_edges(const MPParams& p);

// continuous density; the atom (1 - 1/c)_+ at 0 is reported separately
double mp_density(const MPParams& p, double x);
double mp_atom_mass(const MPParams& p);

// Stieltjes transform, closed form with the Herglotz branch. Real z outside
// the support takes the eta->0 limit analytically. z = 0 is a pole.
std::complex<double> mp_stieltjes(const MPParams& p, std::complex<double> z);

// k-th derivative (k <= 3) of m^(t)(z) = (1-t)^{-1} m(z / (1-t)).
std::complex<double> mp_stieltjes_scaled(const MPParams& p, double t,
                                         std::complex<double> z, int k = 0);

}  // namespace rmtedge
