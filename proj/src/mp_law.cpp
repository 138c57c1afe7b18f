#include "rmtedge/mp_law.hpp"

#include <cmath>

#include "rmtedge/errors.hpp"

namespace rmtedge {

MPParams::MPParams(double c_n) : c(c_n) {
    if (!(c_n > 0.0) || c_n == 1.0) {
        throw ConfigError("MPParams: c must lie in (0,1) or (1,inf); the hard edge c = 1 is excluded");
    }
}

std::pair<double, double> mp_edges(const MPParams& p) {
    const double r = std::sqrt(p.c);
    return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

double mp_density(const MPParams& p, double x) {
    if (!(x > 0.0)) throw ConfigError("mp_density: x > 0 required");
    auto [lm, lp] = mp_edges(p);
    if (x <= lm || x >= lp) return 0.0;
    return std::sqrt((lp - x) * (x - lm)) / (2.0 * 3.14159265358979323846 * p.c * x);
}

double mp_atom_mass(const MPParams& p) {
    return std::max(0.0, 1.0 - 1.0 / p.c);
}

std::complex<double> mp_stieltjes(const MPParams& p, std::complex<double> z) {
    if (z == std::complex<double>(0.0, 0.0)) {
        throw PoleError("mp_stieltjes: z = 0 is a pole of the transform");
    }
    auto [lm, lp] = mp_edges(p);
    const double c = p.c;
    if (z.imag() == 0.0) {
        const double x = z.real();
        if (x >= lm && x <= lp && x > 0.0) {
            // boundary value from above: i sqrt turns real
            const double root = std::sqrt(std::max(0.0, (lp - x) * (x - lm)));
            return {(1.0 - c - x) / (2.0 * x * c), root / (2.0 * x * c)};
        }
        // off-support real axis: analytic eta -> 0 limit; the sign is fixed
        // by m > 0 left of the bulk, m -> -1/z at infinity
        const double prod = (lp - x) * (x - lm);  // negative here
        const double root = std::sqrt(-prod);
        const double sign = (x < lm) ? -1.0 : 1.0;
        return {(1.0 - c - x + sign * root) / (2.0 * x * c), 0.0};
    }
    const std::complex<double> w = std::sqrt((lp - z) * (z - lm));
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> m = (1.0 - c - z + i * w) / (2.0 * z * c);
    // Herglotz: flip the square-root sign if the branch came out wrong
    if (z.imag() > 0.0 && m.imag() <= 0.0) m = (1.0 - c - z - i * w) / (2.0 * z * c);
    if (z.imag() < 0.0 && m.imag() >= 0.0) m = (1.0 - c - z - i * w) / (2.0 * z * c);
    return m;
}

std::complex<double> mp_stieltjes_scaled(const MPParams& p, double t,
                                         std::complex<double> z, int k) {
    if (k < 0 || k > 3) throw ConfigError("mp_stieltjes_scaled: k <= 3 supported");
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("mp_stieltjes_scaled: t in [0,1) required");
    const double s = 1.0 / (1.0 - t);
    const std::complex<double> w = z * s;
    const double c = p.c;
    const std::complex<double> m = mp_stieltjes(p, w);
    if (k == 0) return s * m;

    // implicit derivatives of the quadratic c w m^2 + (w - (1-c)) m + 1 = 0
    const std::complex<double> d = 2.0 * c * w * m + w - (1.0 - c);
    const std::complex<double> m1 = -(c * m * m + m) / d;
    if (k == 1) return s * s * m1;
    const std::complex<double> m2 = -2.0 * m1 * (2.0 * c * m + 1.0 + c * w * m1) / d;
    if (k == 2) return s * s * s * m2;
    const std::complex<double> dprime = 2.0 * c * m + 2.0 * c * w * m1 + 1.0;
    const std::complex<double> m3 =
        (-2.0 * (m2 * (2.0 * c * m + 1.0 + c * w * m1) + m1 * (3.0 * c * m1 + c * w * m2)) -
         m2 * dprime) / d;
    return s * s * s * s * m3;
}

}  // namespace rmtedge
