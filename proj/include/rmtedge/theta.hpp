#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "rmtedge/rng.hpp"

namespace rmtedge {

// Symmetric unit-variance law with a uniform core on [-s0, s0] (density h)
// and an exact Pareto tail A |x|^{-alpha-1} beyond. The one-sided tail is
// P(Theta > s) = (A/alpha) s^{-alpha} = -c_const / Gamma(1 - alpha/2) * s^{-alpha}.
struct ThetaSpec {
    double alpha;         // tail index in (2, 4)
    double s0;            // core/tail changeover
    double core_height;   // h
    double tail_amplitude;// A
    double c_const;       // -(A/alpha) * Gamma(1 - alpha/2), positive on (2,4)
};

// Solve (h, A) from normalization + unit variance. Throws ConfigError when
// s0 lies outside the feasible interval; the message names the boundary
// located by bisection on min(h, A) > 0.
ThetaSpec build_theta(double alpha, double s0);

// P(Theta > s), exact piecewise closed form. s >= 0.
double theta_tail(const ThetaSpec& spec, double s);

// density f(x)
double theta_density(const ThetaSpec& spec, double x);

// CDF and inverse CDF (closed form; the sampler is inverse-CDF based)
double theta_cdf(const ThetaSpec& spec, double x);
double theta_quantile(const ThetaSpec& spec, double u);

// M x N matrix with entries Theta_ij / sqrt(N). Requires M < N.
Eigen::MatrixXd sample_matrix(const ThetaSpec& spec, int M, int N, std::uint64_t seed);

// t = E[Theta^2 1{|Theta| < N^{-eps_a}}], closed form from the piecewise law.
double gaussian_time(const ThetaSpec& spec, int N, double eps_a);

// Same second-moment integral with an explicit cutoff in Theta units.
double truncated_second_moment(const ThetaSpec& spec, double cutoff);

// Inverse of truncated_second_moment in the cutoff: smallest q with
// E[Theta^2 1{|Theta| < q}] = t_target. Requires t_target in (0, 1).
double cutoff_for_time(const ThetaSpec& spec, double t_target);

// Characteristic-function check of the truncated squares: with
// x = Theta/sqrt(N) * 1{|Theta| >= N^{-eps_a}},
//   phi_N(lambda) = E exp(-i lambda |x|^2)          (quadrature route)
//   expansion     = 1 - i(1-t)lambda/N + c_const (i lambda)^{alpha/2} N^{-alpha/2}
// Returns both plus their difference. Requires Im(lambda) <= 0.
struct PhiChar {
    std::complex<double> quadrature;
    std::complex<double> expansion;
    std::complex<double> difference;
};
PhiChar phi_char(const ThetaSpec& spec, std::complex<double> lambda, int N,
                 double eps_a = 0.0);

}  // namespace rmtedge
