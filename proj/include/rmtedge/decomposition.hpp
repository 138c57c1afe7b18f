#pragma once

#include <Eigen/Dense>

#include "rmtedge/theta.hpp"

namespace rmtedge {

// Entry-classification thresholds in y units: |y| < lo -> A (small),
// lo <= |y| < hi -> B (intermediate), |y| >= hi -> C (heavy).
// Paper mode: lo = N^{-1/2-eps_a}, hi = N^{-eps_b} with the eps choice
// 0 < eps_b < (alpha-2)/10alpha, 0 < eps_a < min(eps_b, 4-alpha)/10000.
// Direct mode fixes (t_target, heavy cutoff in Theta units) instead and is
// tagged non-paper in outputs.
struct DecompositionParams {
    double eps_a = 0.0;
    double eps_b = 0.0;
    double eps_alpha = 0.0;   // (alpha-2)/(5 alpha), goodness exponent
    double lo_y = 0.0;        // A/B threshold in y units
    double hi_y = 0.0;        // B/C threshold in y units
    bool paper_mode = true;

    // paper defaults: eps_b = 0.9 (alpha-2)/(10 alpha), eps_a = 0.9 min(eps_b, 4-alpha)/10000
    static DecompositionParams paper_defaults(double alpha, int N);
    // explicit paper epsilons (validated against the paper window unless relax)
    static DecompositionParams paper(double alpha, int N, double eps_a, double eps_b,
                                     bool relax = false);
    // direct thresholds: lo from cutoff_for_time(spec, t_target), hi = heavy_theta/sqrt(N)
    static DecompositionParams direct(const ThetaSpec& spec, int N, double t_target,
                                      double heavy_theta);
};

struct Decomposition {
    Eigen::MatrixXd y;
    Eigen::MatrixXd a_part;
    Eigen::MatrixXd b_part;
    Eigen::MatrixXd c_part;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> psi_mask;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> chi_mask;
    DecompositionParams params;
    double t = 0.0;       // N E|A_ij|^2 for the generating law
    int rows = 0;
    int cols = 0;
    double c_n = 0.0;     // rows/cols

    Eigen::MatrixXd x_part() const { return b_part + c_part; }
};

// Deterministic thresholding of a sampled y. t is evaluated from the law:
// paper mode t = gaussian_time(spec, N, eps_a); direct mode t = E[Theta^2, |Theta| < lo*sqrt(N)].
Decomposition decompose(const Eigen::MatrixXd& y, const DecompositionParams& params,
                        const ThetaSpec& spec);

struct GoodnessReport {
    bool good = false;
    long count = 0;
    double threshold = 0.0;   // N^{1 - (alpha-2)/(5 alpha)}
};

GoodnessReport is_good(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& psi_mask,
                       double alpha);

}  // namespace rmtedge
