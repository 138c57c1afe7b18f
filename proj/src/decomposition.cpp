#include "rmtedge/decomposition.hpp"

#include <cmath>

#include "rmtedge/errors.hpp"

namespace rmtedge {

DecompositionParams DecompositionParams::paper_defaults(double alpha, int N) {
    const double eps_b = 0.9 * (alpha - 2.0) / (10.0 * alpha);
    const double eps_a = 0.9 * std::min(eps_b, 4.0 - alpha) / 10000.0;
    return paper(alpha, N, eps_a, eps_b);
}

DecompositionParams DecompositionParams::paper(double alpha, int N, double eps_a,
                                               double eps_b, bool relax) {
    if (!relax) {
        const double eps_b_max = (alpha - 2.0) / (10.0 * alpha);
        const double eps_a_max = std::min(eps_b, 4.0 - alpha) / 10000.0;
        if (!(eps_b > 0.0 && eps_b < eps_b_max)) {
            throw ConfigError("DecompositionParams: eps_b outside (0, (alpha-2)/(10 alpha))");
        }
        if (!(eps_a > 0.0 && eps_a < eps_a_max)) {
            throw ConfigError("DecompositionParams: eps_a outside (0, min(eps_b, 4-alpha)/10000)");
        }
    } else if (!(eps_a > 0.0 && eps_b > 0.0 && eps_a < eps_b)) {
        throw ConfigError("DecompositionParams: need 0 < eps_a < eps_b");
    }
    DecompositionParams p;
    p.eps_a = eps_a;
    p.eps_b = eps_b;
    p.eps_alpha = (alpha - 2.0) / (5.0 * alpha);
    const double dn = static_cast<double>(N);
    p.lo_y = std::pow(dn, -0.5 - eps_a);
    p.hi_y = std::pow(dn, -eps_b);
    p.paper_mode = true;
    return p;
}

DecompositionParams DecompositionParams::direct(const ThetaSpec& spec, int N,
                                                double t_target, double heavy_theta) {
    const double sqrt_n = std::sqrt(static_cast<double>(N));
    DecompositionParams p;
    p.eps_alpha = (spec.alpha - 2.0) / (5.0 * spec.alpha);
    p.lo_y = cutoff_for_time(spec, t_target) / sqrt_n;
    p.hi_y = heavy_theta / sqrt_n;
    if (p.hi_y < p.lo_y) {
        throw ConfigError("DecompositionParams: heavy threshold below the A/B cutoff");
    }
    p.paper_mode = false;
    return p;
}

Decomposition decompose(const Eigen::MatrixXd& y, const DecompositionParams& params,
                        const ThetaSpec& spec) {
    const int m = static_cast<int>(y.rows());
    const int n = static_cast<int>(y.cols());
    Decomposition d;
    d.y = y;
    d.params = params;
    d.rows = m;
    d.cols = n;
    d.c_n = static_cast<double>(m) / n;
    d.a_part = Eigen::MatrixXd::Zero(m, n);
    d.b_part = Eigen::MatrixXd::Zero(m, n);
    d.c_part = Eigen::MatrixXd::Zero(m, n);
    d.psi_mask.setConstant(m, n, false);
    d.chi_mask.setConstant(m, n, false);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = y(i, j);
            const double av = std::abs(v);
            if (av >= params.hi_y) {
                d.psi_mask(i, j) = true;
                d.c_part(i, j) = v;
            } else if (av >= params.lo_y) {
                d.chi_mask(i, j) = true;
                d.b_part(i, j) = v;
            } else {
                d.a_part(i, j) = v;
            }
        }
    }
    d.t = truncated_second_moment(spec, params.lo_y * std::sqrt(static_cast<double>(n)));
    return d;
}

GoodnessReport is_good(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& psi_mask,
                       double alpha) {
    GoodnessReport rep;
    rep.count = 0;
    for (Eigen::Index j = 0; j < psi_mask.cols(); ++j) {
        for (Eigen::Index i = 0; i < psi_mask.rows(); ++i) {
            if (psi_mask(i, j)) ++rep.count;
        }
    }
    const double dn = static_cast<double>(psi_mask.cols());
    rep.threshold = std::pow(dn, 1.0 - (alpha - 2.0) / (5.0 * alpha));
    rep.good = static_cast<double>(rep.count) <= rep.threshold;
    return rep;
}

}  // namespace rmtedge
