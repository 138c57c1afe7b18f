#include "rmtedge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "rmtedge/errors.hpp"
#include "rmtedge/rng.hpp"

namespace rmtedge {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

Spectrum spectrum_from_values(std::vector<double> values, int rows, int cols) {
    std::sort(values.begin(), values.end());
    double lmax = values.empty() ? 0.0 : std::max(values.back(), 0.0);
    const double tol = 1e-10 * std::max(1.0, lmax);
    for (double& v : values) {
        if (v < tol) v = std::max(v, 0.0);
        if (v < 0.0) v = 0.0;
    }
    Spectrum s;
    s.values = std::move(values);
    s.rows = rows;
    s.cols = cols;
    s.c_n = cols > 0 ? static_cast<double>(rows) / cols : 0.0;
    return s;
}

Spectrum covariance_spectrum(const Eigen::MatrixXd& h) {
    if (!h.allFinite()) {
        throw ConfigError("covariance_spectrum: non-finite entries");
    }
    const int m = static_cast<int>(h.rows());
    const int n = static_cast<int>(h.cols());
    if (m > n) {
        throw ConfigError("covariance_spectrum: require M <= N");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(h);
    std::vector<double> vals(m);
    for (int i = 0; i < m; ++i) {
        const double s = svd.singularValues()(i);
        vals[i] = s * s;
    }
    return spectrum_from_values(std::move(vals), m, n);
}

std::complex<double> stieltjes(const Spectrum& spec, std::complex<double> z, int k) {
    if (k < 0) throw ConfigError("stieltjes: k >= 0 required");
    if (z.imag() == 0.0) {
        for (double lam : spec.values) {
            if (std::abs(lam - z.real()) < 1e-14) {
                std::ostringstream msg;
                msg << "stieltjes: z = " << z.real() << " collides with eigenvalue " << lam;
                throw PoleError(msg.str());
            }
        }
    }
    const double kfac = factorial(k);
    std::complex<double> acc(0.0, 0.0);
    for (double lam : spec.values) {
        std::complex<double> d = lam - z;
        std::complex<double> p = d;
        for (int j = 0; j < k; ++j) p *= d;
        acc += kfac / p;
    }
    return acc / static_cast<double>(spec.size());
}

double stieltjes_real(const Spectrum& spec, double zeta, int k) {
    const double kfac = factorial(k);
    double acc = 0.0;
    for (double lam : spec.values) {
        const double d = lam - zeta;
        double p = d;
        for (int j = 0; j < k; ++j) p *= d;
        acc += kfac / p;
    }
    return acc / static_cast<double>(spec.size());
}

std::complex<double> resolvent_entry(const Eigen::MatrixXd& h, std::complex<double> z,
                                     int i, int j) {
    const int m = static_cast<int>(h.rows());
    if (i < 0 || j < 0 || i >= m || j >= m) {
        throw ConfigError("resolvent_entry: index out of range");
    }
    Eigen::MatrixXcd a = (h * h.transpose()).cast<std::complex<double>>();
    a.diagonal().array() -= z;
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m);
    e(j) = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::VectorXcd col = lu.solve(e);
    const double resid = (a * col - e).norm();
    if (!(resid <= 1e-10 * std::max(1.0, e.norm()))) {
        // distance to spectrum drives the conditioning; report it
        Eigen::BDCSVD<Eigen::MatrixXd> svd(h);
        double dist = 1e300;
        for (int r = 0; r < m; ++r) {
            const double lam = svd.singularValues()(r) * svd.singularValues()(r);
            dist = std::min(dist, std::abs(lam - z));
        }
        std::ostringstream msg;
        msg << "resolvent_entry: solve residual " << resid
            << " exceeds 1e-10; distance to spectrum " << dist;
        throw NumericError(msg.str());
    }
    return col(i);
}

MinorSpectra minor_spectra(const Decomposition& decomp) {
    const int m = decomp.rows;
    const int n = decomp.cols;
    MinorSpectra out;
    std::vector<bool> row_heavy(m, false), col_heavy(n, false);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            if (decomp.psi_mask(i, j)) {
                row_heavy[i] = true;
                col_heavy[j] = true;
            }
        }
    }
    for (int i = 0; i < m; ++i) {
        if (row_heavy[i]) out.d_r.push_back(i);
    }
    for (int j = 0; j < n; ++j) {
        if (col_heavy[j]) out.d_c.push_back(j);
    }
    if (static_cast<int>(out.d_r.size()) >= m) {
        throw ConfigError("minor_spectra: every row heavy, interlacing degenerate");
    }

    // X^{[D_c]} = B^{[D_c]}: drop heavy columns from X (equivalently from B)
    const Eigen::MatrixXd x = decomp.x_part();
    Eigen::MatrixXd colred(m, n - static_cast<int>(out.d_c.size()));
    {
        int cj = 0;
        for (int j = 0; j < n; ++j) {
            if (!col_heavy[j]) colred.col(cj++) = x.col(j);
        }
    }
    // X^{(D_r)} = B^{(D_r)}: drop heavy rows
    Eigen::MatrixXd rowred(m - static_cast<int>(out.d_r.size()), n);
    {
        int ri = 0;
        for (int i = 0; i < m; ++i) {
            if (!row_heavy[i]) rowred.row(ri++) = x.row(i);
        }
    }
    out.col_removed = covariance_spectrum(colred);
    out.row_removed = covariance_spectrum(rowred);
    return out;
}

double goe_smallest(int M, std::uint64_t seed) {
    if (M < 2) throw ConfigError("goe_smallest: M >= 2 required");
    Rng rng(seed);
    Eigen::MatrixXd w(M, M);
    const double off_sd = 1.0 / std::sqrt(static_cast<double>(M));
    const double diag_sd = std::sqrt(2.0 / static_cast<double>(M));
    for (int i = 0; i < M; ++i) {
        w(i, i) = diag_sd * rng.gaussian();
        for (int j = i + 1; j < M; ++j) {
            const double g = off_sd * rng.gaussian();
            w(i, j) = g;
            w(j, i) = g;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace rmtedge
