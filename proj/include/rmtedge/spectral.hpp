#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rmtedge/decomposition.hpp"

namespace rmtedge {

// Eigenvalues of S(H) = H H^T, ascending, clamped to zero below
// 1e-10 * max(1, lambda_max). values[0] is the smallest eigenvalue.
struct Spectrum {
    std::vector<double> values;
    int rows = 0;
    int cols = 0;
    double c_n = 0.0;

    double smallest() const { return values.front(); }
    double largest() const { return values.back(); }
    int size() const { return static_cast<int>(values.size()); }
};

// Via singular values of H (preserves small-eigenvalue accuracy).
// Requires M <= N and finite entries.
Spectrum covariance_spectrum(const Eigen::MatrixXd& h);

// Builds a Spectrum from raw eigenvalues (sorted + clamped); used for
// synthetic spectra such as MP quantiles.
Spectrum spectrum_from_values(std::vector<double> values, int rows, int cols);

// k = 0: (1/M) sum 1/(lambda_i - z); k >= 1: (1/M) sum k!/(lambda_i - z)^{k+1}.
// Throws PoleError when real z is within 1e-14 of an eigenvalue.
std::complex<double> stieltjes(const Spectrum& spec, std::complex<double> z, int k = 0);

// real-argument fast path (used heavily by the edge solver)
double stieltjes_real(const Spectrum& spec, double zeta, int k = 0);

// Entry (i, j) of (H H^T - z)^{-1} by linear solve; residual checked to 1e-10.
std::complex<double> resolvent_entry(const Eigen::MatrixXd& h, std::complex<double> z,
                                     int i, int j);

// Minor spectra for the interlacing argument: columns in D_c removed and
// rows in D_r removed, where D_r/D_c are the heavy rows/columns of psi.
struct MinorSpectra {
    Spectrum col_removed;   // S(B^{[D_c]})
    Spectrum row_removed;   // S(B^{(D_r)})
    std::vector<int> d_r;
    std::vector<int> d_c;
};

MinorSpectra minor_spectra(const Decomposition& decomp);

// Smallest eigenvalue of one M x M GOE draw (off-diagonal variance 1/M,
// diagonal variance 2/M).
double goe_smallest(int M, std::uint64_t seed);

}  // namespace rmtedge
