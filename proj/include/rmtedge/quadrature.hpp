#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace rmtedge {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
const QuadRule& gauss_legendre(int n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <typename F>
auto gl_integrate(const F& f, double a, double b, int n) {
    const QuadRule& r = gauss_legendre(n);
    using R = decltype(f(0.0));
    R acc{};
    const double h = 0.5 * (b - a);
    const double m = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        acc += r.weights[i] * f(m + h * r.nodes[i]);
    }
    return acc * h;
}

// Integrate f over [a, b] on panels graded toward a (edges at a + (b-a)(k/K)^3),
// 64 Gauss-Legendre points per panel. Handles x^p endpoint behaviour at a well.
template <typename F>
auto graded_integrate(const F& f, double a, double b, int panels) {
    using R = decltype(f(0.0));
    R acc{};
    double prev = a;
    for (int k = 1; k <= panels; ++k) {
        double frac = static_cast<double>(k) / panels;
        double edge = a + (b - a) * frac * frac * frac;
        acc += gl_integrate(f, prev, edge, 64);
        prev = edge;
    }
    return acc;
}

// Doubling driver: evaluates eval(n) for n = n0, 2*n0, ... until the
// relative change drops below rel_tol. Returns the last value; reports
// the achieved delta and node count through the out-params.
template <typename Eval>
auto converge_doubling(const Eval& eval, int n0, int n_max, double rel_tol,
                       int* n_used, double* last_delta) {
    auto prev = eval(n0);
    int n = n0;
    double delta = 1.0;
    while (n < n_max) {
        n *= 2;
        auto cur = eval(n);
        delta = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
        prev = cur;
        if (delta <= rel_tol) break;
    }
    if (n_used) *n_used = n;
    if (last_delta) *last_delta = delta;
    return prev;
}

}  // namespace rmtedge
