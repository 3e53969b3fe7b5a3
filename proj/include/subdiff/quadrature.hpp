#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace subdiff::quad {

// Gauss-Legendre rule on [-1, 1]; nodes ascending.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Cached per order, safe to call from several threads.
const GaussRule& gauss_legendre(int n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double gauss(F&& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
AdaptiveResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double rel_tol,
                             double abs_tol = 0.0, int max_intervals = 2000);

// Adaptive integration over consecutive breakpoints; the breakpoints must be increasing.
AdaptiveResult gauss_kronrod(const std::function<double(double)>& f, std::span<const double> breaks, double rel_tol,
                             double abs_tol = 0.0, int max_intervals = 2000);

// Sum of an alternating-type sequence by repeated averaging of partial sums
// (Euler transformation).  Returns the accelerated limit and an error proxy.
struct SeriesLimit {
    double value = 0.0;
    double error = 0.0;
};
SeriesLimit euler_limit(std::span<const double> terms);

// Tanh-sinh rule on [a, b] for integrands with integrable endpoint
// singularities.  f receives (x, x - a, b - x) with both distances computed
// without cancellation.
double tanh_sinh(const std::function<double(double, double, double)>& f, double a, double b, double step = 1.0 / 32.0);

}  // namespace subdiff::quad
