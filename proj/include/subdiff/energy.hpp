#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace subdiff {

// Solution of  d_t^alpha (w - w0) + mu w^gamma = 0,  i.e.
// w - w0 + mu g_alpha * (w^gamma) = 0.
struct FracOdeSolution {
    double alpha = 0.0;
    double mu = 0.0;
    double gamma = 1.0;
    double w0 = 0.0;
    std::vector<double> times;
    std::vector<double> values;

    // Header "t,w".
    void write_csv(std::ostream& out) const;
};

// Product integration with piecewise-linear w^gamma and exact g_alpha
// moments; each step solves a monotone scalar equation by Newton's method
// safeguarded by bisection on (0, rhs].  alpha = 1 gives the trapezoidal
// scheme for the classical ODE.  grid[0] must be 0.
//
// Values are reported on `grid`, but the march refines it where needed: a
// geometric layer resolves the initial drop, steps that would make w
// negative or increasing are halved, and classical steps stay below the
// linearized relaxation time.  A solution falling below the double range
// is a range error.
FracOdeSolution solve_fractional_ode(double alpha, double mu, double gamma, double w0, std::span<const double> grid);

// Geometric mesh suited to solve_fractional_ode out to `horizon`.
std::vector<double> ode_mesh(double horizon, double ratio = 1.02, double first = 1e-6);

struct PowerBoundReport {
    double c1 = 0.0;  // largest c1 with c1/(1 + t^{alpha/gamma}) <= w
    double c2 = 0.0;  // smallest c2 with w <= c2/(1 + t^{alpha/gamma})
    double slope = 0.0;   // fitted over the last two decades
    double target = 0.0;  // -alpha/gamma
    double refined_c1 = 0.0;
    double refined_c2 = 0.0;
    bool finite = false;
    bool stable = false;  // c1, c2 within 1% of the refined solution's
    bool passed = false;  // finite, stable and |slope - target| <= 0.03
};
PowerBoundReport power_bound_fit(const FracOdeSolution& solution, const FracOdeSolution& refined);

// A smooth scalar function with its derivative.
struct Smooth {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

struct IdentityReport {
    double max_residual = 0.0;      // max |LHS - RHS| of the identity
    double worst_t = 0.0;
    double convexity_margin = 0.0;  // min of H'(u) d_t(k*u) - [d_t(k*H(u)) + (u H'(u) - H(u)) k]
    bool convexity_holds = false;   // margin >= -1e-10
};

// For a nonincreasing kernel k, a smooth H and a smooth path u, evaluates
//   H'(u) d_t(k*u) = d_t(k*H(u)) + (u H'(u) - H(u)) k(t)
//                    + int_0^t [H(u(t-s)) - H(u(t)) - H'(u(t))(u(t-s) - u(t))] (-k'(s)) ds
// at every grid time t > 0 with d_t(k*v)(t) = k(t) v(0) + int_0^t k(s) v'(t-s) ds.
IdentityReport fundamental_identity_residual(const Smooth& k, const Smooth& h, const Smooth& u,
                                             std::span<const double> grid);

struct InequalityReport {
    double min_margin = 0.0;  // min over interior steps of LHS - RHS
    double scale = 0.0;       // max |LHS| for judging the margin
    std::size_t steps = 0;
    bool passed = false;      // min_margin >= -1e-12 scale
};

// Discrete check of
//   int v d_t(k*[v - v0]) dx  >=  |v|_2 d_t(k*[|v|_2 - |v0|_2])
// on a uniform time grid.  k holds k_0 >= k_1 >= ... >= 0 (one per step), v
// holds steps rows of `points` values each (time-major), and dx is the
// spatial quadrature weight.  Both sides use the same discrete operator
// D_n w = sum_{0<j<n} (k_{n-1-j} - k_{n-j}) (w_n - w_j) + k_{n-1} (w_n - w_0).
InequalityReport l2_norm_inequality_check(std::span<const double> k, std::span<const double> v,
                                          std::span<const double> v0, double dx);

// A smooth random space-time field for the inequality check: a few Fourier
// modes with random amplitudes and time profiles, fixed by the seed.
std::vector<double> random_smooth_field(std::uint64_t seed, std::size_t steps, std::size_t points);

}  // namespace subdiff
