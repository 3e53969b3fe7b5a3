#include "subdiff/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include "subdiff/decay.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"
#include "subdiff/volterra.hpp"

namespace subdiff {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void FracOdeSolution::write_csv(std::ostream& out) const {
    out << "t,w\n";
    for (std::size_t i = 0; i < times.size(); ++i) out << num(times[i]) << ',' << num(values[i]) << '\n';
}

FracOdeSolution solve_fractional_ode(double alpha, double mu, double gamma, double w0, std::span<const double> grid) {
    require(alpha > 0.0 && alpha <= 1.0, ErrorCode::domain, "solve_fractional_ode: alpha must lie in (0, 1]");
    require(mu > 0.0, ErrorCode::domain, "solve_fractional_ode: mu must be positive");
    require(gamma >= 1.0, ErrorCode::domain, "solve_fractional_ode: gamma must be >= 1");
    require(w0 >= 0.0, ErrorCode::domain, "solve_fractional_ode: w0 must be nonnegative");
    require(grid.size() >= 2 && grid[0] == 0.0, ErrorCode::domain, "solve_fractional_ode: grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        require(grid[i] > grid[i - 1], ErrorCode::domain, "solve_fractional_ode: grid must increase");
    }

    FracOdeSolution sol{alpha, mu, gamma, w0, std::vector<double>(grid.begin(), grid.end()),
                        std::vector<double>(grid.size(), w0)};
    if (w0 == 0.0) return sol;

    const double c0 = 1.0 / std::tgamma(alpha);
    const double c1 = 1.0 / std::tgamma(alpha + 1.0);
    const double c2 = 1.0 / std::tgamma(alpha + 2.0);
    const volterra::KernelFunctions kernel{
        [=](double x) { return c0 * std::pow(x, alpha - 1.0); },
        [=](double x) { return c1 * std::pow(x, alpha); },
        [=](double x) { return c2 * std::pow(x, alpha + 1.0); },
    };
    const bool classical = alpha == 1.0;

    // Nodes the march must visit: the caller's grid, preceded by a geometric
    // layer that resolves the initial drop when the first interval is too
    // coarse for it (lambda t^alpha / Gamma(1 + alpha) reaching 1e-3).
    const double lambda = mu * std::pow(w0, gamma - 1.0);
    const double layer_start = std::max(std::pow(1e-3 / (c1 * lambda), 1.0 / alpha), 1e-300);
    std::vector<double> targets;
    for (double t = layer_start; t < grid[1] / 1.02; t *= 1.02) targets.push_back(t);
    targets.insert(targets.end(), grid.begin() + 1, grid.end());

    // The march runs on its own mesh: the targets plus any step halvings.
    std::vector<double> mesh{0.0};
    std::vector<double> f{std::pow(w0, gamma)};  // w^gamma at the mesh nodes
    std::vector<double> weights;
    double previous = w0;
    constexpr std::size_t max_nodes = 400000;

    // One step from mesh.back() to t; nullopt when the step breaks
    // positivity or monotonicity.
    auto step = [&](double t) -> std::optional<double> {
        const double h = t - mesh.back();
        double rhs, a;
        if (classical) {
            // Incremental form of the same trapezoidal step: no cancellation
            // against w0 once w is many orders below it.
            rhs = previous - 0.5 * mu * h * f.back();
            a = 0.5 * mu * h;
        } else {
            mesh.push_back(t);
            const std::size_t n = mesh.size() - 1;
            weights.assign(n + 1, 0.0);
            volterra::row_weights(kernel, mesh, n, weights);
            mesh.pop_back();
            double history = 0.0;
            for (std::size_t j = 0; j < n; ++j) history += weights[j] * f[j];
            rhs = w0 - mu * history;
            a = mu * weights[n];
        }
        if (!(rhs > 0.0)) return std::nullopt;
        // x + a x^gamma = rhs has one root in (0, rhs].
        double lo = 0.0, hi = rhs;
        double x = std::min(previous, rhs);
        for (int it = 0; it < 200; ++it) {
            const double g = x + a * std::pow(x, gamma) - rhs;
            if (g > 0.0) hi = x;
            else lo = x;
            if (std::abs(g) <= 1e-15 * rhs || hi - lo <= 1e-15 * rhs) break;
            const double dg = 1.0 + a * gamma * std::pow(x, gamma - 1.0);
            double next = x - g / dg;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            x = next;
        }
        if (!(x > 0.0) || x > previous * (1.0 + 1e-12)) return std::nullopt;
        return x;
    };

    std::size_t next_grid = 1;
    for (double target : targets) {
        while (mesh.back() < target) {
            require(previous >= 1e-290, ErrorCode::range,
                    "solve_fractional_ode: solution underflows double precision at t = " + num(mesh.back()));
            double t = target;
            // The trapezoidal rule keeps its sign only for steps below the
            // linearized relaxation time.
            if (classical) t = std::min(t, mesh.back() + 1.0 / (mu * gamma * std::pow(previous, gamma - 1.0)));
            std::optional<double> x;
            while (!(x = step(t))) {
                const double half = 0.5 * (mesh.back() + t);
                if (!(half > mesh.back() && half < t) || mesh.size() >= max_nodes) {
                    fail(ErrorCode::internal,
                         "solve_fractional_ode: scheme lost positivity or monotonicity at t = " + num(t));
                }
                t = half;
            }
            mesh.push_back(t);
            f.push_back(std::pow(*x, gamma));
            previous = *x;
            require(mesh.size() < max_nodes, ErrorCode::resolution, "solve_fractional_ode: too many internal steps");
        }
        if (next_grid < grid.size() && target == grid[next_grid]) sol.values[next_grid++] = previous;
    }
    return sol;
}

std::vector<double> ode_mesh(double horizon, double ratio, double first) {
    return geometric_mesh(first, horizon, ratio);
}

PowerBoundReport power_bound_fit(const FracOdeSolution& solution, const FracOdeSolution& refined) {
    auto constants = [](const FracOdeSolution& s) {
        const double e = s.alpha / s.gamma;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < s.times.size(); ++i) {
            const double v = s.values[i] * (1.0 + std::pow(s.times[i], e));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return std::pair{lo, hi};
    };
    PowerBoundReport out;
    std::tie(out.c1, out.c2) = constants(solution);
    std::tie(out.refined_c1, out.refined_c2) = constants(refined);
    const double t_max = solution.times.back();
    out.slope = fit_decay_exponent(solution.times, solution.values, t_max / 100.0, t_max).slope;
    out.target = -solution.alpha / solution.gamma;
    out.finite = out.c1 > 0.0 && std::isfinite(out.c2);
    auto near = [](double a, double b) { return std::abs(a - b) <= 0.01 * std::max(a, b); };
    out.stable = out.finite && near(out.c1, out.refined_c1) && near(out.c2, out.refined_c2);
    out.passed = out.stable && std::abs(out.slope - out.target) <= 0.03;
    return out;
}

IdentityReport fundamental_identity_residual(const Smooth& k, const Smooth& h, const Smooth& u,
                                             std::span<const double> grid) {
    for (double t : grid) {
        require(k.derivative(t) <= 0.0 && k.value(t) >= 0.0, ErrorCode::precondition,
                "fundamental_identity_residual: k must be nonnegative and nonincreasing");
    }
    auto integral = [](const std::function<double(double)>& f, double t) {
        if (t <= 0.0) return 0.0;
        return quad::gauss_kronrod(f, 0.0, t, 1e-13, 1e-15).value;
    };
    IdentityReport out;
    out.convexity_margin = std::numeric_limits<double>::infinity();
    const double u0 = u.value(0.0);
    for (double t : grid) {
        if (t <= 0.0) continue;
        const double ut = u.value(t);
        const double hp = h.derivative(ut);
        const double dku = k.value(t) * u0 + integral([&](double s) { return k.value(s) * u.derivative(t - s); }, t);
        const double dkh = k.value(t) * h.value(u0) + integral(
            [&](double s) { return k.value(s) * h.derivative(u.value(t - s)) * u.derivative(t - s); }, t);
        const double boundary = (ut * hp - h.value(ut)) * k.value(t);
        const double bracket = integral(
            [&](double s) {
                const double us = u.value(t - s);
                return (h.value(us) - h.value(ut) - hp * (us - ut)) * (-k.derivative(s));
            },
            t);
        const double lhs = hp * dku;
        const double residual = std::abs(lhs - (dkh + boundary + bracket));
        if (residual > out.max_residual) {
            out.max_residual = residual;
            out.worst_t = t;
        }
        out.convexity_margin = std::min(out.convexity_margin, lhs - (dkh + boundary));
    }
    out.convexity_holds = out.convexity_margin >= -1e-10;
    return out;
}

InequalityReport l2_norm_inequality_check(std::span<const double> k, std::span<const double> v,
                                          std::span<const double> v0, double dx) {
    const std::size_t m = v0.size();
    require(m > 0 && dx > 0.0, ErrorCode::domain, "l2_norm_inequality_check: empty spatial grid");
    require(v.size() % m == 0, ErrorCode::domain, "l2_norm_inequality_check: v is not steps x points");
    const std::size_t steps = v.size() / m;
    require(k.size() >= steps, ErrorCode::domain, "l2_norm_inequality_check: need one kernel value per step");
    for (std::size_t i = 0; i < k.size(); ++i) {
        require(k[i] >= 0.0 && (i == 0 || k[i] <= k[i - 1]), ErrorCode::precondition,
                "l2_norm_inequality_check: k must be nonnegative and nonincreasing");
    }
    // Row 0 is v0; rows 1..steps are v.
    auto row = [&](std::size_t n) { return n == 0 ? v0 : v.subspan((n - 1) * m, m); };
    auto inner = [&](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += a[i] * b[i];
        return s * dx;
    };
    std::vector<double> norms(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) norms[n] = std::sqrt(inner(row(n), row(n)));

    InequalityReport out;
    out.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= steps; ++n) {
        const auto vn = row(n);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = j == 0 ? k[n - 1] : k[n - 1 - j] - k[n - j];
            lhs += c * (norms[n] * norms[n] - inner(vn, row(j)));
            rhs += c * norms[n] * (norms[n] - norms[j]);
        }
        out.min_margin = std::min(out.min_margin, lhs - rhs);
        out.scale = std::max(out.scale, std::abs(lhs));
        ++out.steps;
    }
    out.passed = out.min_margin >= -1e-12 * std::max(out.scale, 1.0);
    return out;
}

std::vector<double> random_smooth_field(std::uint64_t seed, std::size_t steps, std::size_t points) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    constexpr int modes = 6;
    struct Mode {
        double amplitude, rate, frequency, phase, wave;
    };
    std::vector<Mode> ms;
    for (int i = 0; i < modes; ++i) {
        ms.push_back({normal(rng), 3.0 * uniform(rng), 6.0 * uniform(rng), 2.0 * std::numbers::pi * uniform(rng),
                      static_cast<double>(i + 1)});
    }
    std::vector<double> out(steps * points);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n + 1) / static_cast<double>(steps);
        for (std::size_t i = 0; i < points; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(points);
            double s = 0.0;
            for (const Mode& md : ms) {
                s += md.amplitude * std::exp(-md.rate * t) * std::cos(md.frequency * t + md.phase) *
                     std::sin(std::numbers::pi * md.wave * x);
            }
            out[n * points + i] = s;
        }
    }
    return out;
}

}  // namespace subdiff
