#include <cmath>
#include <vector>

#include "doctest.h"
#include "subdiff/energy.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/kernels.hpp"
#include "subdiff/special_functions.hpp"

using namespace subdiff;

TEST_CASE("linear case reproduces the Mittag-Leffler function") {
    const auto grid = ode_mesh(100.0);
    const auto sol = solve_fractional_ode(0.5, 2.0, 1.0, 3.0, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        err = std::max(err, std::abs(sol.values[i] - 3.0 * special::mittag_leffler_neg(0.5, 2.0 * std::sqrt(grid[i]))));
    }
    CHECK(err <= 1e-4);
    CHECK(sol.values[0] == 3.0);
}

TEST_CASE("classical limit matches the separable solution") {
    const auto grid = ode_mesh(50.0);
    const auto sol = solve_fractional_ode(1.0, 1.0, 3.0, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); i += 37) {
        const double exact = 1.0 / std::sqrt(1.0 + 2.0 * grid[i]);
        CHECK(std::abs(sol.values[i] - exact) <= 1e-4);
    }
}

TEST_CASE("classical linear case stays positive and accurate") {
    const auto grid = ode_mesh(100.0, 1.05);
    const auto sol = solve_fractional_ode(1.0, 1.0, 1.0, 1.0, grid);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(sol.values[i] > 0.0);
        CHECK(sol.values[i] == doctest::Approx(std::exp(-grid[i])).epsilon(1e-3));
    }
    // e^{-t} leaves the double range long before t = 1e4.
    CHECK_THROWS_AS(solve_fractional_ode(1.0, 1.0, 1.0, 1.0, ode_mesh(1e4)), Error);
}

TEST_CASE("a stiff initial layer is resolved below the first grid node") {
    const auto grid = ode_mesh(1e4);
    const auto sol = solve_fractional_ode(0.1, 10.0, 1.0, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); i += 50) {
        CHECK(sol.values[i] == doctest::Approx(special::mittag_leffler_neg(0.1, 10.0 * std::pow(grid[i], 0.1))).epsilon(1e-3));
    }
}

TEST_CASE("zero datum stays zero and larger mu decays faster") {
    const auto grid = ode_mesh(10.0);
    for (double w : solve_fractional_ode(0.5, 1.0, 2.0, 0.0, grid).values) CHECK(w == 0.0);
    const auto a = solve_fractional_ode(0.5, 0.5, 2.0, 1.0, grid).values;
    const auto b = solve_fractional_ode(0.5, 1.0, 2.0, 1.0, grid).values;
    const auto c = solve_fractional_ode(0.5, 2.0, 2.0, 1.0, grid).values;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(b[i] < a[i]);
        CHECK(c[i] < b[i]);
    }
}

TEST_CASE("first-order convergence against the linear oracle") {
    double previous = 0.0;
    for (double ratio : {1.04, 1.02}) {
        const auto grid = ode_mesh(10.0, ratio);
        const auto sol = solve_fractional_ode(0.5, 1.0, 1.0, 1.0, grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(sol.values[i] - special::mittag_leffler_neg(0.5, std::sqrt(grid[i]))));
        }
        if (previous > 0.0) CHECK(previous / err >= 1.8);
        previous = err;
    }
}

TEST_CASE("nonlinear decay rate alpha / gamma") {
    const auto sol = solve_fractional_ode(0.5, 1.0, 3.0, 1.0, ode_mesh(1e10));
    const auto refined = solve_fractional_ode(0.5, 1.0, 3.0, 1.0, ode_mesh(1e10, 1.01));
    const auto r = power_bound_fit(sol, refined);
    CHECK(r.finite);
    CHECK(r.stable);
    CHECK(r.slope == doctest::Approx(-1.0 / 6.0).epsilon(0.03 * 6.0));
    CHECK(r.c1 <= r.c2);
}

TEST_CASE("fundamental identity") {
    const Smooth k{[](double t) { return std::exp(-t); }, [](double t) { return -std::exp(-t); }};
    const Smooth u{[](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); }};
    const auto grid = std::vector<double>{0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
    const Smooth square{[](double y) { return y * y; }, [](double y) { return 2.0 * y; }};
    CHECK(fundamental_identity_residual(k, square, u, grid).max_residual <= 1e-6);
    const Smooth linear{[](double y) { return y; }, [](double) { return 1.0; }};
    CHECK(fundamental_identity_residual(k, linear, u, grid).max_residual <= 1e-10);

    const double eps = 0.1;
    const Smooth convex{[=](double y) { return y - eps * std::log(y + eps); }, [=](double y) { return 1.0 - eps / (y + eps); }};
    const Smooth positive{[](double t) { return 2.0 + std::cos(3.0 * t); }, [](double t) { return -3.0 * std::sin(3.0 * t); }};
    const auto report = fundamental_identity_residual(k, convex, positive, grid);
    CHECK(report.convexity_holds);
}

TEST_CASE("discrete L2 norm inequality") {
    const std::size_t steps = 40, points = 64;
    const double dt = 0.05, dx = 0.1;
    std::vector<double> k(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) k[n] = std::exp(-dt * static_cast<double>(n));

    SUBCASE("random smooth fields") {
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto v = random_smooth_field(seed, steps, points);
            const std::vector<double> v0(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(points));
            CHECK(l2_norm_inequality_check(k, v, v0, dx).passed);
        }
    }
    SUBCASE("constant in space is the equality case") {
        std::vector<double> v(steps * points), v0(points, 1.0);
        for (std::size_t n = 0; n < steps; ++n) {
            for (std::size_t i = 0; i < points; ++i) v[n * points + i] = std::exp(-0.1 * static_cast<double>(n + 1));
        }
        const auto r = l2_norm_inequality_check(k, v, v0, dx);
        CHECK(r.passed);
        CHECK(std::abs(r.min_margin) <= 1e-12 * r.scale);
    }
    SUBCASE("separable field with zero start is the equality case") {
        std::vector<double> v(steps * points), v0(points, 0.0);
        for (std::size_t n = 0; n < steps; ++n) {
            for (std::size_t i = 0; i < points; ++i) {
                v[n * points + i] = (1.0 + static_cast<double>(n)) * (1.0 + std::sin(0.1 * static_cast<double>(i)));
            }
        }
        const auto r = l2_norm_inequality_check(k, v, v0, dx);
        CHECK(r.passed);
        CHECK(std::abs(r.min_margin) <= 1e-10 * r.scale);
    }
}
