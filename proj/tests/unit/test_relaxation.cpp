#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "subdiff/kernels.hpp"
#include "subdiff/relaxation.hpp"
#include "subdiff/special_functions.hpp"

using subdiff::KernelPair;

TEST_CASE("Volterra solver reproduces the Mittag-Leffler relaxation") {
    const KernelPair p = KernelPair::fractional(0.5);
    double previous_error = 0.0;
    for (int n : {1024, 2048}) {
        const auto grid = subdiff::graded_mesh(10.0, n);
        const auto s = subdiff::solve_relaxation(p, 1.0, grid);
        double error = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            error = std::max(error, std::abs(s[i] - subdiff::special::mittag_leffler_neg(0.5, std::sqrt(grid[i]))));
        }
        if (n == 2048) {
            CHECK(error <= 1e-4);
            CHECK(previous_error / error >= 1.8);
        }
        previous_error = error;
    }
}

TEST_CASE("mu = 0 gives s = 1") {
    const auto grid = subdiff::graded_mesh(5.0, 64);
    for (double v : subdiff::solve_relaxation(KernelPair::ultraslow(), 0.0, grid)) CHECK(v == doctest::Approx(1.0));
    const std::vector<double> mus{0.0};
    CHECK(subdiff::relaxation_symbol(KernelPair::fractional(0.3), 2.0, mus)[0] == 1.0);
}

TEST_CASE("both Volterra forms agree") {
    const KernelPair p = KernelPair::fractional(0.4);
    const auto grid = subdiff::graded_mesh(2.0, 1024);
    const auto a = subdiff::solve_relaxation(p, 3.0, grid, subdiff::VolterraForm::l_form);
    const auto b = subdiff::solve_relaxation(p, 3.0, grid, subdiff::VolterraForm::k_form);
    const double exact = oracle::ml_0_4_at_3x2pow04;
    CHECK(a.back() == doctest::Approx(exact).epsilon(1e-3));
    CHECK(b.back() == doctest::Approx(exact).epsilon(1e-3));
    const std::vector<double> mus{3.0};
    CHECK(subdiff::relaxation_symbol(p, 2.0, mus)[0] == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("relaxation symbol is nonincreasing in mu") {
    const auto mus = subdiff::log_space(1e-3, 1e3, 61);
    for (const KernelPair& p : {KernelPair::fractional(0.6), KernelPair::switched_ultraslow()}) {
        const auto s = subdiff::relaxation_symbol(p, 3.0, mus);
        for (std::size_t j = 1; j < s.size(); ++j) CHECK(s[j] <= s[j - 1] + 1e-12);
        for (double v : s) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("sandwich bounds on s") {
    const std::vector<double> times = subdiff::log_space(0.1, 1e4, 13);
    const std::vector<double> mus = subdiff::log_space(1e-2, 1e2, 9);
    const KernelPair frac = KernelPair::fractional(0.5);
    const auto ml = [](double t, double mu) { return subdiff::special::mittag_leffler_neg(0.5, mu * std::sqrt(t)); };
    CHECK(subdiff::verify_smu_bounds(frac, ml, times, mus).passed);

    const auto table = subdiff::RelaxationTable::build(KernelPair::ultraslow(), times);
    const auto report = subdiff::verify_smu_bounds(table, 1e-3, {}, 0.1);
    CHECK(report.passed);
    CHECK(report.violations == 0);
}

TEST_CASE("complete monotonicity and derivative bounds") {
    const auto s = [](double mu) { return subdiff::special::mittag_leffler_neg(0.5, mu); };
    const auto mus = subdiff::log_space(1e-2, 1e2, 40);
    CHECK(subdiff::complete_monotonicity_check(s, mus, 4).passed);
    CHECK(subdiff::complete_monotonicity_check(s, mus, 0).passed);

    const auto s3 = [](double mu) { return subdiff::special::mittag_leffler_neg(0.3, mu); };
    const auto d = subdiff::taylor_derivative_bound_check(s3, 4.0, 2);
    CHECK(d.passed);
    CHECK(d.lhs <= d.rhs);
    CHECK(subdiff::taylor_derivative_bound_check(s3, 4.0, 0).passed);
}

TEST_CASE("central derivative of a polynomial") {
    const auto f = [](double x) { return x * x * x; };
    const auto [v, err] = subdiff::central_derivative(f, 2.0, 2, 1e-2);
    CHECK(v == doctest::Approx(12.0).epsilon(1e-8));
    CHECK(err >= 0.0);
}

TEST_CASE("multiplier bound is scale invariant for the fractional pair") {
    const std::vector<double> times{1.0, 10.0, 100.0};
    const subdiff::RelaxationModel model(KernelPair::fractional(0.5), times);
    const auto mus = subdiff::log_space(1e-4, 1e4, 161);
    const auto r = subdiff::multiplier_bound_check(model, times, 0.5, 2, mus);
    CHECK(r.finite);
    CHECK(r.spread < 0.1);
    const auto r0 = subdiff::multiplier_bound_check(model, times, 1.0, 0, mus);
    for (double v : r0.sup_values) CHECK(v <= 1.0 + 1e-9);
}

TEST_CASE("relaxation model slices") {
    const std::vector<double> times{1.0, 100.0};
    const subdiff::RelaxationModel model(KernelPair::ultraslow(), times);
    const auto slice = model.at(100.0);
    CHECK(slice.t() == 100.0);
    CHECK(slice(0.0) == doctest::Approx(1.0));
    CHECK(slice.cumulative_l() == doctest::Approx(KernelPair::ultraslow().cumulative_l(100.0)).epsilon(1e-8));
    const std::vector<double> mus{2.0};
    CHECK(slice(2.0) == doctest::Approx(subdiff::relaxation_symbol(KernelPair::ultraslow(), 100.0, mus)[0]).epsilon(1e-4));
}
