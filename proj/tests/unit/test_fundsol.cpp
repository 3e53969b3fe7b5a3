#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "subdiff/field.hpp"
#include "subdiff/fundsol.hpp"
#include "subdiff/kernels.hpp"
#include "subdiff/relaxation.hpp"

using namespace subdiff;
using std::numbers::pi;

TEST_CASE("heat limit fundamental solution in three dimensions") {
    const std::vector<double> times{1.0};
    const RelaxationModel model(KernelPair::fractional(1.0), times);
    for (double r : {0.1, 1.0, 3.0}) {
        const double exact = std::pow(4.0 * pi, -1.5) * std::exp(-r * r / 4.0);
        CHECK(std::abs(z_radial_value(model.at(1.0), 3, r) - exact) <= 1e-6);
    }
}

TEST_CASE("Hankel and FFT reconstructions agree in one dimension") {
    const std::vector<double> times{1.0};
    const RelaxationModel model(KernelPair::fractional(0.5), times);
    const auto slice = model.at(1.0);
    const GridField z = z_grid_fft(slice, 1, 400.0, 16384);
    int compared = 0;
    for (int m = z.points() / 2 + 1; m < z.points(); m += 13) {
        const double fft = z.values()[m];
        if (fft < 1e-6) continue;
        CHECK(z_radial_value(slice, 1, z.coordinate(m)) == doctest::Approx(fft).epsilon(1e-4));
        ++compared;
    }
    CHECK(compared > 5);
    // Even symbol: the grid field is symmetric about the origin.
    for (int m = 1; m < z.points() / 2; m += 31) {
        CHECK(z.values()[z.points() / 2 + m] == doctest::Approx(z.values()[z.points() / 2 - m]).epsilon(1e-12));
    }
}

TEST_CASE("unit mass in four dimensions") {
    const std::vector<double> times{1.0, 100.0};
    const RelaxationModel model(KernelPair::fractional(0.5), times);
    for (double t : times) {
        const auto profile = z_radial_hankel(model.at(t), 4, default_radii(model.at(t)));
        const auto mass = mass_check(profile);
        CHECK(mass.passed);
        CHECK(mass.deviation <= 1e-3);
        CHECK(profile.worst_rise() <= 1e-6);
    }
}

TEST_CASE("Lebesgue norms of Z: finite below the threshold, divergent at it") {
    const std::vector<double> times{10.0};
    const RelaxationModel model(KernelPair::fractional(0.5), times);
    const auto finite = z_lp_norm(model.at(10.0), 3, 1.2);
    CHECK(finite.status == NormStatus::finite);
    CHECK(finite.value > 0.0);
    const auto divergent = z_lp_norm(model.at(10.0), 4, 2.0);
    CHECK(divergent.status == NormStatus::divergent);
    REQUIRE(divergent.totals.size() >= 3);
    CHECK(divergent.totals.back() > divergent.totals.front());
}

TEST_CASE("weak norm of Z scales like t^-alpha in three dimensions") {
    const std::vector<double> times{1e2, 1e4};
    const RelaxationModel model(KernelPair::fractional(0.5), times);
    const double a = z_weak_lp(model.at(1e2), 3).value;
    const double b = z_weak_lp(model.at(1e4), 3).value;
    CHECK(std::log(b / a) / std::log(100.0) == doctest::Approx(-0.5).epsilon(0.05 / 0.5));
}

TEST_CASE("Hankel integral of a Gaussian") {
    // int_0^inf e^{-rho^2/2} J_0(r rho) rho d rho = e^{-r^2/2}
    const auto f = [](double rho) { return rho * std::exp(-0.5 * rho * rho); };
    const auto h = hankel_integral(f, 0.0, 1.3, 10.0, 40.0);
    CHECK(h.value == doctest::Approx(std::exp(-0.5 * 1.69)).epsilon(1e-8));
}

TEST_CASE("radial norms of a profile") {
    const auto radii = log_radii(1e-3, 20.0, 80);
    std::vector<double> values;
    for (double r : radii) values.push_back(std::exp(-0.5 * r * r) / (2.0 * pi));
    const RadialProfile p(2, 1.0, radii, values);
    CHECK(radial_lp_norm(p, 1.0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(radial_lp_norm(p, INFINITY) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-5));
    CHECK(msd_from_profile(p) == doctest::Approx(2.0).epsilon(1e-5));
}
