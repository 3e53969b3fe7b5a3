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

namespace {

double std_gaussian(std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::pow(2.0 * pi, -0.5 * static_cast<double>(x.size())) * std::exp(-0.5 * r2);
}

}  // namespace

TEST_CASE("Lebesgue norms of a sampled Gaussian") {
    const GridField g = GridField::sample(1, 40.0, 1024, std_gaussian);
    CHECK(lp_norm(g, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lp_norm(g, 2.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::sqrt(pi))).epsilon(1e-10));
    CHECK(lp_norm(g, INFINITY) == doctest::Approx(1.0 / std::sqrt(2.0 * pi)));
    CHECK(spectral_l2_norm(g) == doctest::Approx(lp_norm(g, 2.0)).epsilon(1e-10));

    std::vector<double> scaled(g.values().begin(), g.values().end());
    for (double& v : scaled) v *= -3.0;
    const GridField h(1, 40.0, 1024, scaled);
    CHECK(lp_norm(h, 1.5) == doctest::Approx(3.0 * lp_norm(g, 1.5)).epsilon(1e-14));
    CHECK(weak_lp_quasinorm(h, 2.0) == doctest::Approx(3.0 * weak_lp_quasinorm(g, 2.0)).epsilon(1e-14));
    CHECK(weak_lp_quasinorm(g, 2.0) <= lp_norm(g, 2.0));
}

TEST_CASE("weak quasinorm of the unit disc indicator") {
    const GridField disc = GridField::sample(2, 4.0, 512, [](std::span<const double> x) {
        return x[0] * x[0] + x[1] * x[1] < 1.0 ? 1.0 : 0.0;
    });
    CHECK(weak_lp_quasinorm(disc, 2.0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-3));
}

TEST_CASE("spectral gradient") {
    const GridField g = GridField::sample(1, 40.0, 1024, [](std::span<const double> x) { return std::exp(-0.5 * x[0] * x[0]); });
    const auto grad = gradient_field(g);
    REQUIRE(grad.size() == 1);
    double err = 0.0;
    for (int m = 0; m < g.points(); ++m) {
        const double x = g.coordinate(m);
        err = std::max(err, std::abs(grad[0].values()[m] + x * std::exp(-0.5 * x * x)));
    }
    CHECK(err <= 1e-8);

    const GridField c = GridField::sample(2, 10.0, 32, [](std::span<const double>) { return 2.5; });
    for (const GridField& component : gradient_field(c)) CHECK(lp_norm(component, INFINITY) <= 1e-12);
}

TEST_CASE("heat limit evolves a Gaussian to variance 3") {
    const std::vector<double> times{1.0};
    const RelaxationModel model(KernelPair::fractional(1.0), times);
    const GridField u0 = GridField::sample(1, 60.0, 2048, std_gaussian);
    const GridField u = evolve(model.at(1.0), u0);
    double err = 0.0;
    for (int m = 0; m < u.points(); ++m) {
        const double x = u.coordinate(m);
        err = std::max(err, std::abs(u.values()[m] - std::exp(-x * x / 6.0) / std::sqrt(6.0 * pi)));
    }
    CHECK(err <= 1e-8);
}

TEST_CASE("grid and radial Plancherel norms agree") {
    const std::vector<double> times{10.0};
    const RelaxationModel model(KernelPair::fractional(0.5), times);
    const Datum datum = Datum::gaussian();
    const auto size = choose_grid(model.at(10.0).cumulative_l(), datum, 2);
    const double grid = lp_norm(evolve(model.at(10.0), datum, 2, size.extent, size.points), 2.0);
    const double radial = l2_norm_plancherel_radial(model.at(10.0), RadialSpectrum(2, datum));
    CHECK(grid == doctest::Approx(radial).epsilon(1e-4));
}

TEST_CASE("radial Plancherel at t near 0 returns the datum norm") {
    const std::vector<double> times{1e-12};
    const RelaxationModel model(KernelPair::fractional(0.5), times);
    // |u0|_2 for the unit-mass standard Gaussian in d = 3 is (4 pi)^{-3/4}.
    const double v = l2_norm_plancherel_radial(model.at(1e-12), RadialSpectrum(3, Datum::gaussian()));
    CHECK(v == doctest::Approx(std::pow(4.0 * pi, -0.75)).epsilon(1e-5));
}

TEST_CASE("datum spectra") {
    const Datum g = Datum::gaussian(2.0);
    CHECK(g.mass() == doctest::Approx(1.0));
    CHECK(g.radial_spectrum(0.0) == doctest::Approx(1.0));
    CHECK(g.radial_spectrum(1.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(Datum::gaussian_difference(1.0, 2.0).mass() == doctest::Approx(0.0));
    CHECK(Datum::scaled_gaussian(3.0, 1.0).mass() == doctest::Approx(3.0));
    const Datum shifted = Datum::gaussian(1.0, {1.5});
    CHECK_FALSE(shifted.radial());
    CHECK(shifted.first_moment_norm() == doctest::Approx(1.5));
}

TEST_CASE("mean squared displacement") {
    const KernelPair p = KernelPair::fractional(0.5);
    CHECK(msd_analytic(p, 4.0, 1) == doctest::Approx(2.0 * 2.0 / std::tgamma(1.5)).epsilon(1e-12));
    CHECK(msd_analytic(p, 0.0, 3) == 0.0);
    const std::vector<double> times{4.0};
    const RelaxationModel model(p, times);
    const GridField z = z_grid_fft(model.at(4.0), 1, 4000.0, 65536);
    CHECK(msd_empirical(z) == doctest::Approx(msd_analytic(p, 4.0, 1)).epsilon(0.01));
}

TEST_CASE("grid policy") {
    const auto small = choose_grid(1.0, Datum::gaussian(), 1);
    const auto large = choose_grid(1e4, Datum::gaussian(), 1);
    CHECK(large.extent > small.extent);
    CHECK((large.points & (large.points - 1)) == 0);
    CHECK(sphere_area(3) == doctest::Approx(4.0 * pi));
    CHECK(ball_volume(2) == doctest::Approx(pi));
}
