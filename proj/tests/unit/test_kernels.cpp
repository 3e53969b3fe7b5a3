#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/kernels.hpp"

using subdiff::KernelPair;

TEST_CASE("fractional pair in closed form") {
    const KernelPair p = KernelPair::fractional(0.5);
    CHECK(p.k(1.0) == doctest::Approx(1.0 / oracle::gamma_half).epsilon(1e-13));
    CHECK(p.l(4.0) == doctest::Approx(0.5 / oracle::gamma_half).epsilon(1e-13));
    CHECK(p.cumulative_l(1.0) == doctest::Approx(1.0 / oracle::gamma_three_halves).epsilon(1e-13));
    CHECK(p.cumulative_l(0.0) == 0.0);
    for (double t : {1e-3, 0.7, 3.0, 1e5}) {
        CHECK(p.cumulative_l(t) == doctest::Approx(std::pow(t, 0.5) / oracle::gamma_three_halves).epsilon(1e-10));
    }
    CHECK(subdiff::eval_k(p, 1.0) == p.k(1.0));
}

TEST_CASE("ultraslow and switched pairs against quadrature oracles") {
    const KernelPair u = KernelPair::ultraslow();
    CHECK(u.k(0.01) == doctest::Approx(oracle::ultraslow_k_at_0_01).epsilon(1e-10));
    CHECK(u.k(1.0) == doctest::Approx(oracle::ultraslow_k_at_1).epsilon(1e-10));
    CHECK(u.k(1e4) == doctest::Approx(oracle::ultraslow_k_at_1e4).epsilon(1e-10));
    CHECK(u.l(1.0) == doctest::Approx(std::exp(1.0) * oracle::e1_at_1).epsilon(1e-12));
    CHECK(u.cumulative_l(1.0) == doctest::Approx(oracle::ultraslow_cumulative_l_at_1).epsilon(1e-8));
    CHECK(u.cumulative_l(1e4) == doctest::Approx(oracle::ultraslow_cumulative_l_at_1e4).epsilon(1e-8));
    CHECK(u.cumulative_l(1e4) >= 0.5 * std::log(1e4));

    const KernelPair s = KernelPair::switched_ultraslow();
    CHECK(s.k(1.0) == doctest::Approx(std::exp(1.0) * oracle::e1_at_1).epsilon(1e-12));
    CHECK(s.l(1.0) == doctest::Approx(oracle::ultraslow_k_at_1).epsilon(1e-10));
    CHECK(s.cumulative_l(1.0) == doctest::Approx(oracle::switched_cumulative_l_at_1).epsilon(1e-8));
}

TEST_CASE("pair certificates") {
    const std::vector<double> graded = subdiff::graded_mesh(10.0, 512);
    const auto frac = subdiff::verify_pair(KernelPair::fractional(0.5), graded);
    CHECK(frac.passed);
    CHECK(frac.max_convolution_deviation <= 1e-6);

    const std::vector<double> grid = subdiff::log_space(0.01, 100.0, 40);
    CHECK(subdiff::verify_pair(KernelPair::switched_ultraslow(), grid, 1e-3).passed);
    CHECK(subdiff::verify_pair(KernelPair::ultraslow(), grid, 1e-3).passed);

    const KernelPair sum = KernelPair::fractional_sum({0.3, 0.7}, {1.0, 1.0}, {.horizon = 20.0});
    const auto r = subdiff::verify_pair(sum, subdiff::log_space(0.01, 10.0, 30), 1e-4);
    CHECK(r.passed);
    CHECK(r.max_convolution_deviation <= 1e-4);
}

TEST_CASE("a tabulated pair with l = 0 fails the certificate") {
    std::vector<double> t = subdiff::graded_mesh(10.0, 64);
    std::vector<double> k(t.size(), 1.0), l(t.size(), 0.0);
    const KernelPair p = KernelPair::tabulated(t, k, l);
    const auto r = subdiff::verify_pair(p, subdiff::log_space(0.1, 10.0, 10), 1e-3);
    CHECK_FALSE(r.passed);
    CHECK(r.max_convolution_deviation == doctest::Approx(1.0));
}

TEST_CASE("tabulated pairs refuse to extrapolate") {
    std::vector<double> t{0.0, 1.0, 2.0};
    const KernelPair p = KernelPair::tabulated(t, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    CHECK(p.k(1.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)p.k(3.0), subdiff::Error);
}

TEST_CASE("constructors validate their parameters") {
    CHECK_THROWS_AS(KernelPair::fractional(0.0), subdiff::Error);
    CHECK_THROWS_AS(KernelPair::fractional(1.2), subdiff::Error);
    CHECK_THROWS_AS(KernelPair::fractional_sum({0.7, 0.3}, {1.0, 1.0}), subdiff::Error);
    CHECK_THROWS_AS(KernelPair::fractional_sum({0.3, 0.7}, {1.0, -1.0}), subdiff::Error);
    CHECK_THROWS_AS(KernelPair::tabulated({0.0, 1.0}, {1.0}, {1.0, 1.0}), subdiff::Error);
}

TEST_CASE("ultraslow log threshold exists") {
    const double t1 = subdiff::ultraslow_log_threshold(KernelPair::ultraslow(), 1e8);
    CHECK(t1 > 1.0);
    CHECK(t1 <= 1e4);
}

TEST_CASE("meshes") {
    const auto g = subdiff::graded_mesh(10.0, 4);
    REQUIRE(g.size() == 5);
    CHECK(g[0] == 0.0);
    CHECK(g[2] == doctest::Approx(2.5));
    CHECK(g[4] == doctest::Approx(10.0));
    const auto geo = subdiff::geometric_mesh(1e-3, 1.0, 2.0);
    CHECK(geo.front() == 0.0);
    CHECK(geo.back() >= 1.0);
    const auto ls = subdiff::log_space(1.0, 100.0, 3);
    CHECK(ls[1] == doctest::Approx(10.0));
}
