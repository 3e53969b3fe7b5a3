#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/special_functions.hpp"

using namespace subdiff::special;

TEST_CASE("gamma matches frozen values") {
    CHECK(subdiff::special::gamma(0.5) == doctest::Approx(oracle::gamma_half).epsilon(1e-13));
    CHECK(subdiff::special::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(subdiff::special::gamma(1.5) == doctest::Approx(oracle::gamma_three_halves).epsilon(1e-13));
    CHECK(subdiff::special::gamma(4.3) == doctest::Approx(oracle::gamma_4_3).epsilon(1e-13));
    CHECK(subdiff::special::gamma(0.013) == doctest::Approx(oracle::gamma_0_013).epsilon(1e-13));
    CHECK(reciprocal_gamma(0.0) == 0.0);
    CHECK(reciprocal_gamma(-2.0) == 0.0);
    CHECK(log_gamma(50.0) == doctest::Approx(std::lgamma(50.0)).epsilon(1e-13));
}

TEST_CASE("Mittag-Leffler function at frozen points") {
    CHECK(mittag_leffler_neg(0.37, 0.0) == 1.0);
    CHECK(mittag_leffler_neg(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(mittag_leffler_neg(0.5, 1.0) == doctest::Approx(oracle::ml_half_at_1).epsilon(1e-10));
    CHECK(mittag_leffler_neg(0.5, 10.0) == doctest::Approx(oracle::ml_half_at_10).epsilon(1e-10));
    CHECK(mittag_leffler_neg(0.7, 2.0) == doctest::Approx(oracle::ml_0_7_at_2).epsilon(1e-10));
    CHECK(mittag_leffler_neg(0.3, 5.0) == doctest::Approx(oracle::ml_0_3_at_5).epsilon(1e-10));
    CHECK(mittag_leffler_neg(0.4, 3.0 * std::pow(2.0, 0.4)) ==
          doctest::Approx(oracle::ml_0_4_at_3x2pow04).epsilon(1e-10));
    CHECK(mittag_leffler_neg(0.9, 30.0) == doctest::Approx(oracle::ml_0_9_at_30).epsilon(1e-8));
}

TEST_CASE("Mittag-Leffler regimes stitch continuously") {
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (double x : {1.0, 50.0}) {
            const double below = mittag_leffler_neg(alpha, x * (1.0 - 1e-12));
            const double above = mittag_leffler_neg(alpha, x * (1.0 + 1e-12));
            CHECK(std::abs(above - below) <= 1e-8 * std::abs(below));
        }
    }
}

TEST_CASE("Mittag-Leffler rejects arguments outside its domain") {
    CHECK_THROWS_AS((void)mittag_leffler_neg(0.0, 1.0), subdiff::Error);
    CHECK_THROWS_AS((void)mittag_leffler_neg(1.5, 1.0), subdiff::Error);
    CHECK_THROWS_AS((void)mittag_leffler_neg(0.5, -1.0), subdiff::Error);
}

TEST_CASE("exponential integral") {
    CHECK(exp_integral_e1(1.0) == doctest::Approx(oracle::e1_at_1).epsilon(1e-13));
    CHECK(exp_integral_e1(1e-3) == doctest::Approx(oracle::e1_at_1em3).epsilon(1e-13));
    const double small = 1e-3;
    CHECK(std::abs(exp_integral_e1(small) - (-std::numbers::egamma - std::log(small) + small)) < 1e-6);
    CHECK(scaled_exp_integral_e1(100.0) == doctest::Approx(oracle::scaled_e1_at_100).epsilon(1e-13));
    CHECK(scaled_exp_integral_e1(1e4) == doctest::Approx(oracle::scaled_e1_at_1e4).epsilon(1e-13));
    CHECK(100.0 * scaled_exp_integral_e1(100.0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Bessel functions of the first kind") {
    CHECK(bessel_j(0.0, 0.0) == 1.0);
    CHECK(bessel_j(0.5, 2.0) == doctest::Approx(oracle::j_half_at_2).epsilon(1e-12));
    CHECK(bessel_j(0.5, 2.0) == doctest::Approx(std::sqrt(2.0 / (std::numbers::pi * 2.0)) * std::sin(2.0)).epsilon(1e-12));
    CHECK(bessel_j(0.0, 10.0) == doctest::Approx(oracle::j0_at_10).epsilon(1e-12));
    CHECK(bessel_j(1.5, 50.0) == doctest::Approx(oracle::j_1_5_at_50).epsilon(1e-10));
    CHECK(bessel_j(2.5, 200.0) == doctest::Approx(oracle::j_2_5_at_200).epsilon(1e-10));
    // First positive zero of J_1 near 3.8317.
    CHECK(bessel_j(1.0, 3.8) > 0.0);
    CHECK(bessel_j(1.0, 3.9) < 0.0);
}
