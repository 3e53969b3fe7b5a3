#include <cmath>
#include <vector>

#include "doctest.h"
#include "subdiff/decay.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/kernels.hpp"
#include "subdiff/relaxation.hpp"

using namespace subdiff;

TEST_CASE("decay exponent fits") {
    const auto t = log_space(1e3, 1e6, 31);
    std::vector<double> exact, wavy, logarithmic;
    for (double x : t) {
        exact.push_back(5.0 * std::pow(x, -0.5));
        wavy.push_back(std::pow(x, -0.3) * (1.0 + 0.01 * std::sin(std::log(x))));
        logarithmic.push_back(1.0 / std::log(x));
    }
    CHECK(fit_decay_exponent(t, exact, 1e3, 1e6).slope == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(fit_decay_exponent(t, wavy, 1e3, 1e6).slope == doctest::Approx(-0.3).epsilon(0.01 / 0.3));
    CHECK(fit_decay_exponent(t, logarithmic, 1e3, 1e6).slope >= -0.2);
    CHECK_THROWS_AS((void)fit_decay_exponent(t, exact, 1e3, 1.5e3), Error);
}

TEST_CASE("critical dimensions") {
    CHECK(critical_dimension(2.0) == 4.0);
    CHECK(critical_dimension(3.0) == 3.0);
    CHECK(critical_dimension(11.0) == doctest::Approx(2.2));
    CHECK(gradient_critical_dimension(2.0) == 2.0);
    CHECK(decay_target_factor(2, 2.0, NormKind::lebesgue) == doctest::Approx(-0.5));
    CHECK(decay_target_factor(5, 2.0, NormKind::lebesgue) == doctest::Approx(-1.0));
    CHECK(decay_target_factor(4, 2.0, NormKind::weak) == doctest::Approx(-1.0));
    CHECK(decay_target_factor(1, 2.0, NormKind::gradient) == doctest::Approx(-0.75));
    CHECK(parse_norm_path("hankel") == NormPath::hankel);
    CHECK_FALSE(parse_norm_path("spherical").has_value());
}

TEST_CASE("saturated L2 decay above the critical dimension") {
    SweepSpec spec;
    spec.dimension = 5;
    spec.path = NormPath::radial;
    spec.times = log_space(1e2, 1e6, 9);
    const RelaxationModel model(KernelPair::fractional(0.5), spec.times);
    const auto r = decay_sweep(model, Datum::gaussian(), spec, 0.05);
    CHECK(r.passed);
    CHECK(r.fit.slope == doctest::Approx(-0.5).epsilon(0.05 / 0.5));
    CHECK(r.target == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("lower bound flags a zero-mean datum") {
    const auto times = log_space(1.0, 1e4, 9);
    const RelaxationModel model(KernelPair::fractional(0.5), times);
    const auto good = lower_bound_ratio(model, Datum::gaussian(), 2, times);
    CHECK(good.hypothesis_met);
    CHECK(good.passed);
    CHECK(good.infimum > 0.0);
    const auto zero_mean = lower_bound_ratio(model, Datum::gaussian_difference(1.0, 2.0), 2, times);
    CHECK_FALSE(zero_mean.hypothesis_met);
}

TEST_CASE("band of a weighted series") {
    const std::vector<double> t{1.0, 2.0, 4.0};
    const std::vector<double> v{1.0, 0.5, 0.5};
    const auto b = band(t, v, [](double x) { return x; });
    CHECK(b.lower == 1.0);
    CHECK(b.upper == 2.0);
    CHECK(b.ratio == 2.0);
}
