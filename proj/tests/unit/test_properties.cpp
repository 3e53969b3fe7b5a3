// Invariants checked on seeded random samples of parameters and inputs.
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "subdiff/decay.hpp"
#include "subdiff/energy.hpp"
#include "subdiff/field.hpp"
#include "subdiff/kernels.hpp"
#include "subdiff/relaxation.hpp"
#include "subdiff/special_functions.hpp"

using namespace subdiff;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 engine(20261016);
    return engine;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

std::vector<double> random_times(std::size_t n, double lo, double hi) {
    std::vector<double> t(n);
    for (double& x : t) x = log_uniform(lo, hi);
    std::sort(t.begin(), t.end());
    return t;
}

std::vector<KernelPair> builtin_pairs() {
    return {KernelPair::fractional(uniform(0.05, 0.95)), KernelPair::fractional_sum({0.3, 0.7}, {1.0, 1.0}),
            KernelPair::ultraslow(), KernelPair::switched_ultraslow()};
}

}  // namespace

TEST_CASE("pair kernels: k nonincreasing and nonnegative, l nonnegative, 1*l nondecreasing") {
    for (const KernelPair& p : builtin_pairs()) {
        CAPTURE(p.describe());
        CHECK(p.cumulative_l(0.0) == 0.0);
        const auto t = random_times(200, 1e-6, 1e6);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(p.k(t[i]) >= 0.0);
            CHECK(p.l(t[i]) >= 0.0);
            if (i > 0) {
                CHECK(p.k(t[i]) <= p.k(t[i - 1]) * (1.0 + 1e-12));
                CHECK(p.cumulative_l(t[i]) >= p.cumulative_l(t[i - 1]) * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("Mittag-Leffler envelope and monotone differences") {
    for (int trial = 0; trial < 200; ++trial) {
        const double a = uniform(0.05, 0.99);
        const double x = log_uniform(1e-6, 1e6);
        const double e = special::mittag_leffler_neg(a, x);
        CAPTURE(a);
        CAPTURE(x);
        CHECK(e >= 1.0 / (1.0 + special::gamma(1.0 - a) * x) * (1.0 - 1e-10));
        CHECK(e <= 1.0 / (1.0 + x / special::gamma(1.0 + a)) * (1.0 + 1e-10));
        const double q = 1.05;
        const double e1 = special::mittag_leffler_neg(a, x * q), e2 = special::mittag_leffler_neg(a, x * q * q);
        CHECK(e1 < e);
        CHECK(e2 - e1 >= q * (e1 - e) - 1e-12);  // convex on the geometric grid
    }
}

TEST_CASE("relaxation symbol stays in (0, 1] and decreases in t and mu") {
    for (const KernelPair& p : builtin_pairs()) {
        CAPTURE(p.describe());
        const auto times = random_times(6, 1e-2, 1e4);
        const subdiff::RelaxationModel model(p, times);
        const auto mus = random_times(40, 1e-4, 1e4);
        std::vector<double> previous;
        for (double t : times) {
            const auto slice = model.at(t);
            std::vector<double> row;
            for (double mu : mus) row.push_back(slice(mu));
            for (std::size_t j = 0; j < row.size(); ++j) {
                CHECK(std::isfinite(row[j]));
                CHECK(row[j] > 0.0);
                CHECK(row[j] <= 1.0);
                if (j > 0) CHECK(row[j] <= row[j - 1] + 1e-12);
                if (!previous.empty()) CHECK(row[j] <= previous[j] + 1e-6);
            }
            previous = row;
        }
    }
}

TEST_CASE("exact power laws are fitted exactly") {
    for (int trial = 0; trial < 50; ++trial) {
        const double slope = uniform(-2.0, 0.5), scale = log_uniform(1e-3, 1e3);
        const auto t = random_times(20, 1.0, 1e8);
        std::vector<double> v;
        for (double x : t) v.push_back(scale * std::pow(x, slope));
        CHECK(fit_decay_exponent(t, v, t.front(), t.back()).slope == doctest::Approx(slope).epsilon(1e-9));
    }
}

TEST_CASE("grid norms: Plancherel, homogeneity, Chebyshev") {
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 3;
        const int n = d == 1 ? 256 : d == 2 ? 32 : 8;
        std::vector<double> values(static_cast<std::size_t>(std::pow(n, d)));
        for (double& v : values) v = normal(rng());
        const GridField f(d, uniform(1.0, 10.0), n, values);
        CHECK(spectral_l2_norm(f) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-10));
        const double p = uniform(1.0, 4.0), c = uniform(-5.0, 5.0);
        std::vector<double> scaled = values;
        for (double& v : scaled) v *= c;
        CHECK(lp_norm(GridField(d, f.extent(), n, scaled), p) == doctest::Approx(std::abs(c) * lp_norm(f, p)).epsilon(1e-12));
        CHECK(weak_lp_quasinorm(f, p) <= lp_norm(f, p) * (1.0 + 1e-12));
    }
}

TEST_CASE("nonlinear relaxation ODE keeps w positive and nonincreasing") {
    for (int trial = 0; trial < 12; ++trial) {
        const double a = uniform(0.1, 1.0), gamma = uniform(1.0, 5.0), mu = log_uniform(0.1, 10.0);
        const auto sol = solve_fractional_ode(a, mu, gamma, uniform(0.1, 3.0), ode_mesh(1e4, 1.05));
        for (std::size_t i = 1; i < sol.values.size(); ++i) {
            CHECK(sol.values[i] > 0.0);
            CHECK(sol.values[i] <= sol.values[i - 1]);
        }
    }
}

TEST_CASE("discrete L2 inequality for random nonincreasing kernels") {
    const std::size_t steps = 30, points = 32;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        std::vector<double> k(steps);
        double value = uniform(0.5, 2.0);
        for (double& x : k) {
            x = value;
            value *= uniform(0.3, 1.0);
        }
        const auto v = random_smooth_field(seed, steps, points);
        std::vector<double> v0(points);
        for (double& x : v0) x = uniform(-1.0, 1.0);
        CHECK(l2_norm_inequality_check(k, v, v0, 0.1).passed);
    }
}
