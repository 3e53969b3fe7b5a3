// Exercises the shared library through the C header only.
#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "subdiff/subdiff.h"

TEST_CASE("version and status names") {
    CHECK(subdiff_abi_version() == SUBDIFF_ABI_VERSION);
    CHECK(std::string(subdiff_status_name(SUBDIFF_OK)) == "ok");
    CHECK(std::string(subdiff_status_name(SUBDIFF_E_CONFIG)) == "config");
    CHECK(std::string(subdiff_status_name(SUBDIFF_E_NULL_ARGUMENT)) == "null_argument");
}

TEST_CASE("pairs through opaque handles") {
    subdiff_pair* p = nullptr;
    REQUIRE(subdiff_pair_fractional(0.5, &p) == SUBDIFF_OK);
    double v = 0.0;
    CHECK(subdiff_pair_k(p, 1.0, &v) == SUBDIFF_OK);
    CHECK(v == doctest::Approx(1.0 / oracle::gamma_half));
    CHECK(subdiff_pair_cumulative_l(p, 1.0, &v) == SUBDIFF_OK);
    CHECK(v == doctest::Approx(1.0 / oracle::gamma_three_halves));
    const double mu[] = {0.0, 1.0};
    double s[2] = {};
    CHECK(subdiff_relaxation(p, 1.0, mu, 2, s) == SUBDIFF_OK);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == doctest::Approx(oracle::ml_half_at_1).epsilon(1e-10));
    subdiff_pair_free(p);

    subdiff_pair* sw = nullptr;
    REQUIRE(subdiff_pair_switched_ultraslow(&sw) == SUBDIFF_OK);
    CHECK(subdiff_pair_k(sw, 1.0, &v) == SUBDIFF_OK);
    CHECK(v == doctest::Approx(std::exp(1.0) * oracle::e1_at_1).epsilon(1e-12));
    subdiff_pair_free(sw);

    const double alphas[] = {0.3, 0.7}, weights[] = {1.0, 1.0};
    subdiff_pair* sum = nullptr;
    CHECK(subdiff_pair_fractional_sum(alphas, weights, 2, &sum) == SUBDIFF_OK);
    subdiff_pair_free(sum);
    subdiff_pair_free(nullptr);
}

TEST_CASE("errors become status codes with messages") {
    subdiff_pair* p = nullptr;
    CHECK(subdiff_pair_fractional(1.5, &p) == SUBDIFF_E_DOMAIN);
    CHECK(p == nullptr);
    CHECK(std::strlen(subdiff_last_error()) > 0);
    CHECK(subdiff_pair_fractional(0.5, nullptr) == SUBDIFF_E_NULL_ARGUMENT);
    double v = 0.0;
    CHECK(subdiff_mittag_leffler(0.5, 1.0, &v) == SUBDIFF_OK);
    CHECK(std::strlen(subdiff_last_error()) == 0);
    CHECK(v == doctest::Approx(oracle::ml_half_at_1).epsilon(1e-12));
    CHECK(subdiff_mittag_leffler(0.5, -1.0, &v) == SUBDIFF_E_DOMAIN);
}

TEST_CASE("slope fit") {
    double t[8], y[8];
    for (int i = 0; i < 8; ++i) {
        t[i] = std::pow(10.0, i);
        y[i] = 2.0 * std::pow(t[i], -0.25);
    }
    double slope = 0.0;
    CHECK(subdiff_fit_slope(t, y, 8, 1.0, 1e7, &slope) == SUBDIFF_OK);
    CHECK(slope == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("experiments through the C interface") {
    subdiff_experiment* e = nullptr;
    CHECK(subdiff_experiment_parse("{\"name\": \"x\", \"kind\": \"energy\", \"checks\": [{\"check\": \"l2-inequality\"}], \"bogus\": 1}", &e) == SUBDIFF_E_CONFIG);
    CHECK(std::string(subdiff_last_error()).find("bogus") != std::string::npos);
    CHECK(e == nullptr);

    const char* config = R"({"name": "capi", "kind": "energy",
        "checks": [{"check": "l2-inequality", "name": "ineq", "seeds": 5}]})";
    REQUIRE(subdiff_experiment_parse(config, &e) == SUBDIFF_OK);
    CHECK(std::string(subdiff_experiment_name(e)) == "capi");
    CHECK(subdiff_experiment_set_threads(e, -1) == SUBDIFF_E_CONFIG);
    CHECK(subdiff_experiment_set_tolerance_scale(e, 0.0) == SUBDIFF_E_CONFIG);
    subdiff_claim claim{};
    CHECK(subdiff_experiment_claim(e, 0, &claim) == SUBDIFF_E_PRECONDITION);

    const std::string dir = std::string(P_tmpdir) + "/subdiff-capi-test";
    size_t failed = 99;
    REQUIRE(subdiff_experiment_run(e, dir.c_str(), &failed) == SUBDIFF_OK);
    CHECK(failed == 0);
    REQUIRE(subdiff_experiment_claim_count(e) >= 1);
    CHECK(subdiff_experiment_claim(e, 0, &claim) == SUBDIFF_OK);
    CHECK(claim.passed == 1);
    CHECK(subdiff_experiment_claim(e, 1000, &claim) == SUBDIFF_E_RANGE);

    subdiff_text* text = nullptr;
    int passed = 0;
    REQUIRE(subdiff_report(dir.c_str(), &text, &passed) == SUBDIFF_OK);
    CHECK(passed == 1);
    CHECK(std::string(subdiff_text_data(text)).find("ineq") != std::string::npos);
    subdiff_text_free(text);
    subdiff_experiment_free(e);

    CHECK(subdiff_report("/nonexistent/subdiff", &text, &passed) == SUBDIFF_E_IO);
    REQUIRE(subdiff_presets_list(SUBDIFF_PRESET_DIR, &text) == SUBDIFF_OK);
    CHECK(std::string(subdiff_text_data(text)).find("ml-envelope\trelaxation") != std::string::npos);
    subdiff_text_free(text);
}
