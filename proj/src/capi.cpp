#include "subdiff/subdiff.h"

#include <algorithm>
#include <exception>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subdiff/errors.hpp"
#include "subdiff/experiment.hpp"
#include "subdiff/kernels.hpp"
#include "subdiff/relaxation.hpp"
#include "subdiff/special_functions.hpp"

struct subdiff_text {
    std::string data;
};

struct subdiff_pair {
    subdiff::KernelPair pair;
};

struct subdiff_experiment {
    subdiff::Experiment experiment;
    subdiff::RunOptions options;
    std::optional<subdiff::ExperimentResult> result;
};

namespace {

thread_local std::string last_error;

// Runs body, translating exceptions into status codes and recording the message.
template <class Body>
subdiff_status guarded(Body&& body) noexcept {
    try {
        body();
        last_error.clear();
        return SUBDIFF_OK;
    } catch (const subdiff::Error& e) {
        last_error = e.what();
        return static_cast<subdiff_status>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown failure";
    }
    return SUBDIFF_E_INTERNAL;
}

subdiff_status null_argument(const char* what) noexcept {
    last_error = std::string("null argument: ") + what;
    return SUBDIFF_E_NULL_ARGUMENT;
}

#define SUBDIFF_REQUIRE_ARG(p) \
    if ((p) == nullptr) return null_argument(#p)

subdiff_status make_pair(subdiff::KernelPair (*factory)(), subdiff_pair** out) noexcept {
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] { *out = new subdiff_pair{factory()}; });
}

}  // namespace

extern "C" {

int subdiff_abi_version(void) { return SUBDIFF_ABI_VERSION; }

const char* subdiff_status_name(subdiff_status status) {
    if (status == SUBDIFF_E_NULL_ARGUMENT) return "null_argument";
    return subdiff::error_code_name(static_cast<subdiff::ErrorCode>(status));
}

const char* subdiff_last_error(void) { return last_error.c_str(); }

const char* subdiff_text_data(const subdiff_text* text) { return text ? text->data.c_str() : ""; }
void subdiff_text_free(subdiff_text* text) { delete text; }

subdiff_status subdiff_pair_fractional(double alpha, subdiff_pair** out) {
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] { *out = new subdiff_pair{subdiff::KernelPair::fractional(alpha)}; });
}

subdiff_status subdiff_pair_fractional_sum(const double* alphas, const double* weights, size_t count,
                                           subdiff_pair** out) {
    SUBDIFF_REQUIRE_ARG(alphas);
    SUBDIFF_REQUIRE_ARG(weights);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] {
        *out = new subdiff_pair{subdiff::KernelPair::fractional_sum(std::vector<double>(alphas, alphas + count),
                                                                    std::vector<double>(weights, weights + count))};
    });
}

subdiff_status subdiff_pair_ultraslow(subdiff_pair** out) { return make_pair(&subdiff::KernelPair::ultraslow, out); }

subdiff_status subdiff_pair_switched_ultraslow(subdiff_pair** out) {
    return make_pair(&subdiff::KernelPair::switched_ultraslow, out);
}

void subdiff_pair_free(subdiff_pair* pair) { delete pair; }

subdiff_status subdiff_pair_k(const subdiff_pair* pair, double t, double* out) {
    SUBDIFF_REQUIRE_ARG(pair);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] { *out = subdiff::eval_k(pair->pair, t); });
}

subdiff_status subdiff_pair_l(const subdiff_pair* pair, double t, double* out) {
    SUBDIFF_REQUIRE_ARG(pair);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] { *out = subdiff::eval_l(pair->pair, t); });
}

subdiff_status subdiff_pair_cumulative_l(const subdiff_pair* pair, double t, double* out) {
    SUBDIFF_REQUIRE_ARG(pair);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] { *out = subdiff::eval_cumulative_l(pair->pair, t); });
}

subdiff_status subdiff_relaxation(const subdiff_pair* pair, double t, const double* mu, size_t count, double* out) {
    SUBDIFF_REQUIRE_ARG(pair);
    SUBDIFF_REQUIRE_ARG(mu);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] {
        const std::vector<double> s = subdiff::relaxation_symbol(pair->pair, t, std::span<const double>(mu, count));
        std::copy(s.begin(), s.end(), out);
    });
}

subdiff_status subdiff_mittag_leffler(double alpha, double x, double* out) {
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] {
        subdiff::require(alpha > 0.0 && alpha <= 1.0 && x >= 0.0, subdiff::ErrorCode::domain,
                         "subdiff_mittag_leffler: need 0 < alpha <= 1 and x >= 0");
        *out = subdiff::special::mittag_leffler_neg(alpha, x);
    });
}

subdiff_status subdiff_fit_slope(const double* t, const double* v, size_t count, double t_lo, double t_hi,
                                 double* slope) {
    SUBDIFF_REQUIRE_ARG(t);
    SUBDIFF_REQUIRE_ARG(v);
    SUBDIFF_REQUIRE_ARG(slope);
    return guarded([&] {
        *slope = subdiff::fit_decay_exponent(std::span<const double>(t, count), std::span<const double>(v, count), t_lo,
                                             t_hi)
                     .slope;
    });
}

subdiff_status subdiff_experiment_load(const char* config_path, subdiff_experiment** out) {
    SUBDIFF_REQUIRE_ARG(config_path);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] { *out = new subdiff_experiment{subdiff::Experiment::load(config_path), {}, std::nullopt}; });
}

subdiff_status subdiff_experiment_parse(const char* config_text, subdiff_experiment** out) {
    SUBDIFF_REQUIRE_ARG(config_text);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] { *out = new subdiff_experiment{subdiff::Experiment::parse(config_text), {}, std::nullopt}; });
}

void subdiff_experiment_free(subdiff_experiment* experiment) { delete experiment; }

const char* subdiff_experiment_name(const subdiff_experiment* experiment) {
    return experiment ? experiment->experiment.name().c_str() : "";
}

const char* subdiff_experiment_output(const subdiff_experiment* experiment) {
    return experiment ? experiment->experiment.output().c_str() : "";
}

subdiff_status subdiff_experiment_set_threads(subdiff_experiment* experiment, int threads) {
    SUBDIFF_REQUIRE_ARG(experiment);
    return guarded([&] {
        subdiff::require(threads >= 0, subdiff::ErrorCode::config, "thread count must be nonnegative");
        experiment->options.threads = threads;
    });
}

subdiff_status subdiff_experiment_set_tolerance_scale(subdiff_experiment* experiment, double scale) {
    SUBDIFF_REQUIRE_ARG(experiment);
    return guarded([&] {
        subdiff::require(scale > 0.0 && scale < 1e300, subdiff::ErrorCode::config, "tolerance scale must be positive");
        experiment->options.tolerance_scale = scale;
    });
}

subdiff_status subdiff_experiment_run(subdiff_experiment* experiment, const char* output_dir, size_t* failed_claims) {
    SUBDIFF_REQUIRE_ARG(experiment);
    SUBDIFF_REQUIRE_ARG(output_dir);
    return guarded([&] {
        experiment->result = experiment->experiment.run(experiment->options);
        subdiff::write_artifacts(*experiment->result, output_dir);
        if (failed_claims) *failed_claims = experiment->result->failed_claims();
    });
}

size_t subdiff_experiment_claim_count(const subdiff_experiment* experiment) {
    return experiment && experiment->result ? experiment->result->claims.size() : 0;
}

subdiff_status subdiff_experiment_claim(const subdiff_experiment* experiment, size_t index, subdiff_claim* out) {
    SUBDIFF_REQUIRE_ARG(experiment);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] {
        subdiff::require(experiment->result.has_value(), subdiff::ErrorCode::precondition, "experiment has not run");
        subdiff::require(index < experiment->result->claims.size(), subdiff::ErrorCode::range, "claim index out of range");
        const subdiff::Claim& c = experiment->result->claims[index];
        *out = subdiff_claim{c.name.c_str(), c.target, c.measured, c.tolerance, c.passed ? 1 : 0, c.gating ? 1 : 0};
    });
}

subdiff_status subdiff_report(const char* dir, subdiff_text** out, int* passed) {
    SUBDIFF_REQUIRE_ARG(dir);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] {
        subdiff::RenderedReport r = subdiff::emit_report(dir);
        if (passed) *passed = r.passed ? 1 : 0;
        *out = new subdiff_text{std::move(r.text)};
    });
}

subdiff_status subdiff_presets_list(const char* dir, subdiff_text** out) {
    SUBDIFF_REQUIRE_ARG(dir);
    SUBDIFF_REQUIRE_ARG(out);
    return guarded([&] {
        std::string text;
        for (const subdiff::PresetInfo& p : subdiff::list_presets(dir)) {
            text += p.name + '\t' + p.kind + '\t' + p.description + '\n';
        }
        *out = new subdiff_text{std::move(text)};
    });
}

}  // extern "C"
