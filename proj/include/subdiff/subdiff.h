/* C interface to the subdiff toolkit.
 *
 * Every function returns a subdiff_status.  On failure the message of the most
 * recent error on the calling thread is available from subdiff_last_error().
 * Objects are opaque handles released with the matching *_free function;
 * passing NULL to a free function is allowed. */
#ifndef SUBDIFF_SUBDIFF_H
#define SUBDIFF_SUBDIFF_H

#include <stddef.h>

#if defined(_WIN32)
#define SUBDIFF_API __declspec(dllexport)
#else
#define SUBDIFF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum subdiff_status {
    SUBDIFF_OK = 0,
    SUBDIFF_E_DOMAIN = 1,
    SUBDIFF_E_RANGE = 2,
    SUBDIFF_E_SINGULAR_KERNEL = 3,
    SUBDIFF_E_RESOLUTION = 4,
    SUBDIFF_E_TRUNCATION = 5,
    SUBDIFF_E_PRECONDITION = 6,
    SUBDIFF_E_CONFIG = 7,
    SUBDIFF_E_IO = 8,
    SUBDIFF_E_INTERNAL = 9,
    SUBDIFF_E_NULL_ARGUMENT = 10
} subdiff_status;

#define SUBDIFF_ABI_VERSION 1

SUBDIFF_API int subdiff_abi_version(void);
SUBDIFF_API const char* subdiff_status_name(subdiff_status status);
/* Message of the last failure on this thread; empty after a success. */
SUBDIFF_API const char* subdiff_last_error(void);

/* ---- text buffers ---------------------------------------------------- */

typedef struct subdiff_text subdiff_text;
SUBDIFF_API const char* subdiff_text_data(const subdiff_text* text);
SUBDIFF_API void subdiff_text_free(subdiff_text* text);

/* ---- kernel pairs ---------------------------------------------------- */

typedef struct subdiff_pair subdiff_pair;

SUBDIFF_API subdiff_status subdiff_pair_fractional(double alpha, subdiff_pair** out);
SUBDIFF_API subdiff_status subdiff_pair_fractional_sum(const double* alphas, const double* weights, size_t count,
                                                       subdiff_pair** out);
SUBDIFF_API subdiff_status subdiff_pair_ultraslow(subdiff_pair** out);
SUBDIFF_API subdiff_status subdiff_pair_switched_ultraslow(subdiff_pair** out);
SUBDIFF_API void subdiff_pair_free(subdiff_pair* pair);

SUBDIFF_API subdiff_status subdiff_pair_k(const subdiff_pair* pair, double t, double* out);
SUBDIFF_API subdiff_status subdiff_pair_l(const subdiff_pair* pair, double t, double* out);
SUBDIFF_API subdiff_status subdiff_pair_cumulative_l(const subdiff_pair* pair, double t, double* out);

/* s(t, mu_j) for count values of mu. */
SUBDIFF_API subdiff_status subdiff_relaxation(const subdiff_pair* pair, double t, const double* mu, size_t count,
                                              double* out);

/* ---- special functions and fits ------------------------------------- */

/* E_alpha(-x), 0 < alpha <= 1, x >= 0. */
SUBDIFF_API subdiff_status subdiff_mittag_leffler(double alpha, double x, double* out);

/* Least-squares slope of log v against log t over [t_lo, t_hi]. */
SUBDIFF_API subdiff_status subdiff_fit_slope(const double* t, const double* v, size_t count, double t_lo, double t_hi,
                                             double* slope);

/* ---- experiments ----------------------------------------------------- */

typedef struct subdiff_experiment subdiff_experiment;

typedef struct subdiff_claim {
    const char* name; /* valid while the experiment handle lives */
    double target;
    double measured; /* NaN when only recorded in timing.json */
    double tolerance;
    int passed;
    int gating;
} subdiff_claim;

SUBDIFF_API subdiff_status subdiff_experiment_load(const char* config_path, subdiff_experiment** out);
SUBDIFF_API subdiff_status subdiff_experiment_parse(const char* config_text, subdiff_experiment** out);
SUBDIFF_API void subdiff_experiment_free(subdiff_experiment* experiment);

SUBDIFF_API const char* subdiff_experiment_name(const subdiff_experiment* experiment);
/* Output directory named in the config, or "" when it names none. */
SUBDIFF_API const char* subdiff_experiment_output(const subdiff_experiment* experiment);

SUBDIFF_API subdiff_status subdiff_experiment_set_threads(subdiff_experiment* experiment, int threads);
SUBDIFF_API subdiff_status subdiff_experiment_set_tolerance_scale(subdiff_experiment* experiment, double scale);

/* Runs every check and writes the artifacts to output_dir (created when
 * missing).  *failed_claims receives the number of failed gating claims. */
SUBDIFF_API subdiff_status subdiff_experiment_run(subdiff_experiment* experiment, const char* output_dir,
                                                  size_t* failed_claims);
SUBDIFF_API size_t subdiff_experiment_claim_count(const subdiff_experiment* experiment);
SUBDIFF_API subdiff_status subdiff_experiment_claim(const subdiff_experiment* experiment, size_t index,
                                                    subdiff_claim* out);

/* Human-readable summary of the artifacts in dir; *passed is 1 when every
 * gating claim passed. */
SUBDIFF_API subdiff_status subdiff_report(const char* dir, subdiff_text** out, int* passed);

/* One line per preset in dir: name, kind and description separated by tabs. */
SUBDIFF_API subdiff_status subdiff_presets_list(const char* dir, subdiff_text** out);

#ifdef __cplusplus
}
#endif

#endif /* SUBDIFF_SUBDIFF_H */
