#pragma once

namespace subdiff::special {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Gamma function for x > 0.
double gamma(double x);
double log_gamma(double x);
// 1/Gamma(x) for every real x; zero at the poles.
double reciprocal_gamma(double x);

// Regime boundaries and term caps for E_alpha(-x).
struct MittagLefflerParams {
    double series_cutoff = 1.0;
    double asymptotic_cutoff = 50.0;
    int max_series_terms = 4000;
    int max_asymptotic_terms = 400;
    double quadrature_tolerance = 1e-14;
};

// E_alpha(-x) for 0 < alpha <= 1 and x >= 0.
double mittag_leffler_neg(double alpha, double x);
double mittag_leffler_neg(double alpha, double x, const MittagLefflerParams& params);

// Which regime mittag_leffler_neg uses for a given x (exposed for stitching tests).
enum class MittagLefflerRegime { closed_form, series, integral, asymptotic };
MittagLefflerRegime mittag_leffler_regime(double alpha, double x, const MittagLefflerParams& params = {});
// Force a regime regardless of x; used to compare regimes across a cutoff.
double mittag_leffler_neg_regime(double alpha, double x, MittagLefflerRegime regime,
                                 const MittagLefflerParams& params = {});

// Exponential integral E1(x), x > 0, and the scaled form e^x E1(x) which stays
// finite for large x.
double exp_integral_e1(double x);
double scaled_exp_integral_e1(double x);

// Bessel function of the first kind J_nu(x), nu >= 0 and x >= 0.
double bessel_j(double nu, double x);

}  // namespace subdiff::special
