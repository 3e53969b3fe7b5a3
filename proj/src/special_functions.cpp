#include "subdiff/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"

namespace subdiff::special {

namespace {

constexpr double pi = std::numbers::pi;

std::string num(double x) { return std::to_string(x); }

bool is_integer(double x) { return std::floor(x) == x; }

}  // namespace

double gamma(double x) {
    require(x > 0.0 && std::isfinite(x), ErrorCode::domain, "gamma: argument must be positive, got " + num(x));
    return std::tgamma(x);
}

double log_gamma(double x) {
    require(x > 0.0 && std::isfinite(x), ErrorCode::domain, "log_gamma: argument must be positive, got " + num(x));
    return std::lgamma(x);
}

double reciprocal_gamma(double x) {
    if (x <= 0.0 && is_integer(x)) return 0.0;
    if (x > 0.0) return x < 170.0 ? 1.0 / std::tgamma(x) : std::exp(-std::lgamma(x));
    // Reflection: 1/Gamma(x) = Gamma(1 - x) sin(pi x) / pi.
    const double s = std::sin(pi * x);
    const double y = 1.0 - x;
    if (y < 170.0) return std::tgamma(y) * s / pi;
    return std::copysign(std::exp(std::lgamma(y) + std::log(std::abs(s)) - std::log(pi)), s);
}

// ---------------------------------------------------------------------------
// Mittag-Leffler E_alpha(-x)

namespace {

double ml_series(double alpha, double x, const MittagLefflerParams& p) {
    double sum = 1.0;
    double power = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= p.max_series_terms; ++k) {
        power *= -x;
        const double term = power * reciprocal_gamma(alpha * k + 1.0);
        sum += term;
        const double mag = std::abs(term);
        if (mag < 1e-17 * std::abs(sum) && mag <= previous) return sum;
        previous = mag;
    }
    fail(ErrorCode::internal, "mittag_leffler_neg: series did not converge at x=" + num(x));
}

double ml_integral(double alpha, double x, const MittagLefflerParams& p) {
    // Spectral representation of the completely monotone function x -> E_alpha(-x):
    //   E_alpha(-x) = sin(alpha pi)/(alpha pi) * int_0^inf exp(-w^{1/alpha}) x / (w^2 + 2 x w cos(alpha pi) + x^2) dw
    const double c = std::cos(alpha * pi);
    const double inv_alpha = 1.0 / alpha;
    const double upper = std::pow(45.0, alpha);
    auto f = [=](double w) {
        return std::exp(-std::pow(w, inv_alpha)) * x / (w * w + 2.0 * x * w * c + x * x);
    };
    double breaks[4] = {0.0, 0.0, 0.0, 0.0};
    int nb = 0;
    breaks[nb++] = 0.0;
    const double peak = -x * c;
    if (peak > 0.0 && peak < upper) breaks[nb++] = peak;
    breaks[nb++] = upper;
    const auto r = quad::gauss_kronrod(f, std::span<const double>(breaks, nb), p.quadrature_tolerance, 1e-300, 4000);
    return std::sin(alpha * pi) / (alpha * pi) * r.value;
}

double ml_asymptotic(double alpha, double x, const MittagLefflerParams& p) {
    // E_alpha(-x) ~ sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(1 - alpha k)
    //            = sum_{k>=1} (-1)^{k+1} x^{-k} Gamma(alpha k) sin(pi alpha k) / pi
    // truncated at the smallest envelope term.
    const double lx = std::log(x);
    double sum = 0.0;
    double previous_envelope = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= p.max_asymptotic_terms; ++k) {
        const double log_envelope = -k * lx + std::lgamma(alpha * k) - std::log(pi);
        const double envelope = std::exp(log_envelope);
        if (envelope > previous_envelope) break;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        sum += sign * std::sin(pi * alpha * k) * envelope;
        if (envelope < 1e-18 * std::abs(sum)) break;
        previous_envelope = envelope;
    }
    return sum;
}

void check_ml_args(double alpha, double x) {
    require(alpha > 0.0 && alpha <= 1.0, ErrorCode::domain, "mittag_leffler_neg: alpha must lie in (0,1], got " + num(alpha));
    require(x >= 0.0 && !std::isnan(x), ErrorCode::domain, "mittag_leffler_neg: x must be nonnegative, got " + num(x));
}

}  // namespace

MittagLefflerRegime mittag_leffler_regime(double alpha, double x, const MittagLefflerParams& p) {
    check_ml_args(alpha, x);
    require(p.series_cutoff > 0.0 && p.series_cutoff < p.asymptotic_cutoff, ErrorCode::domain,
            "mittag_leffler_neg: cutoffs must satisfy 0 < series_cutoff < asymptotic_cutoff");
    if (alpha == 1.0 || x == 0.0) return MittagLefflerRegime::closed_form;
    if (x <= p.series_cutoff) return MittagLefflerRegime::series;
    if (x < p.asymptotic_cutoff) return MittagLefflerRegime::integral;
    return MittagLefflerRegime::asymptotic;
}

double mittag_leffler_neg_regime(double alpha, double x, MittagLefflerRegime regime, const MittagLefflerParams& p) {
    check_ml_args(alpha, x);
    switch (regime) {
        case MittagLefflerRegime::closed_form:
            return x == 0.0 ? 1.0 : std::exp(-x);
        case MittagLefflerRegime::series:
            return ml_series(alpha, x, p);
        case MittagLefflerRegime::integral:
            return alpha == 1.0 ? std::exp(-x) : ml_integral(alpha, x, p);
        case MittagLefflerRegime::asymptotic:
            if (std::isinf(x)) return 0.0;
            return alpha == 1.0 ? std::exp(-x) : ml_asymptotic(alpha, x, p);
    }
    fail(ErrorCode::internal, "mittag_leffler_neg: unknown regime");
}

double mittag_leffler_neg(double alpha, double x, const MittagLefflerParams& p) {
    return mittag_leffler_neg_regime(alpha, x, mittag_leffler_regime(alpha, x, p), p);
}

double mittag_leffler_neg(double alpha, double x) {
    static const MittagLefflerParams defaults{};
    return mittag_leffler_neg(alpha, x, defaults);
}

// ---------------------------------------------------------------------------
// Exponential integral

namespace {

// E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!), used for x <= 1.
double e1_series(double x) {
    double sum = 0.0;
    double fact = 1.0;
    double power = 1.0;
    for (int n = 1; n < 60; ++n) {
        fact *= n;
        power *= -x;
        const double term = power / (n * fact);
        sum += term;
        if (std::abs(term) < 1e-18) break;
    }
    return -euler_gamma - std::log(x) - sum;
}

// e^x E1(x) by the modified Lentz continued fraction, used for x > 1.
double scaled_e1_fraction(double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    fail(ErrorCode::internal, "exp_integral_e1: continued fraction did not converge at x=" + num(x));
}

void check_e1_arg(double x) {
    require(x > 0.0 && !std::isnan(x), ErrorCode::domain, "exp_integral_e1: argument must be positive, got " + num(x));
}

}  // namespace

double scaled_exp_integral_e1(double x) {
    check_e1_arg(x);
    if (std::isinf(x)) return 0.0;
    return x <= 1.0 ? std::exp(x) * e1_series(x) : scaled_e1_fraction(x);
}

double exp_integral_e1(double x) {
    check_e1_arg(x);
    if (std::isinf(x)) return 0.0;
    return x <= 1.0 ? e1_series(x) : scaled_e1_fraction(x) * std::exp(-x);
}

// ---------------------------------------------------------------------------
// Bessel functions

namespace {

double bessel_series(double nu, double x) {
    const double half = 0.5 * x;
    double term = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
    double sum = term;
    const double q = -half * half;
    for (int m = 1; m < 500; ++m) {
        term *= q / (m * (m + nu));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

double bessel_j(double nu, double x) {
    require(nu >= 0.0 && x >= 0.0, ErrorCode::domain, "bessel_j: need nu >= 0 and x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (is_integer(nu) && nu < 1000.0) return ::jn(static_cast<int>(nu), x);
    if (is_integer(nu - 0.5)) {
        if (x <= nu + 1.0) return bessel_series(nu, x);
        // Closed forms for orders -1/2 and 1/2, then upward recurrence (stable for x > nu).
        const double scale = std::sqrt(2.0 / (pi * x));
        double jm = scale * std::cos(x);
        double j = scale * std::sin(x);
        for (double order = 0.5; order < nu; order += 1.0) {
            const double next = (2.0 * order / x) * j - jm;
            jm = j;
            j = next;
        }
        return j;
    }
    return std::cyl_bessel_j(nu, x);
}

}  // namespace subdiff::special
