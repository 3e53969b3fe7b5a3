#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subdiff/field.hpp"
#include "subdiff/fundsol.hpp"
#include "subdiff/kernels.hpp"
#include "subdiff/relaxation.hpp"

namespace subdiff {

struct DecayFit {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double max_relative_residual = 0.0;  // max |v/fit - 1| over the window
    std::size_t points = 0;
};

// Least-squares line through (log t, log v) for t in [t_lo, t_hi]; needs at
// least five positive values in the window.
DecayFit fit_decay_exponent(std::span<const double> t, std::span<const double> v, double t_lo, double t_hi);

// 2r/(r-1): the dimension at which the L_r decay rate of u saturates.
double critical_dimension(double r);
// r/(r-1): the same threshold for the gradient.
double gradient_critical_dimension(double r);

// Where a norm is computed.
//   grid:   FFT grid in d <= 3;
//   radial: radial Plancherel (r = 2 only, any d);
//   hankel: radial profile of u = Z * u0 from Hankel inversion (any r, any d).
enum class NormPath { grid, radial, hankel };
const char* norm_path_name(NormPath path) noexcept;
std::optional<NormPath> parse_norm_path(const std::string& name);

enum class NormKind { lebesgue, weak, gradient };
const char* norm_kind_name(NormKind kind) noexcept;

struct SweepSpec {
    int dimension = 1;
    double r = 2.0;
    NormKind kind = NormKind::lebesgue;
    NormPath path = NormPath::grid;
    std::vector<double> times;
    GridPolicy grid;
    int threads = 0;  // 0: default_threads()
};

// t -> |u(t)|_r (or |u|_{r,inf}, or |grad u|_r) for one datum.
std::vector<double> norm_series(const RelaxationModel& model, const Datum& datum, const SweepSpec& spec);

// Slope the decay theory predicts for the sweep, in units of `rate`, the
// log-log slope of the relevant time scale ((1*l)(t) or an upgraded psi):
//   |u|_r:        -(d/2)(1 - 1/r) below d_crit, -1 above;
//   |u|_{r,inf}:  -1 at d_crit;
//   |grad u|_r:   -min(1/2 + (d/2)(1 - 1/r), 1).
double decay_target_factor(int dimension, double r, NormKind kind);

struct SweepResult {
    std::vector<double> times;
    std::vector<double> values;
    DecayFit fit;            // on the requested window
    DecayFit tail_fit;       // on the last decade of the window
    double rate = 0.0;       // log-log slope of the time scale over the window
    double target = 0.0;
    double tolerance = 0.0;
    bool power_law = true;   // fit and tail fit within 0.05
    bool passed = false;
};

// Runs norm_series and compares the fitted slope with target = factor * rate.
// `psi` replaces (1*l) as the time scale when given.  The window defaults to
// the last two decades of the sweep.
SweepResult decay_sweep(const RelaxationModel& model, const Datum& datum, const SweepSpec& spec, double tolerance,
                        std::optional<std::pair<double, double>> window = std::nullopt,
                        const std::function<double(double)>& psi = {});

struct LowerBoundReport {
    std::vector<double> times;
    std::vector<double> ratios;     // |u(t)|_2 / k(t)^{min(1, d/4)}
    double infimum = 0.0;           // over the whole window
    double head_infimum = 0.0;      // over the first two thirds of the decades
    bool hypothesis_met = true;     // datum spectrum nonzero at the origin
    bool stable = false;            // infimum/head_infimum >= 0.5
    bool passed = false;
};

// |u(t)|_2 / k(t)^{min(1, d/4)} through the radial Plancherel path.  A datum
// with vanishing mean violates the hypothesis; the report says so instead of
// failing.
LowerBoundReport lower_bound_ratio(const RelaxationModel& model, const Datum& datum, int dimension,
                                   std::span<const double> times);

struct BandReport {
    std::vector<double> times;
    std::vector<double> values;  // series times weight(t)
    double lower = 0.0;
    double upper = 0.0;
    double ratio = 0.0;  // upper / lower
};
BandReport band(std::span<const double> times, std::span<const double> series,
                const std::function<double(double)>& weight);

struct ProfileReport {
    double mass = 0.0;
    double first_moment = 0.0;
    std::vector<double> times;
    std::vector<double> values;  // t^{(alpha d/2)(1-1/p)} |u(t) - M Z(t)|_p
    DecayFit fit;
    bool decreasing = false;
    bool passed = false;         // decreasing and slope <= -alpha/2 + 0.07
};

// Large-time profile for the fractional pair in d = 1: u(t) approaches
// M Z(t); p must be below d/(d-1).
ProfileReport large_time_profile(double alpha, int dimension, double p, const Datum& datum,
                                 std::span<const double> times, const GridPolicy& policy = {});

}  // namespace subdiff
