#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "subdiff/field.hpp"
#include "subdiff/relaxation.hpp"

namespace subdiff {

struct HankelOptions {
    double tail_tolerance = 1e-8;  // Euler-extrapolated tail relative to the accumulated value
    int panels_per_decade = 8;     // geometric panels before the oscillatory regime
    int gauss_points = 10;
    int max_half_periods = 400000;
};

// int_0^inf f(rho) J_nu(r rho) d rho for nu >= -1/2: geometric panels up to a
// few oscillations, then half-period panels between asymptotic Bessel zeros,
// with the remaining alternating series summed by Euler's transformation once
// rho passes `smooth_from` (where f has settled into its monotone tail).
// `cutoff` > 0 truncates the integral there (for integrands that vanish beyond).
struct HankelResult {
    double value = 0.0;
    double tail_error = 0.0;
};
HankelResult hankel_integral(const std::function<double(double)>& f, double nu, double r, double smooth_from,
                             double cutoff = 0.0, const HankelOptions& options = {});

// Z(t, r_i) on a set of radii for one t in any dimension d.
class RadialProfile {
public:
    RadialProfile(int dimension, double t, std::vector<double> radii, std::vector<double> values,
                  double tail_error = 0.0);

    [[nodiscard]] int dimension() const { return d_; }
    [[nodiscard]] double t() const { return t_; }
    [[nodiscard]] std::span<const double> radii() const { return radii_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double tail_error() const { return tail_error_; }
    [[nodiscard]] double max_value() const;
    [[nodiscard]] double min_value() const;
    // Largest upward step between consecutive radii, relative to max_value().
    [[nodiscard]] double worst_rise() const;

    // Header "r,Z".
    void write_csv(std::ostream& out) const;

private:
    int d_;
    double t_;
    std::vector<double> radii_;
    std::vector<double> values_;
    double tail_error_;
};

// Log-uniform radii from r_lo to r_hi, `per_decade` per decade.
std::vector<double> log_radii(double r_lo, double r_hi, int per_decade);

// Radii suited to Z(t) for the slice: from 1e-4 (1*l)^{1/2} out to where the
// profile is negligible.
std::vector<double> default_radii(const SymbolSlice& slice, int per_decade = 40);

// Z(t, r) = (2 pi)^{-d/2} r^{1-d/2} int s(t, rho^2) rho^{d/2} J_{d/2-1}(r rho) d rho.
// The Yukawa part k/(mu + a^2), a^2 = 1/(1*l), is inverted in closed form
// through K_{d/2-1}; the remainder decays like rho^{-4}.
double z_radial_value(const SymbolSlice& slice, int dimension, double r, const HankelOptions& options = {},
                      double* tail_error = nullptr);
RadialProfile z_radial_hankel(const SymbolSlice& slice, int dimension, std::span<const double> radii,
                              const HankelOptions& options = {});

// dZ/dr (radial derivative; |grad Z| is its modulus).
double z_radial_derivative(const SymbolSlice& slice, int dimension, double r, const HankelOptions& options = {});

// u = Z(t) * u0 for a centred datum, radially: the datum spectrum cuts the
// Hankel integral off.
double u_radial_value(const SymbolSlice& slice, const Datum& datum, int dimension, double r,
                      const HankelOptions& options = {});
RadialProfile u_radial_hankel(const SymbolSlice& slice, const Datum& datum, int dimension,
                              std::span<const double> radii, const HankelOptions& options = {});

// Inverse discrete transform of the symbol on a grid sized for the slice.
// Throws a resolution error when s at the Nyquist wavenumber exceeds
// max_nyquist_symbol.
GridField z_grid_fft(const SymbolSlice& slice, int dimension, double extent, int points,
                     double max_nyquist_symbol = 0.05);

// omega_{d-1} int |f(r)|^p r^{d-1} dr over the profile (Simpson in log r),
// with a p = inf branch returning max |f|.
double radial_lp_norm(const RadialProfile& profile, double p);

// sup_lambda lambda |{|f| > lambda}|^{1/r} with the measure of each level set
// taken from the profile by linear interpolation between radii.
double radial_weak_quasinorm(const RadialProfile& profile, double r);

enum class NormStatus { finite, divergent, indeterminate };
const char* norm_status_name(NormStatus status) noexcept;

struct LpNormResult {
    NormStatus status = NormStatus::indeterminate;
    double value = 0.0;               // total including the extrapolated core (finite only)
    double r_min = 0.0;               // innermost radius reached
    std::vector<double> increments;   // core contributions added by successive r_min halvings
    std::vector<double> totals;       // running integral after each halving
    bool literal_rule_divergent = false;  // every halving raised the total by more than 10%
};

// |Z(t)|_p by radial quadrature down to r_min = 1e-4 (1*l)^{1/2}, followed by
// r_min halvings.  Divergent when the core increments stop shrinking
// (each at least 0.9 of the previous over three halvings); finite when they
// shrink geometrically (ratio below 0.6), the remaining tail then summed.
LpNormResult z_lp_norm(const SymbolSlice& slice, int dimension, double p, const HankelOptions& options = {});

struct WeakNormResult {
    double value = 0.0;
    double worst_rise = 0.0;  // non-monotonicity of the profile, relative to its maximum
};

// |Z(t)|_{d/(d-2), inf} for d >= 3; the profile must be radially
// nonincreasing to within 1e-6 of its maximum.
WeakNormResult z_weak_lp(const SymbolSlice& slice, int dimension, const HankelOptions& options = {});

struct MassReport {
    double mass = 0.0;
    double deviation = 0.0;  // |mass - 1|
    double min_value = 0.0;
    double max_value = 0.0;
    bool passed = false;     // deviation <= 1e-3 and min >= -1e-6 max
};
MassReport mass_check(const RadialProfile& profile);

// omega_{d-1} int r^2 Z r^{d-1} dr.
double msd_from_profile(const RadialProfile& profile);

// Sharp-constant fits for the pointwise bounds on Z and grad Z of the
// fractional pair, split at R = t^{-alpha}|x|^2 = 1.
struct BoundFit {
    std::string name;
    std::size_t samples = 0;
    double constant = 0.0;           // smallest C on the sample
    double sigma = 0.0;              // decay rate in exp(-sigma R^{1/(2-alpha)}); 0 when not applicable
    double refined_constant = 0.0;   // same fit on the refined sample
    double refined_sigma = 0.0;
    bool finite = false;
    bool stable = false;             // constants agree within 10% after refinement
};
struct KochubeiReport {
    double alpha = 0.0;
    int dimension = 0;
    std::vector<BoundFit> fits;
    bool passed = false;
};
// Radii are given through the similarity variable y = |x| t^{-alpha/2}, so R = y^2.
KochubeiReport kochubei_bound_check(double alpha, int dimension, std::span<const double> t_samples,
                                    std::span<const double> similarity_samples, const HankelOptions& options = {});

}  // namespace subdiff
