#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "subdiff/kernels.hpp"
#include "subdiff/relaxation.hpp"

namespace subdiff {

// Uniform periodic grid on [-L/2, L/2)^d with N points per axis (N a power of
// two); node m sits at x = (m - N/2) L/N.  Values are stored row-major with
// the last axis fastest.
class GridField {
public:
    GridField(int dimension, double extent, int points);
    GridField(int dimension, double extent, int points, std::vector<double> values);

    [[nodiscard]] int dimension() const { return d_; }
    [[nodiscard]] double extent() const { return extent_; }
    [[nodiscard]] int points() const { return n_; }
    [[nodiscard]] double spacing() const { return extent_ / n_; }
    [[nodiscard]] double cell_volume() const;
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    // Coordinate of grid index m along one axis.
    [[nodiscard]] double coordinate(int m) const { return (m - n_ / 2) * spacing(); }
    // |x|^2 at flat index i.
    [[nodiscard]] double radius_squared(std::size_t i) const;

    // Samples f(x) with x of length d.
    static GridField sample(int dimension, double extent, int points,
                            const std::function<double(std::span<const double>)>& f);

    // "coords...,value" with 17 significant digits.
    void write_csv(std::ostream& out) const;

private:
    int d_;
    double extent_;
    int n_;
    std::vector<double> values_;
};

// Initial data with a known Fourier transform, u~(xi) = int e^{-i x.xi} u(x) dx.
class Datum {
public:
    // Unit-mass isotropic Gaussian of standard deviation sigma centred at `centre`
    // (empty centre: the origin).
    static Datum gaussian(double sigma = 1.0, std::vector<double> centre = {});
    // Gaussian of width sigma1 minus Gaussian of width sigma2: zero mass.
    static Datum gaussian_difference(double sigma1, double sigma2);
    // mass * Gaussian; used as a smooth stand-in for a multiple of a point mass.
    static Datum scaled_gaussian(double mass, double sigma);

    [[nodiscard]] double value(std::span<const double> x) const;
    [[nodiscard]] std::complex<double> spectrum(std::span<const double> xi) const;
    // Radial profile of the spectrum, for centred data only.
    [[nodiscard]] double radial_spectrum(double rho) const;
    [[nodiscard]] bool radial() const { return centre_.empty(); }
    [[nodiscard]] double mass() const;
    [[nodiscard]] double first_moment_norm() const;  // |int x u dx|
    // Length scale beyond which the datum is negligible (1e-16 relative).
    [[nodiscard]] double support_radius() const;

private:
    struct Term {
        double weight;
        double sigma;
    };
    std::vector<Term> terms_;
    std::vector<double> centre_;
};

// Extent and resolution for evolving a datum to time t in dimension d:
// L = 2 kappa sqrt((1*l)(t)) with kappa = 12, at least enough for the datum,
// and N the smallest power of two giving spacing <= max_spacing, capped.
struct GridPolicy {
    double kappa = 12.0;
    double max_spacing = 0.3;
    int max_points_1d = 65536;
    int max_points_2d = 2048;
    int max_points_3d = 256;
};
struct GridSize {
    double extent;
    int points;
    bool capped;  // resolution limited by the point cap
};
GridSize choose_grid(double cumulative_l, const Datum& datum, int dimension, const GridPolicy& policy = {});

// u(t) = Z(t) * u0 through the symbol s(t, |xi|^2).  The datum must vanish
// (below 1e-12 of its maximum) on the outer shell of the grid.
GridField evolve(const SymbolSlice& symbol, const GridField& u0);
// Same, with the analytic spectrum of the datum sampled on the dual grid.
GridField evolve(const SymbolSlice& symbol, const Datum& datum, int dimension, double extent, int points);

// The grid field of s(t, |xi|^2) transformed back: Z(t) on the grid.
GridField symbol_inverse(const SymbolSlice& symbol, int dimension, double extent, int points);
// Same for any radial symbol mu -> m(mu), mu = |xi|^2.
GridField symbol_inverse(const std::function<double(double)>& symbol, int dimension, double extent, int points);

// Components i xi_k u~(xi) transformed back.
std::vector<GridField> gradient_field(const GridField& field);
// Pointwise Euclidean norm of a vector field.
GridField magnitude(std::span<const GridField> components);

double lp_norm(const GridField& field, double p);  // p = inf allowed
double weak_lp_quasinorm(const GridField& field, double r);

// Discrete L2 norm computed on the Fourier side of the grid.
double spectral_l2_norm(const GridField& field);

// Radial Fourier data of a centred datum in any dimension: composite
// Gauss-Legendre on geometric panels in rho.
class RadialSpectrum {
public:
    RadialSpectrum(int dimension, const Datum& datum, int panels_per_decade = 8);
    [[nodiscard]] int dimension() const { return d_; }
    [[nodiscard]] std::span<const double> nodes() const { return nodes_; }
    [[nodiscard]] std::span<const double> weights() const { return weights_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double rho_min() const { return rho_min_; }
    [[nodiscard]] RadialSpectrum refined() const;

private:
    int d_;
    Datum datum_;
    int panels_per_decade_;
    double rho_min_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> values_;
};

// Area of the unit sphere in R^d.
double sphere_area(int dimension);
// Volume of the unit ball in R^d.
double ball_volume(int dimension);

// |u(t)|_2 = [(2 pi)^-d omega_{d-1} int s(t, rho^2)^2 |u0~(rho)|^2 rho^{d-1} drho]^{1/2},
// refining the panels until the value changes by less than 1e-6 relative.
// weight_power adds rho^{2 weight_power} to the integrand (1: gradient norm).
double l2_norm_plancherel_radial(const SymbolSlice& symbol, const RadialSpectrum& spectrum, int weight_power = 0);

// 2 d (1*l)(t).
double msd_analytic(const KernelPair& pair, double t, int dimension);
// int |x|^2 Z dx on the grid.
double msd_empirical(const GridField& z);

}  // namespace subdiff
