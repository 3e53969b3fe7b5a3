#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "subdiff/kernels.hpp"

namespace subdiff {

// Which rewriting of s + mu (l*s) = 1 the product-integration solver marches.
//   l_form:  s + mu (l*s) = 1
//   k_form:  k*(s - 1) + mu (1*s) = 0   (needs no l; kept for cross-validation)
enum class VolterraForm { l_form, k_form };

const char* volterra_form_name(VolterraForm form) noexcept;

// The form the table solver uses for a pair unless told otherwise.
VolterraForm default_form(const KernelPair& pair);

// Discrete solution of s + mu (l*s) = 1 on grid (grid[0] == 0) by product
// integration with piecewise-linear s and exact kernel moments on the
// interval touching the singularity.
std::vector<double> solve_relaxation(const KernelPair& pair, double mu, std::span<const double> grid);
std::vector<double> solve_relaxation(const KernelPair& pair, double mu, std::span<const double> grid,
                                     VolterraForm form);

struct RelaxationOptions {
    double first_node = 1e-10;  // first positive node of the geometric time mesh
    double ratio = 1.02;        // geometric ratio of the time mesh
    int mu_per_decade = 20;
    double mu_min = 0.0;  // 0: chosen from (1*l) at the largest requested time
    double mu_max = 0.0;  // 0: chosen from (1*l) at the smallest requested time
    int threads = 0;      // 0: default_threads()
};

// s(t_i, mu_j) on a time mesh x log-uniform symbol grid.
class RelaxationTable {
public:
    // Geometric mesh covering `times` (each inserted as a node) and an
    // automatic symbol range wide enough for Fourier work at those times.
    static RelaxationTable build(const KernelPair& pair, std::span<const double> times,
                                 const RelaxationOptions& options = {});
    // Explicit grids; mu_grid must be log-uniform when slices are wanted.
    static RelaxationTable solve(const KernelPair& pair, std::vector<double> time_grid, std::vector<double> mu_grid,
                                 VolterraForm form, int threads = 0);

    [[nodiscard]] const KernelPair& pair() const { return pair_; }
    [[nodiscard]] std::span<const double> time_grid() const { return time_grid_; }
    [[nodiscard]] std::span<const double> mu_grid() const { return mu_grid_; }
    [[nodiscard]] VolterraForm form() const { return form_; }
    [[nodiscard]] std::string scheme() const;
    // Row-major in time: value(i, j) = s(t_i, mu_j).
    [[nodiscard]] double value(std::size_t i, std::size_t j) const { return values_[i * mu_grid_.size() + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * mu_grid_.size(), mu_grid_.size()};
    }

    // Header "t,mu,s", 17 significant digits.
    void write_csv(std::ostream& out) const;

private:
    KernelPair pair_;
    VolterraForm form_ = VolterraForm::l_form;
    std::vector<double> time_grid_;
    std::vector<double> mu_grid_;
    std::vector<double> values_;

    explicit RelaxationTable(KernelPair pair) : pair_(std::move(pair)) {}
};

// mu -> s(t, mu) at one fixed t.  Cheap to copy, safe to share between threads.
class SymbolSlice {
public:
    [[nodiscard]] double operator()(double mu) const;
    [[nodiscard]] double t() const { return t_; }
    // (1*l)(t) and k(t); s ~ k(t)/mu as mu grows.
    [[nodiscard]] double cumulative_l() const { return cumulative_l_; }
    [[nodiscard]] double k() const { return k_; }

    struct Impl;

private:
    friend class RelaxationModel;
    std::shared_ptr<const Impl> impl_;
    double t_ = 0.0;
    double cumulative_l_ = 0.0;
    double k_ = 0.0;
};

// The relaxation function of a pair as needed by the Fourier-side modules:
// Mittag-Leffler evaluation for Fractional pairs, a solved table otherwise.
class RelaxationModel {
public:
    // `times` are the instants at which slices will be requested; closed-form
    // pairs ignore them.
    RelaxationModel(const KernelPair& pair, std::span<const double> times, const RelaxationOptions& options = {});

    [[nodiscard]] SymbolSlice at(double t) const;
    [[nodiscard]] const KernelPair& pair() const { return pair_; }
    [[nodiscard]] const RelaxationTable* table() const { return table_ ? &*table_ : nullptr; }

private:
    KernelPair pair_;
    std::optional<RelaxationTable> table_;
};

// s(t, mu_j) for every mu_j; Fractional pairs go through the Mittag-Leffler
// function, others through a table solved up to t.
std::vector<double> relaxation_symbol(const KernelPair& pair, double t, std::span<const double> mu_grid);

// E_alpha(-x) through a log-log spline on the costly middle range.
double mittag_leffler_cached(double alpha, double x);

// ---------------------------------------------------------------------------
// Certificates

struct BoundsReport {
    std::size_t points = 0;
    std::size_t violations = 0;
    double worst_relative_violation = 0.0;  // positive when a bound is broken
    double worst_t = 0.0;
    double worst_mu = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

// 1/(1 + mu/k(t)) <= s(t, mu) <= 1/(1 + mu psi(t)) on the table rows with
// t >= t_lo, with psi = (1*l) unless given.  Violations are counted relative
// to the bound.
BoundsReport verify_smu_bounds(const RelaxationTable& table, double tolerance = 1e-3,
                               const std::function<double(double)>& psi = {}, double t_lo = 0.0);

// Same sandwich for any s evaluator (used for the closed-form path).
BoundsReport verify_smu_bounds(const KernelPair& pair, const std::function<double(double, double)>& s,
                               std::span<const double> times, std::span<const double> mus, double tolerance = 1e-3,
                               const std::function<double(double)>& psi = {});

struct MonotonicityReport {
    int max_order = 0;
    int violations = 0;
    std::vector<double> worst_by_order;  // most wrong-signed scaled difference per order
    bool passed = false;
};

// Divided differences of mu -> s(t, mu) on mu_grid have sign (-1)^j for j <= max_order.
MonotonicityReport complete_monotonicity_check(const std::function<double(double)>& s, std::span<const double> mu_grid,
                                               int max_order, double tolerance = 1e-10);

struct DerivativeBoundReport {
    int order = 0;
    double derivative = 0.0;     // finite-difference estimate of d^j s / dmu^j
    double error_estimate = 0.0;  // Richardson error proxy
    double lhs = 0.0;             // mu^j |s^(j)(mu)|
    double rhs = 0.0;             // 2^j j! s(mu/2)
    bool passed = false;
};

// mu^j |d^j s/dmu^j| <= 2^j j! s(t, mu/2), derivative by central differences
// in mu with Richardson extrapolation; the error estimate is added to the lhs.
DerivativeBoundReport taylor_derivative_bound_check(const std::function<double(double)>& s, double mu, int order);

// Derivative of order n of f at x by central differences with step h and one
// Richardson extrapolation step; returns {value, error estimate}.
std::pair<double, double> central_derivative(const std::function<double(double)>& f, double x, int order, double h);

struct MultiplierReport {
    std::vector<double> times;
    std::vector<double> sup_values;  // sup_mu mu^n |psi_kappa^(n)(mu)| (1*l)(t)^kappa per t
    double spread = 0.0;             // max/min - 1 across times
    bool finite = false;
};

// psi_kappa(mu) = mu^kappa s(t, mu); the scaled sup should not depend on t.
MultiplierReport multiplier_bound_check(const RelaxationModel& model, std::span<const double> times, double kappa,
                                        int order, std::span<const double> mu_grid);

// Smallest C with s(t, mu) <= C/(1 + mu t) on the table rows with t >= t_lo.
double switched_upgrade_constant(const RelaxationTable& table, double t_lo);

}  // namespace subdiff
