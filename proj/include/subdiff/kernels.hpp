#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace subdiff {

enum class PairKind { fractional, fractional_sum, ultraslow, switched_ultraslow, tabulated };

const char* pair_kind_name(PairKind kind) noexcept;

// Mesh used to deconvolve k*l = 1 when l has no closed form.
struct DeconvolutionOptions {
    double horizon = 1e9;      // largest t at which l is needed
    double first_node = 1e-10;  // t_1; geometric mesh t_{i+1} = ratio * t_i beyond
    double ratio = 1.02;
};

// Piecewise representation of l used by product integration: on [0, t_1] the
// kernel is amplitude * g_beta(t); on later mesh intervals it is linear
// between the node values.
struct PiecewiseKernel {
    std::vector<double> mesh;    // mesh[0] == 0
    std::vector<double> values;  // node values; values[0] unused when singular
    double singular_amplitude = 0.0;
    double singular_order = 1.0;  // beta of the first-interval ansatz
    bool singular_start = false;
};

// A kernel pair (k, l) of type PC: k nonnegative and nonincreasing, l
// nonnegative, k*l = 1.  Immutable and cheap to copy; copies share state.
class KernelPair {
public:
    // alpha in (0, 1]; alpha == 1 denotes the heat limit k = delta, l = 1.
    static KernelPair fractional(double alpha);
    // k = sum_j weights_j g_{1 - alphas_j}; exponents strictly increasing in (0, 1).
    static KernelPair fractional_sum(std::vector<double> alphas, std::vector<double> weights,
                                     const DeconvolutionOptions& options = {});
    // k = int_0^1 g_beta dbeta, l = e^t E1(t).
    static KernelPair ultraslow();
    // The roles of k and l in the ultraslow pair exchanged.
    static KernelPair switched_ultraslow();
    // Samples of k and l on a shared strictly increasing grid starting at 0.
    static KernelPair tabulated(std::vector<double> t, std::vector<double> k, std::vector<double> l);
    // Two CSV files with header "t,value" and identical t columns.
    static KernelPair tabulated_from_csv(const std::string& k_path, const std::string& l_path);

    [[nodiscard]] PairKind kind() const;
    [[nodiscard]] std::string describe() const;
    [[nodiscard]] bool is_heat_limit() const;
    [[nodiscard]] bool has_closed_form() const;
    // Fractional: {alpha}; FractionalSum: the exponents.
    [[nodiscard]] std::span<const double> exponents() const;
    [[nodiscard]] std::span<const double> weights() const;

    [[nodiscard]] double k(double t) const;
    [[nodiscard]] double l(double t) const;
    [[nodiscard]] double cumulative_l(double t) const;         // (1*l)(t)
    [[nodiscard]] double second_cumulative_l(double t) const;  // (1*1*l)(t)
    [[nodiscard]] double cumulative_k(double t) const;         // (1*k)(t)
    [[nodiscard]] double second_cumulative_k(double t) const;  // (1*1*k)(t)

    // Spline-cached evaluators for inner loops (relative error below 1e-8 for
    // the distributed-order kernels, identical to k()/l() otherwise).
    [[nodiscard]] double l_cached(double t) const;
    [[nodiscard]] double k_cached(double t) const;

    // Present for FractionalSum (deconvolved l) and Tabulated pairs.
    [[nodiscard]] const PiecewiseKernel* piecewise_l() const;
    // Largest t at which l and its integrals are defined.
    [[nodiscard]] double horizon() const;

    struct Impl;

private:
    explicit KernelPair(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

double eval_k(const KernelPair& pair, double t);
double eval_l(const KernelPair& pair, double t);
double eval_cumulative_l(const KernelPair& pair, double t);

struct PairReport {
    double max_convolution_deviation = 0.0;  // max_i |(k*l)(t_i) - 1|
    double worst_t = 0.0;
    int k_monotonicity_violations = 0;
    int k_sign_violations = 0;
    int l_sign_violations = 0;
    int cumulative_monotonicity_violations = 0;
    double tolerance = 0.0;
    bool passed = false;
};

// 1e-6 for pairs with closed forms, 1e-3 otherwise.
double default_pair_tolerance(const KernelPair& pair);

// Numerical certificate of k*l = 1 and the sign/monotonicity requirements on a grid.
PairReport verify_pair(const KernelPair& pair, std::span<const double> grid, double tolerance);
PairReport verify_pair(const KernelPair& pair, std::span<const double> grid);

// (k*l)(t) computed by quadrature against the pair's own representation of l.
double convolution_k_l(const KernelPair& pair, double t);

// Ultraslow pair: smallest T on the scanned log grid such that
// 1/(2k(t)) <= log t <= 2(1*l)(t) holds for every scanned t in [T, t_max].
double ultraslow_log_threshold(const KernelPair& pair, double t_max);

// Graded mesh t_i = T (i/n)^grading, i = 0..n.
std::vector<double> graded_mesh(double horizon, int n, double grading = 2.0);
// 0, then t_first * ratio^i up to (and including a point >=) horizon.
std::vector<double> geometric_mesh(double t_first, double horizon, double ratio);
// n log-spaced points in [lo, hi] inclusive.
std::vector<double> log_space(double lo, double hi, int n);

}  // namespace subdiff
