#include "subdiff/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#include "subdiff/errors.hpp"
#include "subdiff/interpolation.hpp"
#include "subdiff/quadrature.hpp"
#include "subdiff/special_functions.hpp"
#include "subdiff/volterra.hpp"

namespace subdiff {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Short form for human-readable labels.
std::string label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// g_beta(t) = t^{beta-1} / Gamma(beta), beta > 0, t > 0.
double g(double beta, double t) { return std::exp((beta - 1.0) * std::log(t) - std::lgamma(beta)); }

// int_0^1 g_{m+beta}(t) dbeta by 64-point Gauss-Legendre in beta, evaluated in
// log space so that t << 1 and t >> 1 neither overflow nor underflow.
class DistributedOrder {
public:
    DistributedOrder() {
        const auto& rule = quad::gauss_legendre(kNodes);
        for (int i = 0; i < kNodes; ++i) {
            beta_[i] = 0.5 * (rule.nodes[i] + 1.0);
            weight_[i] = 0.5 * rule.weights[i];
            for (int m = 0; m < 3; ++m) lgam_[m][i] = std::lgamma(m + beta_[i]);
        }
    }
    double operator()(int m, double t) const {
        const double lt = std::log(t);
        double sum = 0.0;
        for (int i = 0; i < kNodes; ++i) sum += weight_[i] * std::exp((m + beta_[i] - 1.0) * lt - lgam_[m][i]);
        return sum;
    }

private:
    static constexpr int kNodes = 64;
    std::array<double, kNodes> beta_{};
    std::array<double, kNodes> weight_{};
    std::array<std::array<double, kNodes>, 3> lgam_{};
};

const DistributedOrder& distributed() {
    static const DistributedOrder instance;
    return instance;
}

// X(t) = e^t E1(t) and its first two primitives.
double x_value(double t) { return special::scaled_exp_integral_e1(t); }

// Coefficients of e^t S(t), S(t) = sum_{n>=1} (-1)^{n+1} t^n / (n n!).
const std::array<double, 40>& exp_s_coefficients() {
    static const std::array<double, 40> c = [] {
        std::array<double, 40> s{};
        std::array<double, 40> out{};
        double fact = 1.0;
        for (int n = 1; n < 40; ++n) {
            fact *= n;
            s[n] = ((n % 2 == 1) ? 1.0 : -1.0) / (n * fact);
        }
        for (int n = 1; n < 40; ++n) {
            double acc = 0.0;
            double inv_fact = 1.0;  // 1/(n-m)!
            for (int m = n; m >= 1; --m) {
                acc += s[m] * inv_fact;
                inv_fact /= (n - m + 1);
            }
            out[n] = acc;
        }
        return out;
    }();
    return c;
}

double x_first(double t) {
    if (t > 1.0) return x_value(t) + std::log(t) + special::euler_gamma;
    // -(e^t - 1)(gamma + ln t) + e^t S(t)
    const auto& c = exp_s_coefficients();
    double series = 0.0;
    double power = 1.0;
    for (int n = 1; n < 40; ++n) {
        power *= t;
        series += c[n] * power;
    }
    return -std::expm1(t) * (special::euler_gamma + std::log(t)) + series;
}

double x_second(double t) {
    if (t > 1.0) return x_first(t) + t * std::log(t) - t + special::euler_gamma * t;
    const auto& c = exp_s_coefficients();
    const double lt = std::log(t);
    double sum = 0.0;
    double power = t;  // t^{m+1}
    double fact = 1.0;
    for (int m = 1; m < 39; ++m) {
        power *= t;
        fact *= m;
        sum -= power / ((m + 1) * fact) * (special::euler_gamma + lt - 1.0 / (m + 1));
        sum += c[m] * power / (m + 1);
    }
    return sum;
}

constexpr double kCacheLo = 1e-14;
constexpr double kCacheHi = 1e13;

struct FractionalData {
    double alpha;
    double k_scale;  // 1/Gamma(1 - alpha), 0 in the heat limit
    double l_scale;  // 1/Gamma(alpha)
};

struct FractionalSumData {
    std::vector<double> alphas;
    std::vector<double> weights;
    std::vector<double> k_scales;  // weights_i / Gamma(1 - alphas_i)
    PiecewiseKernel l;
    std::vector<double> first;   // (1*l) at mesh nodes
    std::vector<double> second;  // (1*1*l) at mesh nodes
};

struct UltraslowData {
    bool switched;
    LogLogSpline dist_cache;  // int_0^1 g_beta
    LogLogSpline x_cache;     // e^t E1(t)
};

struct TabulatedData {
    PiecewiseKernel l;
    std::vector<double> k;
    std::vector<double> k_first, k_second;
    std::vector<double> l_first, l_second;
};

// Primitives of a piecewise-linear function f sampled at nodes.
void piecewise_primitives(const std::vector<double>& x, const std::vector<double>& f, double first0, double second0,
                          std::vector<double>& first, std::vector<double>& second, std::size_t start) {
    first.assign(x.size(), 0.0);
    second.assign(x.size(), 0.0);
    first[start] = first0;
    second[start] = second0;
    for (std::size_t i = start; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        first[i + 1] = first[i] + 0.5 * h * (f[i] + f[i + 1]);
        second[i + 1] = second[i] + h * first[i] + h * h * (f[i] / 3.0 + f[i + 1] / 6.0);
    }
}

// Evaluate f, F1 = int f, F2 = int F1 at t for the piecewise-linear representation.
struct PiecewiseEval {
    double value, first, second;
};

PiecewiseEval eval_piecewise(const std::vector<double>& x, const std::vector<double>& f,
                             const std::vector<double>& first, const std::vector<double>& second, double t,
                             std::size_t start) {
    auto it = std::upper_bound(x.begin() + static_cast<std::ptrdiff_t>(start), x.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    i = i == 0 ? 0 : i - 1;
    if (i + 1 >= x.size()) i = x.size() - 2;
    const double h = x[i + 1] - x[i];
    const double s = t - x[i];
    const double slope = (f[i + 1] - f[i]) / h;
    const double value = f[i] + slope * s;
    const double fi = first[i] + f[i] * s + 0.5 * slope * s * s;
    const double se = second[i] + first[i] * s + 0.5 * f[i] * s * s + slope * s * s * s / 6.0;
    return {value, fi, se};
}

// int_0^{t1} K(t - tau) g_beta(tau) dtau for t >= t1, with K possibly
// singular at 0.  tau = t1 u^{1/beta} absorbs the singularity of g_beta; the
// distance t - tau is formed from the complement 1 - u to keep it accurate
// when t is close to t1.
template <class K>
double singular_start_integral(const K& kernel, double t, double t1, double beta) {
    const double gap = t - t1;
    auto f = [&](double u, double, double one_minus_u) {
        const double dist = gap + t1 * (-std::expm1(std::log1p(-one_minus_u) / beta));
        (void)u;
        return dist > 0.0 ? kernel(dist) : 0.0;
    };
    const double scale = std::exp(beta * std::log(t1) - std::lgamma(beta + 1.0));
    if (gap > t1) {
        // Far from the singularity of K: Gauss-Legendre suffices.
        const quad::GaussRule& rule = quad::gauss_legendre(16);
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double u = 0.5 * (rule.nodes[q] + 1.0);
            sum += 0.5 * rule.weights[q] * kernel(t - t1 * std::pow(u, 1.0 / beta));
        }
        return scale * sum;
    }
    return scale * quad::tanh_sinh(f, 0.0, 1.0);
}

}  // namespace

struct KernelPair::Impl {
    std::variant<FractionalData, FractionalSumData, UltraslowData, TabulatedData> data;
    PairKind kind;
    double horizon = std::numeric_limits<double>::infinity();
    std::vector<double> exponents;
    std::vector<double> weights;
};

namespace {

void check_time(double t, const char* what) {
    require(t > 0.0 && !std::isnan(t), ErrorCode::domain, std::string(what) + ": t must be positive, got " + num(t));
}

void check_horizon(const KernelPair::Impl& impl, double t, const char* what) {
    if (t > impl.horizon)
        fail(ErrorCode::range, std::string(what) + ": t=" + num(t) + " beyond the pair's horizon " + num(impl.horizon));
}

}  // namespace

KernelPair::KernelPair(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

KernelPair KernelPair::fractional(double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, ErrorCode::domain, "Fractional: alpha must lie in (0,1], got " + num(alpha));
    auto impl = std::make_shared<Impl>();
    impl->data = FractionalData{alpha, alpha == 1.0 ? 0.0 : 1.0 / std::tgamma(1.0 - alpha), 1.0 / std::tgamma(alpha)};
    impl->kind = PairKind::fractional;
    impl->exponents = {alpha};
    impl->weights = {1.0};
    return KernelPair(std::move(impl));
}

KernelPair KernelPair::ultraslow() {
    auto impl = std::make_shared<Impl>();
    UltraslowData d{false, LogLogSpline([](double t) { return distributed()(0, t); }, kCacheLo, kCacheHi, 100),
                    LogLogSpline(x_value, kCacheLo, kCacheHi, 100)};
    impl->data = std::move(d);
    impl->kind = PairKind::ultraslow;
    return KernelPair(std::move(impl));
}

KernelPair KernelPair::switched_ultraslow() {
    auto impl = std::make_shared<Impl>();
    UltraslowData d{true, LogLogSpline([](double t) { return distributed()(0, t); }, kCacheLo, kCacheHi, 100),
                    LogLogSpline(x_value, kCacheLo, kCacheHi, 100)};
    impl->data = std::move(d);
    impl->kind = PairKind::switched_ultraslow;
    return KernelPair(std::move(impl));
}

KernelPair KernelPair::fractional_sum(std::vector<double> alphas, std::vector<double> weights,
                                      const DeconvolutionOptions& options) {
    require(!alphas.empty() && alphas.size() == weights.size(), ErrorCode::domain,
            "FractionalSum: need matching, nonempty exponent and weight lists");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        require(alphas[i] > 0.0 && alphas[i] < 1.0, ErrorCode::domain, "FractionalSum: exponents must lie in (0,1)");
        require(weights[i] > 0.0, ErrorCode::domain, "FractionalSum: weights must be positive");
        if (i > 0) require(alphas[i] > alphas[i - 1], ErrorCode::domain, "FractionalSum: exponents must increase");
    }
    require(options.horizon > options.first_node && options.first_node > 0.0 && options.ratio > 1.0, ErrorCode::domain,
            "FractionalSum: invalid deconvolution mesh options");

    FractionalSumData d;
    d.alphas = alphas;
    d.weights = weights;
    for (std::size_t i = 0; i < alphas.size(); ++i) d.k_scales.push_back(weights[i] / std::tgamma(1.0 - alphas[i]));

    // Geometric mesh: uniform relative resolution from t_1 up to the horizon.
    const std::vector<double> mesh = geometric_mesh(options.first_node, options.horizon, options.ratio);

    auto k_value = [&](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < alphas.size(); ++i) s += weights[i] * g(1.0 - alphas[i], t);
        return s;
    };
    volterra::KernelFunctions kf;
    kf.value = k_value;
    kf.first = [&](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < alphas.size(); ++i) s += weights[i] * g(2.0 - alphas[i], t);
        return s;
    };
    kf.second = [&](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < alphas.size(); ++i) s += weights[i] * g(3.0 - alphas[i], t);
        return s;
    };

    // Near 0 the most singular part of k dominates, so l ~ g_{alpha_max} / weight_max.
    const double beta = alphas.back();
    const std::size_t n_mesh = mesh.size();
    std::vector<double> lv(n_mesh, 0.0);
    const double t1 = mesh[1];
    double i01 = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) i01 += weights[i] * g(1.0 - alphas[i] + beta, t1);
    const double amplitude = 1.0 / i01;
    lv[1] = amplitude * g(beta, t1);

    std::vector<double> w(n_mesh, 0.0);
    for (std::size_t n = 2; n < n_mesh; ++n) {
        const double i0 = amplitude * singular_start_integral(k_value, mesh[n], t1, beta);
        volterra::row_weights(kf, mesh, n, w, 1);
        double rhs = 1.0 - i0;
        for (std::size_t j = 1; j < n; ++j) rhs -= w[j] * lv[j];
        if (!(w[n] > 0.0)) fail(ErrorCode::singular_kernel, "FractionalSum: non-positive pivot in the deconvolution");
        lv[n] = rhs / w[n];
    }
    d.l.mesh = mesh;
    d.l.values = lv;
    d.l.singular_amplitude = amplitude;
    d.l.singular_order = beta;
    d.l.singular_start = true;
    piecewise_primitives(mesh, lv, amplitude * g(beta + 1.0, t1), amplitude * g(beta + 2.0, t1), d.first, d.second, 1);

    auto impl = std::make_shared<Impl>();
    impl->horizon = mesh.back();
    impl->exponents = alphas;
    impl->weights = weights;
    impl->data = std::move(d);
    impl->kind = PairKind::fractional_sum;
    return KernelPair(std::move(impl));
}

KernelPair KernelPair::tabulated(std::vector<double> t, std::vector<double> k, std::vector<double> l) {
    require(t.size() >= 2 && t.size() == k.size() && t.size() == l.size(), ErrorCode::domain,
            "Tabulated: t, k and l must have the same length (at least 2)");
    require(t.front() == 0.0, ErrorCode::domain, "Tabulated: the shared grid must start at t = 0");
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        require(t[i + 1] > t[i], ErrorCode::domain, "Tabulated: grid must be strictly increasing");
    for (std::size_t i = 0; i < t.size(); ++i)
        require(std::isfinite(k[i]) && std::isfinite(l[i]), ErrorCode::domain, "Tabulated: samples must be finite");
    TabulatedData d;
    d.l.mesh = t;
    d.l.values = l;
    d.k = k;
    piecewise_primitives(t, k, 0.0, 0.0, d.k_first, d.k_second, 0);
    piecewise_primitives(t, l, 0.0, 0.0, d.l_first, d.l_second, 0);
    auto impl = std::make_shared<Impl>();
    impl->horizon = t.back();
    impl->data = std::move(d);
    impl->kind = PairKind::tabulated;
    return KernelPair(std::move(impl));
}

namespace {

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "t,value", ErrorCode::config, path + ": header must be 't,value'");
    std::vector<double> t, v;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        require(comma != std::string::npos, ErrorCode::config, path + ": line " + std::to_string(row) + " lacks a comma");
        try {
            std::size_t used = 0;
            t.push_back(std::stod(line.substr(0, comma), &used));
            v.push_back(std::stod(line.substr(comma + 1), &used));
        } catch (const std::exception&) {
            fail(ErrorCode::config, path + ": line " + std::to_string(row) + " is not numeric");
        }
        if (t.size() > 1)
            require(t.back() > t[t.size() - 2], ErrorCode::config,
                    path + ": t must be strictly increasing (line " + std::to_string(row) + ")");
    }
    return {t, v};
}

}  // namespace

KernelPair KernelPair::tabulated_from_csv(const std::string& k_path, const std::string& l_path) {
    auto [tk, k] = read_two_column_csv(k_path);
    auto [tl, l] = read_two_column_csv(l_path);
    require(tk == tl, ErrorCode::config, "Tabulated: k and l files must share the same t column");
    return tabulated(std::move(tk), std::move(k), std::move(l));
}

PairKind KernelPair::kind() const { return impl_->kind; }

std::string KernelPair::describe() const {
    switch (impl_->kind) {
        case PairKind::fractional: {
            const double a = std::get<FractionalData>(impl_->data).alpha;
            return a == 1.0 ? "Fractional(alpha=1, heat limit)" : "Fractional(alpha=" + label(a) + ")";
        }
        case PairKind::fractional_sum: {
            std::string s = "FractionalSum(";
            for (std::size_t i = 0; i < impl_->exponents.size(); ++i)
                s += (i ? ", " : "") + label(impl_->exponents[i]) + ":" + label(impl_->weights[i]);
            return s + ")";
        }
        case PairKind::ultraslow: return "Ultraslow";
        case PairKind::switched_ultraslow: return "SwitchedUltraslow";
        case PairKind::tabulated: return "Tabulated";
    }
    return "unknown";
}

bool KernelPair::is_heat_limit() const {
    return impl_->kind == PairKind::fractional && std::get<FractionalData>(impl_->data).alpha == 1.0;
}

bool KernelPair::has_closed_form() const {
    return impl_->kind == PairKind::fractional || impl_->kind == PairKind::ultraslow ||
           impl_->kind == PairKind::switched_ultraslow;
}

std::span<const double> KernelPair::exponents() const { return impl_->exponents; }
std::span<const double> KernelPair::weights() const { return impl_->weights; }
double KernelPair::horizon() const { return impl_->horizon; }

const PiecewiseKernel* KernelPair::piecewise_l() const {
    if (const auto* d = std::get_if<FractionalSumData>(&impl_->data)) return &d->l;
    if (const auto* d = std::get_if<TabulatedData>(&impl_->data)) return &d->l;
    return nullptr;
}

double KernelPair::k(double t) const {
    check_time(t, "eval_k");
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FractionalData>) {
                return d.alpha == 1.0 ? 0.0 : g(1.0 - d.alpha, t);
            } else if constexpr (std::is_same_v<T, FractionalSumData>) {
                double s = 0.0;
                for (std::size_t i = 0; i < d.alphas.size(); ++i) s += d.weights[i] * g(1.0 - d.alphas[i], t);
                return s;
            } else if constexpr (std::is_same_v<T, UltraslowData>) {
                return d.switched ? x_value(t) : distributed()(0, t);
            } else {
                check_horizon(*impl_, t, "eval_k");
                return linear_interpolate(d.l.mesh, d.k, t);
            }
        },
        impl_->data);
}

double KernelPair::l(double t) const {
    check_time(t, "eval_l");
    check_horizon(*impl_, t, "eval_l");
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FractionalData>) {
                return d.alpha == 1.0 ? 1.0 : g(d.alpha, t);
            } else if constexpr (std::is_same_v<T, FractionalSumData>) {
                if (t <= d.l.mesh[1]) return d.l.singular_amplitude * g(d.l.singular_order, t);
                return eval_piecewise(d.l.mesh, d.l.values, d.first, d.second, t, 1).value;
            } else if constexpr (std::is_same_v<T, UltraslowData>) {
                return d.switched ? distributed()(0, t) : x_value(t);
            } else {
                return linear_interpolate(d.l.mesh, d.l.values, t);
            }
        },
        impl_->data);
}

double KernelPair::cumulative_l(double t) const {
    require(t >= 0.0, ErrorCode::domain, "eval_cumulative_l: t must be nonnegative, got " + num(t));
    if (t == 0.0) return 0.0;
    check_horizon(*impl_, t, "eval_cumulative_l");
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FractionalData>) {
                return d.alpha == 1.0 ? t : g(1.0 + d.alpha, t);
            } else if constexpr (std::is_same_v<T, FractionalSumData>) {
                if (t <= d.l.mesh[1]) return d.l.singular_amplitude * g(d.l.singular_order + 1.0, t);
                return eval_piecewise(d.l.mesh, d.l.values, d.first, d.second, t, 1).first;
            } else if constexpr (std::is_same_v<T, UltraslowData>) {
                return d.switched ? distributed()(1, t) : x_first(t);
            } else {
                return eval_piecewise(d.l.mesh, d.l.values, d.l_first, d.l_second, t, 0).first;
            }
        },
        impl_->data);
}

double KernelPair::second_cumulative_l(double t) const {
    require(t >= 0.0, ErrorCode::domain, "second_cumulative_l: t must be nonnegative");
    if (t == 0.0) return 0.0;
    check_horizon(*impl_, t, "second_cumulative_l");
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FractionalData>) {
                return d.alpha == 1.0 ? 0.5 * t * t : g(2.0 + d.alpha, t);
            } else if constexpr (std::is_same_v<T, FractionalSumData>) {
                if (t <= d.l.mesh[1]) return d.l.singular_amplitude * g(d.l.singular_order + 2.0, t);
                return eval_piecewise(d.l.mesh, d.l.values, d.first, d.second, t, 1).second;
            } else if constexpr (std::is_same_v<T, UltraslowData>) {
                return d.switched ? distributed()(2, t) : x_second(t);
            } else {
                return eval_piecewise(d.l.mesh, d.l.values, d.l_first, d.l_second, t, 0).second;
            }
        },
        impl_->data);
}

double KernelPair::cumulative_k(double t) const {
    require(t >= 0.0, ErrorCode::domain, "cumulative_k: t must be nonnegative");
    if (t == 0.0) return is_heat_limit() ? 1.0 : 0.0;
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FractionalData>) {
                return d.alpha == 1.0 ? 1.0 : g(2.0 - d.alpha, t);
            } else if constexpr (std::is_same_v<T, FractionalSumData>) {
                double s = 0.0;
                for (std::size_t i = 0; i < d.alphas.size(); ++i) s += d.weights[i] * g(2.0 - d.alphas[i], t);
                return s;
            } else if constexpr (std::is_same_v<T, UltraslowData>) {
                return d.switched ? x_first(t) : distributed()(1, t);
            } else {
                check_horizon(*impl_, t, "cumulative_k");
                return eval_piecewise(d.l.mesh, d.k, d.k_first, d.k_second, t, 0).first;
            }
        },
        impl_->data);
}

double KernelPair::second_cumulative_k(double t) const {
    require(t >= 0.0, ErrorCode::domain, "second_cumulative_k: t must be nonnegative");
    if (t == 0.0) return 0.0;
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FractionalData>) {
                return d.alpha == 1.0 ? t : g(3.0 - d.alpha, t);
            } else if constexpr (std::is_same_v<T, FractionalSumData>) {
                double s = 0.0;
                for (std::size_t i = 0; i < d.alphas.size(); ++i) s += d.weights[i] * g(3.0 - d.alphas[i], t);
                return s;
            } else if constexpr (std::is_same_v<T, UltraslowData>) {
                return d.switched ? x_second(t) : distributed()(2, t);
            } else {
                check_horizon(*impl_, t, "second_cumulative_k");
                return eval_piecewise(d.l.mesh, d.k, d.k_first, d.k_second, t, 0).second;
            }
        },
        impl_->data);
}

double KernelPair::l_cached(double t) const {
    if (const auto* d = std::get_if<FractionalData>(&impl_->data)) {
        if (t > 0.0) return d->alpha == 1.0 ? 1.0 : d->l_scale * std::pow(t, d->alpha - 1.0);
    }
    if (const auto* d = std::get_if<UltraslowData>(&impl_->data)) {
        const LogLogSpline& cache = d->switched ? d->dist_cache : d->x_cache;
        if (cache.contains(t)) return cache(t);
    }
    return l(t);
}

double KernelPair::k_cached(double t) const {
    if (const auto* d = std::get_if<FractionalData>(&impl_->data)) {
        if (t > 0.0) return d->k_scale * std::pow(t, -d->alpha);
    }
    if (const auto* d = std::get_if<FractionalSumData>(&impl_->data)) {
        double s = 0.0;
        if (t > 0.0) {
            for (std::size_t i = 0; i < d->alphas.size(); ++i) s += d->k_scales[i] * std::pow(t, -d->alphas[i]);
            return s;
        }
    }
    if (const auto* d = std::get_if<UltraslowData>(&impl_->data)) {
        const LogLogSpline& cache = d->switched ? d->x_cache : d->dist_cache;
        if (cache.contains(t)) return cache(t);
    }
    return k(t);
}

const char* pair_kind_name(PairKind kind) noexcept {
    switch (kind) {
        case PairKind::fractional: return "fractional";
        case PairKind::fractional_sum: return "fractional_sum";
        case PairKind::ultraslow: return "ultraslow";
        case PairKind::switched_ultraslow: return "switched_ultraslow";
        case PairKind::tabulated: return "tabulated";
    }
    return "unknown";
}

double eval_k(const KernelPair& pair, double t) { return pair.k(t); }
double eval_l(const KernelPair& pair, double t) { return pair.l(t); }
double eval_cumulative_l(const KernelPair& pair, double t) { return pair.cumulative_l(t); }

// ---------------------------------------------------------------------------
// Certificates

double convolution_k_l(const KernelPair& pair, double t) {
    check_time(t, "convolution_k_l");
    if (pair.is_heat_limit()) return pair.l(t);  // k is the Dirac mass
    if (const PiecewiseKernel* pk = pair.piecewise_l()) {
        // Exact k-moments against the piecewise representation of l.
        volterra::KernelFunctions kf{[&](double s) { return pair.k(s); },
                                     [&](double s) { return pair.cumulative_k(s); },
                                     [&](double s) { return pair.second_cumulative_k(s); }};
        std::vector<double> mesh;
        for (double x : pk->mesh) {
            if (x < t) mesh.push_back(x);
        }
        mesh.push_back(t);
        const std::size_t n = mesh.size() - 1;
        std::vector<double> nodes(mesh.size());
        for (std::size_t i = 0; i < mesh.size(); ++i) nodes[i] = i == 0 ? pk->values[0] : pair.l(mesh[i]);
        double total = 0.0;
        std::size_t first = 0;
        if (pk->singular_start) {
            const double t1 = std::min(pk->mesh[1], t);
            auto kernel = [&](double x) { return pair.k(x); };
            total += pk->singular_amplitude * singular_start_integral(kernel, t, t1, pk->singular_order);
            first = 1;
        }
        if (n > first) {
            std::vector<double> w(mesh.size(), 0.0);
            volterra::row_weights(kf, mesh, n, w, first);
            for (std::size_t j = first; j <= n; ++j) total += w[j] * nodes[j];
        }
        return total;
    }
    // Closed-form pairs.  Split at t/2 and subtract the value at the far end so
    // each half integrand vanishes where its factor is singular:
    //   int_0^{t/2} k(s)[l(t-s) - l(t)] ds + l(t)(1*k)(t/2)
    // + int_0^{t/2} l(s)[k(t-s) - k(t)] ds + k(t)(1*l)(t/2).
    const double half = 0.5 * t;
    const double lt = pair.l(t);
    const double kt = pair.k(t);
    auto fa = [&](double, double s, double) { return pair.k(s) * (pair.l(t - s) - lt); };
    auto fb = [&](double, double s, double) { return pair.l(s) * (pair.k(t - s) - kt); };
    return quad::tanh_sinh(fa, 0.0, half) + lt * pair.cumulative_k(half) + quad::tanh_sinh(fb, 0.0, half) +
           kt * pair.cumulative_l(half);
}

double default_pair_tolerance(const KernelPair& pair) { return pair.has_closed_form() ? 1e-6 : 1e-3; }

PairReport verify_pair(const KernelPair& pair, std::span<const double> grid, double tolerance) {
    PairReport r;
    r.tolerance = tolerance;
    double previous_k = std::numeric_limits<double>::infinity();
    double previous_cum = 0.0;
    for (double t : grid) {
        if (t <= 0.0) continue;
        const double kv = pair.k(t);
        const double lv = pair.l(t);
        if (kv < 0.0) ++r.k_sign_violations;
        if (kv > previous_k * (1.0 + 1e-12)) ++r.k_monotonicity_violations;
        previous_k = kv;
        if (lv < 0.0) ++r.l_sign_violations;
        const double cum = pair.cumulative_l(t);
        if (cum < previous_cum) ++r.cumulative_monotonicity_violations;
        previous_cum = cum;
        const double dev = std::abs(convolution_k_l(pair, t) - 1.0);
        if (!(dev <= r.max_convolution_deviation)) {
            r.max_convolution_deviation = std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev;
            r.worst_t = t;
        }
    }
    r.passed = r.max_convolution_deviation <= tolerance && r.k_monotonicity_violations == 0 &&
               r.k_sign_violations == 0 && r.l_sign_violations == 0 && r.cumulative_monotonicity_violations == 0;
    return r;
}

PairReport verify_pair(const KernelPair& pair, std::span<const double> grid) {
    return verify_pair(pair, grid, default_pair_tolerance(pair));
}

double ultraslow_log_threshold(const KernelPair& pair, double t_max) {
    require(pair.kind() == PairKind::ultraslow, ErrorCode::precondition, "ultraslow_log_threshold: needs the Ultraslow pair");
    const std::vector<double> ts = log_space(1.0 + 1e-9, t_max, 2000);
    double threshold = ts.front();
    for (double t : ts) {
        const double lt = std::log(t);
        const bool ok = 1.0 / (2.0 * pair.k(t)) <= lt && lt <= 2.0 * pair.cumulative_l(t);
        if (!ok) threshold = t * (1.0 + 1e-12);
    }
    return threshold;
}

// ---------------------------------------------------------------------------
// Meshes

std::vector<double> graded_mesh(double horizon, int n, double grading) {
    require(horizon > 0.0 && n >= 1 && grading >= 1.0, ErrorCode::domain, "graded_mesh: invalid arguments");
    std::vector<double> t(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) t[i] = horizon * std::pow(static_cast<double>(i) / n, grading);
    return t;
}

std::vector<double> geometric_mesh(double t_first, double horizon, double ratio) {
    require(t_first > 0.0 && horizon > t_first && ratio > 1.0, ErrorCode::domain, "geometric_mesh: invalid arguments");
    std::vector<double> t{0.0, t_first};
    while (t.back() < horizon) t.push_back(t.back() * ratio);
    return t;
}

std::vector<double> log_space(double lo, double hi, int n) {
    require(lo > 0.0 && hi >= lo && n >= 1, ErrorCode::domain, "log_space: invalid arguments");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace subdiff
