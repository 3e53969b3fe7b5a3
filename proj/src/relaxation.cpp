#include "subdiff/relaxation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>

#include "subdiff/errors.hpp"
#include "subdiff/interpolation.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/special_functions.hpp"
#include "subdiff/volterra.hpp"

namespace subdiff {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int resolve_threads(int threads) { return threads > 0 ? threads : default_threads(); }

// Product-integration weights of every row, packed lower triangular:
// row n occupies [n(n+1)/2, n(n+1)/2 + n].
class WeightMatrix {
public:
    WeightMatrix(const KernelPair& pair, std::span<const double> mesh, VolterraForm form, int threads) {
        const std::size_t n_mesh = mesh.size();
        w_.assign(n_mesh * (n_mesh + 1) / 2, 0.0);
        volterra::KernelFunctions kf;
        if (form == VolterraForm::l_form) {
            kf = {[&pair](double t) { return pair.l_cached(t); }, [&pair](double t) { return pair.cumulative_l(t); },
                  [&pair](double t) { return pair.second_cumulative_l(t); }};
        } else {
            kf = {[&pair](double t) { return pair.k_cached(t); }, [&pair](double t) { return pair.cumulative_k(t); },
                  [&pair](double t) { return pair.second_cumulative_k(t); }};
        }
        parallel_for(n_mesh - 1, threads, [&](std::size_t i) {
            const std::size_t n = i + 1;
            std::span<double> row(w_.data() + offset(n), n + 1);
            volterra::row_weights(kf, mesh, n, row, 0);
        });
    }
    [[nodiscard]] std::span<const double> row(std::size_t n) const { return {w_.data() + offset(n), n + 1}; }

private:
    static std::size_t offset(std::size_t n) { return n * (n + 1) / 2; }
    std::vector<double> w_;
};

void march(const WeightMatrix& w, std::span<const double> mesh, double mu, VolterraForm form, std::span<double> s) {
    s[0] = 1.0;
    if (mu == 0.0) {
        std::fill(s.begin(), s.end(), 1.0);
        return;
    }
    if (form == VolterraForm::l_form) {
        for (std::size_t n = 1; n < mesh.size(); ++n) {
            const std::span<const double> row = w.row(n);
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * s[j];
            const double pivot = 1.0 + mu * row[n];
            require(pivot > 0.0, ErrorCode::internal, "relaxation: non-positive pivot (negative l moment)");
            s[n] = (1.0 - mu * acc) / pivot;
        }
        return;
    }
    // k*(s - 1) + mu (1*s) = 0 with v = s - 1 and trapezoidal 1*s.
    double integral = 0.0;  // (1*s)(t_{n-1})
    for (std::size_t n = 1; n < mesh.size(); ++n) {
        const std::span<const double> row = w.row(n);
        const double h = mesh[n] - mesh[n - 1];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * (s[j] - 1.0);
        const double pivot = row[n] + 0.5 * mu * h;
        require(pivot > 0.0, ErrorCode::internal, "relaxation: non-positive pivot in the k-form march");
        const double v = -(acc + mu * (integral + 0.5 * h * (s[n - 1] + 1.0))) / pivot;
        s[n] = 1.0 + v;
        integral += 0.5 * h * (s[n - 1] + s[n]);
    }
}

void check_grid(std::span<const double> grid) {
    require(grid.size() >= 2 && grid.front() == 0.0, ErrorCode::domain, "relaxation: grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        require(grid[i] > grid[i - 1], ErrorCode::domain, "relaxation: grid must be strictly increasing");
}

// Shared Mittag-Leffler splines, one per alpha, over the range where direct
// evaluation needs quadrature.
constexpr double kMlSplineLo = 1e-8;
constexpr double kMlSplineHi = 1e8;

const LogLogSpline& ml_spline(double alpha) {
    static std::mutex mutex;
    static std::map<double, std::unique_ptr<LogLogSpline>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[alpha];
    if (!slot) {
        slot = std::make_unique<LogLogSpline>([alpha](double x) { return special::mittag_leffler_neg(alpha, x); },
                                              kMlSplineLo, kMlSplineHi, 100);
    }
    return *slot;
}

// Signed Stirling numbers of the first kind: x^j d^j/dx^j = sum_m S(j, m) D^m
// with D = d/d(log x).
constexpr std::array<std::array<double, 5>, 5> kStirling1{{
    {1, 0, 0, 0, 0},
    {0, 1, 0, 0, 0},
    {0, -1, 1, 0, 0},
    {0, 2, -3, 1, 0},
    {0, -6, 11, -6, 1},
}};

// x^j f^(j)(x) through derivatives in u = log x; returns {value, error}.
std::pair<double, double> scaled_derivative(const std::function<double(double)>& f, double x, int order, double h) {
    if (order == 0) return {f(x), 0.0};
    std::function<double(double)> g = [&](double u) { return f(x * std::exp(u)); };
    double value = 0.0;
    double error = 0.0;
    for (int m = 1; m <= order; ++m) {
        const double c = kStirling1[order][m];
        if (c == 0.0) continue;
        const auto [d, e] = central_derivative(g, 0.0, m, h);
        value += c * d;
        error += std::abs(c) * e;
    }
    return {value, error};
}

}  // namespace

const char* volterra_form_name(VolterraForm form) noexcept {
    return form == VolterraForm::l_form ? "l-form" : "k-form";
}

VolterraForm default_form(const KernelPair&) {
    // The k-form marches 1*s with the trapezoidal rule, whose amplification
    // tends to -1 for stiff mu: the values zigzag by ~1e-3 once mu (1*l) is
    // large.  The l-form has no such mode.
    return VolterraForm::l_form;
}

std::vector<double> solve_relaxation(const KernelPair& pair, double mu, std::span<const double> grid) {
    return solve_relaxation(pair, mu, grid, default_form(pair));
}

std::vector<double> solve_relaxation(const KernelPair& pair, double mu, std::span<const double> grid,
                                     VolterraForm form) {
    require(mu >= 0.0 && std::isfinite(mu), ErrorCode::domain, "solve_relaxation: mu must be nonnegative, got " + num(mu));
    check_grid(grid);
    require(!(form == VolterraForm::k_form && pair.is_heat_limit()), ErrorCode::precondition,
            "solve_relaxation: the k-form needs a function k (heat limit has a Dirac k)");
    std::vector<double> s(grid.size(), 1.0);
    if (mu == 0.0) return s;
    const WeightMatrix w(pair, grid, form, 1);
    march(w, grid, mu, form, s);
    return s;
}

// ---------------------------------------------------------------------------
// RelaxationTable

RelaxationTable RelaxationTable::solve(const KernelPair& pair, std::vector<double> time_grid,
                                       std::vector<double> mu_grid, VolterraForm form, int threads) {
    check_grid(time_grid);
    require(!mu_grid.empty(), ErrorCode::domain, "RelaxationTable: empty mu grid");
    for (double mu : mu_grid)
        require(mu >= 0.0 && std::isfinite(mu), ErrorCode::domain, "RelaxationTable: mu must be nonnegative");
    require(!(form == VolterraForm::k_form && pair.is_heat_limit()), ErrorCode::precondition,
            "RelaxationTable: the k-form needs a function k");
    require(time_grid.back() <= pair.horizon(), ErrorCode::range,
            "RelaxationTable: time grid exceeds the pair horizon " + num(pair.horizon()));
    const int workers = resolve_threads(threads);
    RelaxationTable table(pair);
    table.form_ = form;
    table.time_grid_ = std::move(time_grid);
    table.mu_grid_ = std::move(mu_grid);
    const std::size_t nt = table.time_grid_.size();
    const std::size_t nm = table.mu_grid_.size();
    table.values_.assign(nt * nm, 1.0);
    const WeightMatrix w(pair, table.time_grid_, form, workers);
    parallel_for(nm, workers, [&](std::size_t j) {
        std::vector<double> column(nt);
        march(w, table.time_grid_, table.mu_grid_[j], form, column);
        for (std::size_t i = 0; i < nt; ++i) {
            require(std::isfinite(column[i]), ErrorCode::internal, "RelaxationTable: non-finite value");
            table.values_[i * nm + j] = column[i];
        }
    });
    return table;
}

RelaxationTable RelaxationTable::build(const KernelPair& pair, std::span<const double> times,
                                       const RelaxationOptions& options) {
    require(!times.empty(), ErrorCode::domain, "RelaxationTable: no times requested");
    double t_lo = std::numeric_limits<double>::infinity();
    double t_hi = 0.0;
    for (double t : times) {
        require(t > 0.0 && std::isfinite(t), ErrorCode::domain, "RelaxationTable: times must be positive");
        t_lo = std::min(t_lo, t);
        t_hi = std::max(t_hi, t);
    }
    require(options.ratio > 1.0 && options.first_node > 0.0 && options.mu_per_decade >= 4, ErrorCode::domain,
            "RelaxationTable: invalid options");

    double mu_min = options.mu_min;
    double mu_max = options.mu_max;
    if (mu_min <= 0.0) mu_min = 1e-6 / pair.cumulative_l(t_hi);
    if (mu_max <= 0.0) mu_max = 1e4 / pair.cumulative_l(t_lo);
    require(mu_max > mu_min, ErrorCode::domain, "RelaxationTable: empty symbol range");

    // On [0, t_1] s stays within 1e-3 of 1 for every tabulated mu, which is
    // what the linear first interval can represent.
    double first = std::min(options.first_node, 0.5 * t_lo);
    const double floor_node = 1e-10 * options.first_node;
    while (mu_max * pair.cumulative_l(first) > 1e-3 && first > floor_node) first *= 0.1;

    // Geometric mesh with the requested times as nodes; geometric nodes that
    // crowd a requested time are dropped.
    std::vector<double> requested(times.begin(), times.end());
    std::sort(requested.begin(), requested.end());
    requested.erase(std::unique(requested.begin(), requested.end()), requested.end());
    const double crowd = std::pow(options.ratio, 0.3);
    std::vector<double> mesh{0.0};
    std::size_t r = 0;
    for (double t = first; t < t_hi; t *= options.ratio) {
        while (r < requested.size() && requested[r] <= t * crowd) mesh.push_back(requested[r++]);
        if (t > mesh.back() * crowd) mesh.push_back(t);
    }
    while (r < requested.size()) mesh.push_back(requested[r++]);

    const double decades = std::log10(mu_max / mu_min);
    const int n_mu = std::max(8, static_cast<int>(std::ceil(decades * options.mu_per_decade)) + 1);
    std::vector<double> mus(static_cast<std::size_t>(n_mu));
    const double step = decades / (n_mu - 1);
    for (int j = 0; j < n_mu; ++j) mus[j] = mu_min * std::pow(10.0, step * j);
    return solve(pair, std::move(mesh), std::move(mus), default_form(pair), options.threads);
}

std::string RelaxationTable::scheme() const {
    return std::string("product-integration piecewise-linear ") + volterra_form_name(form_);
}

void RelaxationTable::write_csv(std::ostream& out) const {
    out << "t,mu,s\n";
    for (std::size_t i = 0; i < time_grid_.size(); ++i) {
        for (std::size_t j = 0; j < mu_grid_.size(); ++j)
            out << num(time_grid_[i]) << ',' << num(mu_grid_[j]) << ',' << num(value(i, j)) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Slices

struct SymbolSlice::Impl {
    // Closed form: s = E_alpha(-mu t^alpha).
    bool closed = false;
    double alpha = 1.0;
    double t_alpha = 1.0;
    // Table: spline of log s against log mu on [mu_lo, mu_hi].
    UniformSpline spline;
    double mu_lo = 0.0;
    double mu_hi = 0.0;
    double s_lo = 1.0;
    double a2 = 0.0;         // 1/(1*l)(t)
    double remainder = 0.0;  // s - k/(mu + a2) at mu_hi
};

double SymbolSlice::operator()(double mu) const {
    if (mu <= 0.0) return 1.0;
    const Impl& p = *impl_;
    if (p.closed) return mittag_leffler_cached(p.alpha, mu * p.t_alpha);
    if (mu < p.mu_lo) return 1.0 - mu * (1.0 - p.s_lo) / p.mu_lo;
    if (mu > p.mu_hi) {
        const double q = p.mu_hi / mu;
        return k_ / (mu + p.a2) + p.remainder * q * q;
    }
    return std::exp(p.spline(std::log(mu)));
}

RelaxationModel::RelaxationModel(const KernelPair& pair, std::span<const double> times,
                                 const RelaxationOptions& options)
    : pair_(pair) {
    if (pair.kind() != PairKind::fractional) table_ = RelaxationTable::build(pair, times, options);
}

SymbolSlice RelaxationModel::at(double t) const {
    require(t > 0.0 && std::isfinite(t), ErrorCode::domain, "relaxation_symbol: t must be positive");
    SymbolSlice slice;
    slice.t_ = t;
    slice.cumulative_l_ = pair_.cumulative_l(t);
    slice.k_ = pair_.is_heat_limit() ? 0.0 : pair_.k(t);
    auto impl = std::make_shared<SymbolSlice::Impl>();
    if (!table_) {
        impl->closed = true;
        impl->alpha = pair_.exponents()[0];
        impl->t_alpha = std::pow(t, impl->alpha);
        slice.impl_ = std::move(impl);
        return slice;
    }
    const RelaxationTable& table = *table_;
    const std::span<const double> mesh = table.time_grid();
    require(t <= mesh.back() * (1.0 + 1e-12) && t >= mesh[1], ErrorCode::range,
            "relaxation_symbol: t = " + num(t) + " outside the solved range [" + num(mesh[1]) + ", " +
                num(mesh.back()) + "]");
    const std::size_t nm = table.mu_grid().size();
    std::vector<double> row(nm);
    const auto it = std::lower_bound(mesh.begin(), mesh.end(), t);
    const std::size_t hit = static_cast<std::size_t>(it - mesh.begin());
    if (hit < mesh.size() && std::abs(mesh[hit] - t) <= 1e-12 * t) {
        for (std::size_t j = 0; j < nm; ++j) row[j] = table.value(hit, j);
    } else {
        // Cubic Lagrange interpolation in log t through four nodes.
        std::size_t lo = hit >= 2 ? hit - 2 : 1;
        lo = std::max<std::size_t>(1, std::min(lo, mesh.size() - 4));
        const double u = std::log(t);
        std::array<double, 4> c{};
        for (std::size_t a = 0; a < 4; ++a) {
            c[a] = 1.0;
            for (std::size_t b = 0; b < 4; ++b) {
                if (a == b) continue;
                c[a] *= (u - std::log(mesh[lo + b])) / (std::log(mesh[lo + a]) - std::log(mesh[lo + b]));
            }
        }
        for (std::size_t j = 0; j < nm; ++j) {
            double v = 0.0;
            for (std::size_t a = 0; a < 4; ++a) v += c[a] * table.value(lo + a, j);
            row[j] = v;
        }
    }
    const std::span<const double> mus = table.mu_grid();
    std::vector<double> logs(nm);
    for (std::size_t j = 0; j < nm; ++j) {
        require(row[j] > 0.0, ErrorCode::resolution,
                "relaxation_symbol: non-positive s at t = " + num(t) + ", mu = " + num(mus[j]));
        logs[j] = std::log(std::min(row[j], 1.0));
    }
    impl->mu_lo = mus.front();
    impl->mu_hi = mus.back();
    impl->s_lo = row.front();
    impl->a2 = 1.0 / slice.cumulative_l_;
    impl->remainder = row.back() - slice.k_ / (impl->mu_hi + impl->a2);
    if (nm >= 2) {
        const double h = (std::log(mus.back()) - std::log(mus.front())) / static_cast<double>(nm - 1);
        impl->spline = UniformSpline(std::log(mus.front()), h, std::move(logs));
    } else {
        impl->spline = UniformSpline(std::log(mus.front()), 1.0, {logs[0], logs[0]});
    }
    slice.impl_ = std::move(impl);
    return slice;
}

std::vector<double> relaxation_symbol(const KernelPair& pair, double t, std::span<const double> mu_grid) {
    require(t >= 0.0, ErrorCode::domain, "relaxation_symbol: t must be nonnegative");
    std::vector<double> out(mu_grid.size(), 1.0);
    if (t == 0.0) return out;
    const std::array<double, 1> times{t};
    const RelaxationModel model(pair, times);
    const SymbolSlice slice = model.at(t);
    for (std::size_t j = 0; j < mu_grid.size(); ++j) {
        require(mu_grid[j] >= 0.0, ErrorCode::domain, "relaxation_symbol: mu must be nonnegative");
        out[j] = slice(mu_grid[j]);
    }
    return out;
}

double mittag_leffler_cached(double alpha, double x) {
    if (alpha == 1.0) return std::exp(-x);
    if (x >= kMlSplineLo && x <= kMlSplineHi) return ml_spline(alpha)(x);
    return special::mittag_leffler_neg(alpha, x);
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

void record(BoundsReport& r, double s, double lower, double upper, double t, double mu) {
    ++r.points;
    const double low_violation = (lower - s) / lower;
    const double up_violation = (s - upper) / upper;
    const double v = std::max(low_violation, up_violation);
    if (!std::isfinite(s) || v > r.tolerance) ++r.violations;
    if (!std::isfinite(s) || v > r.worst_relative_violation || r.points == 1) {
        r.worst_relative_violation = std::isfinite(s) ? v : std::numeric_limits<double>::infinity();
        r.worst_t = t;
        r.worst_mu = mu;
    }
}

double lower_bound(const KernelPair& pair, double t, double mu) {
    if (mu == 0.0) return 1.0;
    if (pair.is_heat_limit()) return 0.0;
    return 1.0 / (1.0 + mu / pair.k(t));
}

}  // namespace

BoundsReport verify_smu_bounds(const RelaxationTable& table, double tolerance, const std::function<double(double)>& psi,
                               double t_lo) {
    BoundsReport r;
    r.tolerance = tolerance;
    const KernelPair& pair = table.pair();
    const std::span<const double> ts = table.time_grid();
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double t = ts[i];
        if (t < t_lo) continue;
        const double bound_scale = psi ? psi(t) : pair.cumulative_l(t);
        for (std::size_t j = 0; j < table.mu_grid().size(); ++j) {
            const double mu = table.mu_grid()[j];
            record(r, table.value(i, j), lower_bound(pair, t, mu), 1.0 / (1.0 + mu * bound_scale), t, mu);
        }
    }
    r.passed = r.violations == 0;
    return r;
}

BoundsReport verify_smu_bounds(const KernelPair& pair, const std::function<double(double, double)>& s,
                               std::span<const double> times, std::span<const double> mus, double tolerance,
                               const std::function<double(double)>& psi) {
    BoundsReport r;
    r.tolerance = tolerance;
    for (double t : times) {
        require(t > 0.0, ErrorCode::domain, "verify_smu_bounds: t must be positive");
        const double bound_scale = psi ? psi(t) : pair.cumulative_l(t);
        for (double mu : mus) record(r, s(t, mu), lower_bound(pair, t, mu), 1.0 / (1.0 + mu * bound_scale), t, mu);
    }
    r.passed = r.violations == 0;
    return r;
}

MonotonicityReport complete_monotonicity_check(const std::function<double(double)>& s, std::span<const double> mu_grid,
                                               int max_order, double tolerance) {
    require(max_order >= 0 && max_order <= 6, ErrorCode::domain, "complete_monotonicity_check: order must be in [0, 6]");
    require(mu_grid.size() >= static_cast<std::size_t>(max_order) + 1, ErrorCode::domain,
            "complete_monotonicity_check: need at least order + 1 symbol points");
    for (std::size_t i = 1; i < mu_grid.size(); ++i)
        require(mu_grid[i] > mu_grid[i - 1], ErrorCode::domain, "complete_monotonicity_check: grid must increase");
    MonotonicityReport r;
    r.max_order = max_order;
    r.worst_by_order.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
    std::vector<double> f(mu_grid.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = s(mu_grid[i]);
        scale = std::max(scale, std::abs(f[i]));
    }
    const double noise = tolerance * std::max(scale, std::numeric_limits<double>::min());
    for (int j = 0; j <= max_order; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(j) < f.size(); ++i) {
            // Divided difference as sum_a c_a f_a with c_a = 1/prod_{b != a}(x_a - x_b);
            // the noise bound is noise * sum |c_a|.
            double dd = 0.0;
            double amplification = 0.0;
            for (std::size_t a = i; a <= i + static_cast<std::size_t>(j); ++a) {
                double c = 1.0;
                for (std::size_t b = i; b <= i + static_cast<std::size_t>(j); ++b) {
                    if (a != b) c /= mu_grid[a] - mu_grid[b];
                }
                dd += c * f[a];
                amplification += std::abs(c);
            }
            const double signed_dd = sign * dd;
            const double allowance = noise * amplification;
            if (signed_dd < -allowance) {
                ++r.violations;
                const double scaled = signed_dd / amplification;
                r.worst_by_order[static_cast<std::size_t>(j)] =
                    std::min(r.worst_by_order[static_cast<std::size_t>(j)], scaled);
            }
        }
    }
    r.passed = r.violations == 0;
    return r;
}

std::pair<double, double> central_derivative(const std::function<double(double)>& f, double x, int order, double h) {
    require(order >= 1 && order <= 4, ErrorCode::domain, "central_derivative: order must be in [1, 4]");
    require(h > 0.0, ErrorCode::domain, "central_derivative: step must be positive");
    auto stencil = [&](double step) {
        const double f0 = f(x);
        const double p1 = f(x + step), m1 = f(x - step);
        switch (order) {
            case 1: return (p1 - m1) / (2.0 * step);
            case 2: return (p1 - 2.0 * f0 + m1) / (step * step);
            case 3: {
                const double p2 = f(x + 2.0 * step), m2 = f(x - 2.0 * step);
                return (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * step * step * step);
            }
            default: {
                const double p2 = f(x + 2.0 * step), m2 = f(x - 2.0 * step);
                return (p2 - 4.0 * p1 + 6.0 * f0 - 4.0 * m1 + m2) / (step * step * step * step);
            }
        }
    };
    const double coarse = stencil(h);
    const double fine = stencil(0.5 * h);
    const double extrapolated = (4.0 * fine - coarse) / 3.0;
    // Rounding in the finest stencil: roughly eps |f| * (sum of |coefficients|) / step^order.
    const double step = 0.5 * h;
    const double rounding = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(f(x)) * (1 << (order + 1)) /
                            std::pow(step, order);
    return {extrapolated, std::abs(extrapolated - fine) + rounding};
}

DerivativeBoundReport taylor_derivative_bound_check(const std::function<double(double)>& s, double mu, int order) {
    require(order >= 0 && order <= 4, ErrorCode::domain, "taylor_derivative_bound_check: order must be in [0, 4]");
    require(mu > 0.0, ErrorCode::domain, "taylor_derivative_bound_check: mu must be positive");
    // Log-variable stencil reaching mu e^{+-2h} must stay inside (mu/2, 2mu).
    const double h = 0.08;
    require(std::exp(2.0 * h) < 2.0, ErrorCode::internal, "taylor_derivative_bound_check: stencil too wide");
    DerivativeBoundReport r;
    r.order = order;
    const auto [scaled, error] = scaled_derivative(s, mu, order, h);
    r.derivative = scaled / std::pow(mu, order);
    r.error_estimate = error;
    r.lhs = std::abs(scaled) + error;
    double factorial = 1.0;
    for (int i = 2; i <= order; ++i) factorial *= i;
    r.rhs = std::ldexp(factorial, order) * s(0.5 * mu);
    r.passed = r.lhs <= r.rhs;
    return r;
}

MultiplierReport multiplier_bound_check(const RelaxationModel& model, std::span<const double> times, double kappa,
                                        int order, std::span<const double> mu_grid) {
    require(kappa > 0.0 && kappa <= 1.0, ErrorCode::domain, "multiplier_bound_check: kappa must be in (0, 1]");
    require(order >= 0 && order <= 3, ErrorCode::domain, "multiplier_bound_check: order must be in [0, 3]");
    require(!times.empty() && !mu_grid.empty(), ErrorCode::domain, "multiplier_bound_check: empty grids");
    MultiplierReport r;
    for (double t : times) {
        const SymbolSlice slice = model.at(t);
        std::function<double(double)> psi = [&](double mu) { return std::pow(mu, kappa) * slice(mu); };
        double sup = 0.0;
        for (double mu : mu_grid) {
            require(mu > 0.0, ErrorCode::domain, "multiplier_bound_check: mu must be positive");
            sup = std::max(sup, std::abs(scaled_derivative(psi, mu, order, 0.05).first));
        }
        r.times.push_back(t);
        r.sup_values.push_back(sup * std::pow(slice.cumulative_l(), kappa));
    }
    const auto [lo, hi] = std::minmax_element(r.sup_values.begin(), r.sup_values.end());
    r.finite = std::all_of(r.sup_values.begin(), r.sup_values.end(), [](double v) { return std::isfinite(v) && v > 0.0; });
    r.spread = r.finite ? *hi / *lo - 1.0 : std::numeric_limits<double>::infinity();
    return r;
}

double switched_upgrade_constant(const RelaxationTable& table, double t_lo) {
    double c = 0.0;
    const std::span<const double> ts = table.time_grid();
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] < t_lo) continue;
        for (std::size_t j = 0; j < table.mu_grid().size(); ++j)
            c = std::max(c, table.value(i, j) * (1.0 + table.mu_grid()[j] * ts[i]));
    }
    return c;
}

}  // namespace subdiff
