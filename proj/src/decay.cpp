#include "subdiff/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subdiff/errors.hpp"
#include "subdiff/parallel.hpp"

namespace subdiff {

DecayFit fit_decay_exponent(std::span<const double> t, std::span<const double> v, double t_lo, double t_hi) {
    require(t.size() == v.size(), ErrorCode::domain, "fit_decay_exponent: t and values differ in length");
    require(t_lo > 0.0 && t_hi > t_lo, ErrorCode::domain, "fit_decay_exponent: need 0 < t_lo < t_hi");
    DecayFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    std::vector<double> x, y;
    const double slack = 1e-9;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo * (1.0 - slack) || t[i] > t_hi * (1.0 + slack)) continue;
        require(v[i] > 0.0 && std::isfinite(v[i]), ErrorCode::domain,
                "fit_decay_exponent: values must be positive and finite in the window");
        x.push_back(std::log(t[i]));
        y.push_back(std::log(v[i]));
    }
    fit.points = x.size();
    require(fit.points >= 5, ErrorCode::domain, "fit_decay_exponent: need at least five points in the window");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::exp(y[i] - fit.intercept - fit.slope * x[i]) - 1.0;
        fit.max_relative_residual = std::max(fit.max_relative_residual, std::abs(r));
    }
    return fit;
}

double critical_dimension(double r) {
    require(r > 1.0, ErrorCode::domain, "critical_dimension: r must exceed 1");
    if (std::isinf(r)) return 2.0;
    return 2.0 * r / (r - 1.0);
}

double gradient_critical_dimension(double r) {
    require(r > 1.0, ErrorCode::domain, "gradient_critical_dimension: r must exceed 1");
    if (std::isinf(r)) return 1.0;
    return r / (r - 1.0);
}

const char* norm_path_name(NormPath path) noexcept {
    switch (path) {
        case NormPath::grid: return "grid";
        case NormPath::radial: return "radial";
        case NormPath::hankel: return "hankel";
    }
    return "unknown";
}

std::optional<NormPath> parse_norm_path(const std::string& name) {
    if (name == "grid") return NormPath::grid;
    if (name == "radial") return NormPath::radial;
    if (name == "hankel") return NormPath::hankel;
    return std::nullopt;
}

const char* norm_kind_name(NormKind kind) noexcept {
    switch (kind) {
        case NormKind::lebesgue: return "lebesgue";
        case NormKind::weak: return "weak";
        case NormKind::gradient: return "gradient";
    }
    return "unknown";
}

namespace {

double one_norm(const RelaxationModel& model, const Datum& datum, const SweepSpec& spec, double t,
                const RadialSpectrum* radial) {
    const SymbolSlice slice = model.at(t);
    const int d = spec.dimension;
    switch (spec.path) {
        case NormPath::grid: {
            const GridSize g = choose_grid(slice.cumulative_l(), datum, d, spec.grid);
            const GridField u = evolve(slice, datum, d, g.extent, g.points);
            if (spec.kind == NormKind::weak) return weak_lp_quasinorm(u, spec.r);
            if (spec.kind == NormKind::gradient) {
                const std::vector<GridField> grad = gradient_field(u);
                return lp_norm(magnitude(grad), spec.r);
            }
            return lp_norm(u, spec.r);
        }
        case NormPath::radial:
            return l2_norm_plancherel_radial(slice, *radial, spec.kind == NormKind::gradient ? 1 : 0);
        case NormPath::hankel: {
            const double outer = 40.0 * std::max(std::sqrt(slice.cumulative_l()), datum.support_radius());
            const std::vector<double> radii = log_radii(1e-3, outer, 40);
            const RadialProfile u = u_radial_hankel(slice, datum, d, radii);
            if (spec.kind == NormKind::weak) return radial_weak_quasinorm(u, spec.r);
            return radial_lp_norm(u, spec.r);
        }
    }
    return 0.0;
}

}  // namespace

std::vector<double> norm_series(const RelaxationModel& model, const Datum& datum, const SweepSpec& spec) {
    require(spec.dimension >= 1, ErrorCode::domain, "norm_series: dimension must be positive");
    require(spec.r >= 1.0, ErrorCode::domain, "norm_series: r must be >= 1");
    require(!spec.times.empty(), ErrorCode::domain, "norm_series: no times");
    std::optional<RadialSpectrum> radial;
    switch (spec.path) {
        case NormPath::grid:
            require(spec.dimension <= 3, ErrorCode::domain, "norm_series: the grid path needs d <= 3");
            break;
        case NormPath::radial:
            require(spec.r == 2.0 && spec.kind != NormKind::weak, ErrorCode::domain,
                    "norm_series: the radial Plancherel path computes L2 norms only");
            radial.emplace(spec.dimension, datum);
            break;
        case NormPath::hankel:
            require(spec.kind != NormKind::gradient, ErrorCode::domain,
                    "norm_series: gradient norms use the grid or radial path");
            break;
    }
    std::vector<double> out(spec.times.size());
    const int threads = spec.threads > 0 ? spec.threads : default_threads();
    parallel_for(out.size(), threads, [&](std::size_t i) {
        out[i] = one_norm(model, datum, spec, spec.times[i], radial ? &*radial : nullptr);
    });
    return out;
}

double decay_target_factor(int dimension, double r, NormKind kind) {
    const double sub = 0.5 * dimension * (1.0 - 1.0 / r);
    switch (kind) {
        case NormKind::lebesgue: return dimension < critical_dimension(r) ? -sub : -1.0;
        case NormKind::weak: return -std::min(sub, 1.0);
        case NormKind::gradient: return -std::min(0.5 + sub, 1.0);
    }
    return 0.0;
}

SweepResult decay_sweep(const RelaxationModel& model, const Datum& datum, const SweepSpec& spec, double tolerance,
                        std::optional<std::pair<double, double>> window, const std::function<double(double)>& psi) {
    SweepResult out;
    out.times = spec.times;
    out.values = norm_series(model, datum, spec);
    const double t_max = *std::max_element(spec.times.begin(), spec.times.end());
    const auto [lo, hi] = window.value_or(std::pair{t_max / 100.0, t_max});
    out.fit = fit_decay_exponent(out.times, out.values, lo, hi);

    std::vector<double> scale(out.times.size());
    for (std::size_t i = 0; i < scale.size(); ++i) {
        scale[i] = psi ? psi(out.times[i]) : model.pair().cumulative_l(out.times[i]);
    }
    out.rate = fit_decay_exponent(out.times, scale, lo, hi).slope;
    out.target = decay_target_factor(spec.dimension, spec.r, spec.kind) * out.rate;
    out.tolerance = tolerance;

    std::size_t tail_points = 0;
    for (double t : out.times) tail_points += t >= hi / 10.0 * (1.0 - 1e-9) && t <= hi * (1.0 + 1e-9);
    if (tail_points >= 5) {
        out.tail_fit = fit_decay_exponent(out.times, out.values, hi / 10.0, hi);
        out.power_law = std::abs(out.tail_fit.slope - out.fit.slope) <= 0.05;
    }
    out.passed = std::abs(out.fit.slope - out.target) <= tolerance;
    return out;
}

LowerBoundReport lower_bound_ratio(const RelaxationModel& model, const Datum& datum, int dimension,
                                   std::span<const double> times) {
    require(times.size() >= 2, ErrorCode::domain, "lower_bound_ratio: need at least two times");
    LowerBoundReport out;
    out.hypothesis_met = datum.mass() != 0.0;
    out.times.assign(times.begin(), times.end());
    out.ratios.resize(times.size());
    const RadialSpectrum radial(dimension, datum);
    const double power = std::min(1.0, 0.25 * dimension);
    parallel_for(times.size(), default_threads(), [&](std::size_t i) {
        const SymbolSlice slice = model.at(times[i]);
        out.ratios[i] = l2_norm_plancherel_radial(slice, radial) / std::pow(model.pair().k(times[i]), power);
    });
    const double lo = std::log(times.front());
    const double hi = std::log(times.back());
    const double head_end = lo + (hi - lo) * 2.0 / 3.0;
    out.infimum = std::numeric_limits<double>::infinity();
    out.head_infimum = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.infimum = std::min(out.infimum, out.ratios[i]);
        if (std::log(times[i]) <= head_end + 1e-12) out.head_infimum = std::min(out.head_infimum, out.ratios[i]);
    }
    out.stable = out.infimum > 0.0 && out.infimum >= 0.5 * out.head_infimum;
    out.passed = out.hypothesis_met && out.stable;
    return out;
}

BandReport band(std::span<const double> times, std::span<const double> series,
                const std::function<double(double)>& weight) {
    require(times.size() == series.size() && !times.empty(), ErrorCode::domain, "band: empty or mismatched series");
    BandReport out;
    out.times.assign(times.begin(), times.end());
    out.lower = std::numeric_limits<double>::infinity();
    out.upper = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double v = series[i] * weight(times[i]);
        out.values.push_back(v);
        out.lower = std::min(out.lower, v);
        out.upper = std::max(out.upper, v);
    }
    out.ratio = out.lower > 0.0 ? out.upper / out.lower : std::numeric_limits<double>::infinity();
    return out;
}

ProfileReport large_time_profile(double alpha, int dimension, double p, const Datum& datum,
                                 std::span<const double> times, const GridPolicy& policy) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::domain, "large_time_profile: alpha must lie in (0, 1)");
    require(dimension >= 1 && dimension <= 3, ErrorCode::domain, "large_time_profile: grid path needs d <= 3");
    require(p >= 1.0 && (dimension == 1 || p < dimension / (dimension - 1.0)), ErrorCode::domain,
            "large_time_profile: p must lie in [1, d/(d-1))");
    require(times.size() >= 5, ErrorCode::domain, "large_time_profile: need at least five times");
    const KernelPair pair = KernelPair::fractional(alpha);
    const RelaxationModel model(pair, times);
    ProfileReport out;
    out.mass = datum.mass();
    out.first_moment = datum.first_moment_norm();
    out.times.assign(times.begin(), times.end());
    out.values.resize(times.size());
    const double exponent = 0.5 * alpha * dimension * (1.0 - 1.0 / p);
    parallel_for(times.size(), default_threads(), [&](std::size_t i) {
        const SymbolSlice slice = model.at(times[i]);
        const GridSize g = choose_grid(slice.cumulative_l(), datum, dimension, policy);
        GridField u = evolve(slice, datum, dimension, g.extent, g.points);
        const GridField z = z_grid_fft(slice, dimension, g.extent, g.points);
        std::span<double> uv = u.values();
        for (std::size_t j = 0; j < uv.size(); ++j) uv[j] -= out.mass * z.values()[j];
        out.values[i] = std::pow(times[i], exponent) * lp_norm(u, p);
    });
    out.fit = fit_decay_exponent(out.times, out.values, out.times.front(), out.times.back());
    out.decreasing = true;
    for (std::size_t i = 1; i < out.values.size(); ++i) out.decreasing = out.decreasing && out.values[i] < out.values[i - 1];
    out.passed = out.decreasing && out.fit.slope <= -0.5 * alpha + 0.07;
    return out;
}

}  // namespace subdiff
