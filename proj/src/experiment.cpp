#include "subdiff/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "subdiff/energy.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/special_functions.hpp"

namespace subdiff {

namespace {

using json = nlohmann::json;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Strict configuration reader

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t above = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diagonal = above;
        }
    }
    return row[b.size()];
}

class Reader {
public:
    Reader(const json& node, std::string path, std::string source)
        : node_(&node), path_(std::move(path)), source_(std::move(source)) {
        if (!node.is_object()) error("", "expected an object");
    }

    [[noreturn]] void error(const std::string& key, const std::string& message) const {
        std::string where = path_;
        if (!key.empty()) where += (where.empty() ? "" : ".") + key;
        if (where.empty()) where = "<root>";
        fail(ErrorCode::config, source_ + ": " + where + ": " + message);
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_->contains(key); }

    const json& raw(const std::string& key) const {
        used_.insert(key);
        if (!has(key)) {
            std::string message = "required field is missing";
            for (const auto& [present, value] : node_->items()) {
                if (edit_distance(present, key) <= 2) message += " (found \"" + present + "\", misspelled?)";
            }
            error(key, message);
        }
        return node_->at(key);
    }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) error(key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) error(key, "expected a finite number");
        return x;
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    double positive(const std::string& key, double fallback) const {
        const double x = number(key, fallback);
        if (!(x > 0.0)) error(key, "must be positive");
        return x;
    }
    double positive(const std::string& key) const {
        const double x = number(key);
        if (!(x > 0.0)) error(key, "must be positive");
        return x;
    }

    int integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) error(key, "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }
    int integer_in(const std::string& key, int fallback, int lo, int hi) const {
        const int n = integer(key, fallback);
        if (n < lo || n > hi) error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return n;
    }

    std::string text(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) error(key, "expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }
    std::string choice(const std::string& key, const std::string& fallback, std::initializer_list<const char*> options) const {
        const std::string value = fallback.empty() ? text(key) : text(key, fallback);
        std::string listing;
        for (const char* o : options) {
            if (value == o) return value;
            listing += std::string(listing.empty() ? "" : ", ") + o;
        }
        error(key, "unknown value \"" + value + "\" (expected one of: " + listing + ")");
    }

    std::vector<double> numbers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) error(key, "expected a non-empty array of numbers");
        std::vector<double> out;
        for (const json& x : v) {
            if (!x.is_number()) error(key, "expected a non-empty array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        return has(key) ? numbers(key) : fallback;
    }
    std::vector<int> integers(const std::string& key, std::vector<int> fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) error(key, "expected a non-empty array of integers");
        std::vector<int> out;
        for (const json& x : v) {
            if (!x.is_number_integer()) error(key, "expected a non-empty array of integers");
            out.push_back(x.get<int>());
        }
        return out;
    }

    Reader child(const std::string& key) const { return Reader(raw(key), join(key), source_); }

    std::vector<Reader> children(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) error(key, "expected a non-empty array of objects");
        std::vector<Reader> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], join(key) + "[" + std::to_string(i) + "]", source_);
        return out;
    }

    // Rejects every field that no accessor asked for.
    void finish() const {
        for (const auto& [key, value] : node_->items()) {
            if (!used_.contains(key)) error(key, "unknown field");
        }
    }

    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] const std::string& source() const { return source_; }

private:
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* node_;
    std::string path_;
    std::string source_;
    mutable std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Shared specifications

struct PairSpec {
    std::string type;
    double alpha = 0.5;
    std::vector<double> alphas, weights;
    std::filesystem::path k_csv, l_csv;

    [[nodiscard]] KernelPair build() const {
        if (type == "fractional") return KernelPair::fractional(alpha);
        if (type == "fractional-sum") return KernelPair::fractional_sum(alphas, weights);
        if (type == "ultraslow") return KernelPair::ultraslow();
        if (type == "switched-ultraslow") return KernelPair::switched_ultraslow();
        return KernelPair::tabulated_from_csv(k_csv.string(), l_csv.string());
    }
    [[nodiscard]] std::string key() const {
        std::string k = type + ":" + num(alpha);
        for (double a : alphas) k += "," + num(a);
        for (double w : weights) k += "," + num(w);
        return k + k_csv.string() + "|" + l_csv.string();
    }
};

PairSpec parse_pair(const Reader& r, const std::filesystem::path& base) {
    PairSpec p;
    p.type = r.choice("type", "", {"fractional", "fractional-sum", "ultraslow", "switched-ultraslow", "tabulated"});
    if (p.type == "fractional") {
        p.alpha = r.number("alpha");
        if (!(p.alpha > 0.0 && p.alpha <= 1.0)) r.error("alpha", "must lie in (0, 1]");
    } else if (p.type == "fractional-sum") {
        p.alphas = r.numbers("alphas");
        p.weights = r.numbers("weights");
        if (p.alphas.size() != p.weights.size()) r.error("weights", "must match alphas in length");
        for (std::size_t i = 0; i < p.alphas.size(); ++i) {
            if (!(p.alphas[i] > 0.0 && p.alphas[i] < 1.0)) r.error("alphas", "exponents must lie in (0, 1)");
            if (i > 0 && !(p.alphas[i] > p.alphas[i - 1])) r.error("alphas", "exponents must increase strictly");
            if (!(p.weights[i] > 0.0)) r.error("weights", "weights must be positive");
        }
    } else if (p.type == "tabulated") {
        p.k_csv = base / r.text("k_csv");
        p.l_csv = base / r.text("l_csv");
    }
    r.finish();
    return p;
}

struct DatumSpec {
    std::string type = "gaussian";
    double sigma = 1.0;
    double sigma2 = 2.0;
    double mass = 1.0;
    std::vector<double> centre;

    [[nodiscard]] Datum build() const {
        if (type == "gaussian-difference") return Datum::gaussian_difference(sigma, sigma2);
        if (type == "scaled-gaussian") return Datum::scaled_gaussian(mass, sigma);
        return Datum::gaussian(sigma, centre);
    }
};

DatumSpec parse_datum(const Reader& r) {
    DatumSpec d;
    d.type = r.choice("type", "", {"gaussian", "gaussian-difference", "scaled-gaussian"});
    d.sigma = r.positive("sigma", 1.0);
    if (d.type == "gaussian") d.centre = r.numbers("centre", {});
    if (d.type == "gaussian-difference") d.sigma2 = r.positive("sigma2");
    if (d.type == "scaled-gaussian") d.mass = r.number("mass");
    r.finish();
    return d;
}

// Either {"lo", "hi", "count"} (log-spaced, inclusive) or an explicit array.
std::vector<double> parse_times(const Reader& parent, const std::string& key) {
    const json& v = parent.raw(key);
    std::vector<double> t;
    if (v.is_array()) {
        t = parent.numbers(key);
    } else {
        const Reader r = parent.child(key);
        const double lo = r.positive("lo"), hi = r.positive("hi");
        const int count = r.integer_in("count", 0, 2, 1000000);
        r.finish();
        if (!(hi > lo)) parent.error(key, "hi must exceed lo");
        t = log_space(lo, hi, count);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || (i > 0 && !(t[i] > t[i - 1]))) parent.error(key, "times must be positive and increasing");
    }
    return t;
}

// Top-level fallbacks that checks inherit when they omit the field.
struct Defaults {
    std::optional<PairSpec> pair;
    std::optional<DatumSpec> datum;
    std::optional<std::vector<double>> times;
    std::filesystem::path base;
};

PairSpec pair_of(const Reader& r, const Defaults& d) {
    if (r.has("pair")) return parse_pair(r.child("pair"), d.base);
    if (!d.pair) r.error("pair", "required field is missing (and no top-level pair)");
    return *d.pair;
}
DatumSpec datum_of(const Reader& r, const Defaults& d) {
    if (r.has("datum")) return parse_datum(r.child("datum"));
    return d.datum.value_or(DatumSpec{});
}
std::vector<double> times_of(const Reader& r, const Defaults& d) {
    if (r.has("times")) return parse_times(r, "times");
    if (!d.times) r.error("times", "required field is missing (and no top-level times)");
    return *d.times;
}
std::vector<PairSpec> pairs_of(const Reader& r, const Defaults& d) {
    if (!r.has("pairs")) return {pair_of(r, d)};
    std::vector<PairSpec> out;
    for (const Reader& c : r.children("pairs")) out.push_back(parse_pair(c, d.base));
    return out;
}
int dimension_of(const Reader& r) { return r.integer_in("dimension", 0, 1, 64); }

std::vector<double> log_grid(const Reader& parent, const std::string& key, double lo, double hi, int count) {
    if (!parent.has(key)) return log_space(lo, hi, count);
    const Reader r = parent.child(key);
    lo = r.positive("lo", lo);
    hi = r.positive("hi", hi);
    count = r.integer_in("count", count, 2, 1000000);
    r.finish();
    if (!(hi > lo)) parent.error(key, "hi must exceed lo");
    return log_space(lo, hi, count);
}

// ---------------------------------------------------------------------------
// Running

class Context {
public:
    Context(ExperimentResult& out, double tolerance_scale) : out_(out), scale_(tolerance_scale) {}

    [[nodiscard]] double tol(double configured) const { return configured * scale_; }

    const RelaxationModel& model(const PairSpec& spec, std::span<const double> times) {
        std::string key = spec.key();
        for (double t : times) key += ";" + num(t);
        auto it = models_.find(key);
        if (it == models_.end()) {
            it = models_.emplace(key, std::make_unique<RelaxationModel>(pair(spec), times)).first;
        }
        return *it->second;
    }
    const KernelPair& pair(const PairSpec& spec) {
        auto it = pairs_.find(spec.key());
        if (it == pairs_.end()) it = pairs_.emplace(spec.key(), spec.build()).first;
        return it->second;
    }

    void claim(Claim c) {
        if (c.comparison == "within") c.passed = std::abs(c.measured - c.target) <= c.tolerance;
        else if (c.comparison == "at-most") c.passed = c.measured <= c.target + c.tolerance;
        else if (c.comparison == "at-least") c.passed = c.measured >= c.target - c.tolerance;
        out_.claims.push_back(std::move(c));
    }
    void check(std::string name, double target, double measured, double tolerance, std::string comparison) {
        claim(Claim{std::move(name), target, measured, tolerance, std::move(comparison), false, true, {}});
    }
    // A claim whose verdict was decided by the caller.
    void verdict(Claim c) { out_.claims.push_back(std::move(c)); }

    void series(std::string name, std::vector<double> t, std::vector<double> v) {
        out_.series.push_back({std::move(name), std::move(t), std::move(v)});
    }
    void fit(FitRecord f) { out_.fits.push_back(std::move(f)); }
    void timing(std::string what, double seconds) { out_.timings.push_back({std::move(what), seconds}); }

private:
    ExperimentResult& out_;
    double scale_;
    std::map<std::string, std::unique_ptr<RelaxationModel>> models_;
    std::map<std::string, KernelPair> pairs_;
};

using Runner = std::function<void(Context&)>;

struct CheckPlan {
    std::string type;
    std::string name;
    Runner run;
};

// Slope of log f against log t over [lo, hi].
double rate_of(const std::function<double(double)>& f, std::span<const double> t, double lo, double hi) {
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = f(t[i]);
    return fit_decay_exponent(t, v, lo, hi).slope;
}

FitRecord record_fit(const std::string& series, std::span<const double> t, std::span<const double> v, double lo,
                     double hi, double target, double tolerance) {
    FitRecord f;
    f.series = series;
    f.fit = fit_decay_exponent(t, v, lo, hi);
    std::size_t tail_points = 0;
    for (double x : t) tail_points += x >= hi / 10.0 * (1.0 - 1e-9) && x <= hi * (1.0 + 1e-9);
    if (tail_points >= 5) {
        f.tail_fit = fit_decay_exponent(t, v, hi / 10.0, hi);
        f.power_law = std::abs(f.tail_fit.slope - f.fit.slope) <= 0.05;
    }
    f.target = target;
    f.tolerance = tolerance;
    f.passed = std::abs(f.fit.slope - target) <= tolerance;
    return f;
}

std::pair<double, double> window_of(const Reader& r, std::span<const double> times) {
    if (!r.has("window")) return {times.back() / 100.0, times.back()};
    const std::vector<double> w = r.numbers("window");
    if (w.size() != 2 || !(w[0] > 0.0 && w[1] > w[0])) r.error("window", "expected [lo, hi] with 0 < lo < hi");
    return {w[0], w[1]};
}

// ---- relaxation ------------------------------------------------------------

Runner parse_ml_envelope(const Reader& r, const std::string& name) {
    const std::vector<double> alphas = r.numbers("alphas", {0.1, 0.3, 0.5, 0.7, 0.9});
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) r.error("alphas", "must lie in (0, 1)");
    }
    const double lo = r.positive("x_lo", 1e-6), hi = r.positive("x_hi", 1e6);
    const int count = r.integer_in("count", 10000, 2, 10000000);
    const double max_seconds = r.positive("max_seconds", 1.0);
    const double tolerance = r.number("tolerance", 0.0);
    return [=](Context& ctx) {
        const std::vector<double> xs = log_space(lo, hi, count);
        const auto start = std::chrono::steady_clock::now();
        std::size_t violations = 0;
        double worst = -std::numeric_limits<double>::infinity();
        std::vector<double> c_alpha(alphas.size(), 0.0);  // sup (1 + x) E_a(-x) on the sample
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const double a = alphas[i];
            const double g1 = std::tgamma(1.0 - a), g2 = std::tgamma(1.0 + a);
            for (double x : xs) {
                const double e = special::mittag_leffler_neg(a, x);
                const double lower = 1.0 / (1.0 + g1 * x), upper = 1.0 / (1.0 + x / g2);
                const double v = std::max((lower - e) / lower, (e - upper) / upper);
                worst = std::max(worst, v);
                violations += v > ctx.tol(tolerance);
                c_alpha[i] = std::max(c_alpha[i], (1.0 + x) * e);
            }
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            ctx.claim({name + ": C(" + num(alphas[i]) + ") in E_a(-x) <= C/(1+x)", 0.0, c_alpha[i], 0.0, "at-least",
                       false, false, "empirical constant, reported only"});
        }
        ctx.timing(name + ": evaluation", seconds);
        ctx.claim({name + ": violations", 0.0, static_cast<double>(violations), 0.0, "at-most", false, true,
                   "worst signed relative margin " + num(worst) + " over " + std::to_string(alphas.size() * xs.size()) +
                       " points"});
        ctx.verdict({name + ": runtime seconds", max_seconds, nan, 0.0, "at-most", seconds <= max_seconds, true,
                     "wall-clock time in timing.json"});
    };
}

Runner parse_volterra_oracle(const Reader& r, const std::string& name) {
    const double alpha = r.number("alpha", 0.5), mu = r.positive("mu", 1.0);
    if (!(alpha > 0.0 && alpha < 1.0)) r.error("alpha", "must lie in (0, 1)");
    const double horizon = r.positive("horizon", 10.0), grading = r.positive("grading", 2.0);
    const int points = r.integer_in("points", 2048, 8, 1 << 20);
    const double tolerance = r.positive("tolerance", 1e-4);
    const double min_ratio = r.positive("min_ratio", 1.8);
    return [=](Context& ctx) {
        const KernelPair pair = KernelPair::fractional(alpha);
        std::vector<double> errors;
        std::vector<double> grid, err;
        for (int n : {points / 4, points / 2, points}) {
            grid = graded_mesh(horizon, n, grading);
            const std::vector<double> s = solve_relaxation(pair, mu, grid);
            err.assign(grid.size(), 0.0);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                err[i] = std::abs(s[i] - special::mittag_leffler_neg(alpha, mu * std::pow(grid[i], alpha)));
            }
            errors.push_back(*std::max_element(err.begin(), err.end()));
        }
        ctx.series(name + "-error", std::vector<double>(grid.begin() + 1, grid.end()),
                   std::vector<double>(err.begin() + 1, err.end()));
        ctx.claim({name + ": max error", 0.0, errors.back(), ctx.tol(tolerance), "at-most", false, true,
                   std::to_string(points) + " points"});
        const double ratio = std::min(errors[0] / errors[1], errors[1] / errors[2]);
        ctx.claim({name + ": error ratio per doubling", min_ratio, ratio, 0.0, "at-least", false, true,
                   "errors " + num(errors[0]) + ", " + num(errors[1]) + ", " + num(errors[2])});
    };
}

Runner parse_pair_certificate(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const std::vector<double> times = times_of(r, d);
    const bool custom = r.has("tolerance");
    const double tolerance = r.positive("tolerance", 1.0);
    return [=](Context& ctx) {
        const KernelPair& pair = ctx.pair(spec);
        const double tol = custom ? ctx.tol(tolerance) : ctx.tol(default_pair_tolerance(pair));
        const PairReport rep = verify_pair(pair, times, tol);
        ctx.claim({name + ": max |k*l - 1|", 0.0, rep.max_convolution_deviation, tol, "at-most", false, true,
                   pair.describe()});
        const int signs = rep.k_monotonicity_violations + rep.k_sign_violations + rep.l_sign_violations +
                          rep.cumulative_monotonicity_violations;
        ctx.check(name + ": sign and monotonicity violations", 0.0, static_cast<double>(signs), 0.0, "at-most");
        if (pair.kind() == PairKind::ultraslow) {
            // 1/(2k(t)) <= log t <= 2(1*l)(t) is used from t = 10 on.
            const double t1 = ultraslow_log_threshold(pair, std::max(times.back(), 1e8));
            ctx.claim({name + ": smallest T1 for the log comparison", 10.0, t1, 0.0, "at-most", false, true,
                       "scanned up to " + num(std::max(times.back(), 1e8))});
        }
    };
}

// sup_mu s(t, mu)(1 + mu t) per t: the constant an upgrade psi(t) = t would need.
Runner parse_upgrade_constant(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const std::vector<double> times = times_of(r, d);
    const std::vector<double> mus = log_grid(r, "mu", 1e-12, 1e4, 321);
    return [=](Context& ctx) {
        const KernelPair& pair = ctx.pair(spec);
        std::vector<double> constants(times.size());
        parallel_for(times.size(), default_threads(), [&](std::size_t i) {
            const std::vector<double> s = relaxation_symbol(pair, times[i], mus);
            double c = 0.0;
            for (std::size_t j = 0; j < mus.size(); ++j) c = std::max(c, s[j] * (1.0 + mus[j] * times[i]));
            constants[i] = c;
        });
        const double growth = constants.back() / constants.front();
        std::vector<double> per_log(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) per_log[i] = constants[i] / std::log(std::max(times[i], 2.0));
        ctx.series(name, times, constants);
        ctx.verdict({name + ": growth of sup s(1 + mu t)", 1.0, growth, 0.0, "at-most", growth <= 1.0 + 1e-9, false,
                     "C(t_max)/C(t_min); C(t)/log t at t_max = " + num(per_log.back())});
    };
}

// ---- bounds suite ----------------------------------------------------------

Runner parse_smu_bounds(const Reader& r, const Defaults& d, const std::string& name) {
    const std::vector<PairSpec> specs = pairs_of(r, d);
    const std::vector<double> times = times_of(r, d);
    const std::vector<double> mus = r.numbers("mus", {1e-2, 1.0, 1e2});
    for (double m : mus) {
        if (!(m > 0.0)) r.error("mus", "must be positive");
    }
    const double tolerance = r.positive("tolerance", 1e-3);
    return [=](Context& ctx) {
        for (const PairSpec& spec : specs) {
            const KernelPair& pair = ctx.pair(spec);
            BoundsReport rep;
            if (pair.has_closed_form() && pair.kind() == PairKind::fractional && !pair.is_heat_limit()) {
                const double a = pair.exponents()[0];
                rep = verify_smu_bounds(
                    pair, [a](double t, double mu) { return special::mittag_leffler_neg(a, mu * std::pow(t, a)); },
                    times, mus, ctx.tol(tolerance));
            } else {
                std::vector<double> sorted = mus;
                std::sort(sorted.begin(), sorted.end());
                const RelaxationTable table = RelaxationTable::solve(
                    pair, geometric_mesh(1e-10, times.back(), 1.02), sorted, default_form(pair));
                rep = verify_smu_bounds(table, ctx.tol(tolerance), {}, times.front());
            }
            ctx.claim({name + ": " + pair.describe() + " worst relative violation", 0.0,
                       std::max(rep.worst_relative_violation, 0.0), rep.tolerance, "at-most", false, true,
                       std::to_string(rep.violations) + " of " + std::to_string(rep.points) +
                           " points beyond tolerance; worst at t = " + num(rep.worst_t) + ", mu = " + num(rep.worst_mu)});
        }
    };
}

Runner parse_complete_monotonicity(const Reader& r, const Defaults& d, const std::string& name) {
    const std::vector<PairSpec> specs = pairs_of(r, d);
    const double t = r.positive("t", 10.0);
    const std::vector<double> mus = log_grid(r, "mu", 1e-3, 1e3, 61);
    const int order = r.integer_in("max_order", 4, 0, 12);
    const double tolerance = r.positive("tolerance", 1e-10);
    return [=](Context& ctx) {
        for (const PairSpec& spec : specs) {
            const std::vector<double> at{t};
            const SymbolSlice slice = ctx.model(spec, at).at(t);
            const MonotonicityReport rep =
                complete_monotonicity_check([&](double mu) { return slice(mu); }, mus, order, ctx.tol(tolerance));
            std::string worst;
            for (double w : rep.worst_by_order) worst += (worst.empty() ? "" : ", ") + num(w);
            ctx.claim({name + ": " + ctx.pair(spec).describe() + " sign violations up to order " + std::to_string(order),
                       0.0, static_cast<double>(rep.violations), 0.0, "at-most", false, true,
                       "worst wrong-signed difference per order: " + worst});
        }
    };
}

Runner parse_multiplier(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const std::vector<double> times = times_of(r, d);
    const double kappa = r.positive("kappa", 0.5);
    if (kappa > 1.0) r.error("kappa", "must lie in (0, 1]");
    const std::vector<int> orders = r.integers("orders", {1, 2, 3});
    for (int n : orders) {
        if (n < 1 || n > 3) r.error("orders", "orders must lie in [1, 3]");
    }
    const std::vector<double> mus = log_grid(r, "mu", 1e-8, 1e8, 161);
    const double tolerance = r.positive("tolerance", 0.1);
    return [=](Context& ctx) {
        const RelaxationModel& model = ctx.model(spec, times);
        for (int n : orders) {
            const MultiplierReport rep = multiplier_bound_check(model, times, kappa, n, mus);
            ctx.series(name + "-order" + std::to_string(n), times, rep.sup_values);
            ctx.claim({name + ": spread across t, order " + std::to_string(n), 0.0,
                       rep.finite ? rep.spread : std::numeric_limits<double>::infinity(), ctx.tol(tolerance), "at-most",
                       false, true, "kappa = " + num(kappa)});
        }
    };
}

Runner parse_taylor(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const double t = r.positive("t", 10.0);
    const std::vector<double> mus = r.numbers("mus", {1e-2, 1.0, 1e2});
    const std::vector<int> orders = r.integers("orders", {1, 2, 3, 4});
    for (int n : orders) {
        if (n < 1 || n > 4) r.error("orders", "orders must lie in [1, 4]");
    }
    return [=](Context& ctx) {
        const std::vector<double> at{t};
        const SymbolSlice slice = ctx.model(spec, at).at(t);
        int failures = 0;
        double worst = 0.0;
        for (double mu : mus) {
            for (int n : orders) {
                const DerivativeBoundReport rep =
                    taylor_derivative_bound_check([&](double m) { return slice(m); }, mu, n);
                failures += !rep.passed;
                worst = std::max(worst, rep.lhs / rep.rhs);
            }
        }
        ctx.claim({name + ": derivative bound failures", 0.0, static_cast<double>(failures), 0.0, "at-most", false, true,
                   "largest lhs/rhs " + num(worst)});
    };
}

Runner parse_fundamental_identity(const Reader& r, const std::string& name) {
    const int points = r.integer_in("points", 20, 2, 100000);
    const double tolerance = r.positive("tolerance", 1e-6);
    return [=](Context& ctx) {
        // k = e^{-t}, H(y) = y^2, u = cos t on (0, 1].
        const Smooth k{[](double t) { return std::exp(-t); }, [](double t) { return -std::exp(-t); }};
        const Smooth h{[](double y) { return y * y; }, [](double y) { return 2.0 * y; }};
        const Smooth u{[](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); }};
        std::vector<double> grid(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = (i + 1.0) / points;
        const IdentityReport rep = fundamental_identity_residual(k, h, u, grid);
        ctx.claim({name + ": max residual", 0.0, rep.max_residual, ctx.tol(tolerance), "at-most", false, true,
                   "worst at t = " + num(rep.worst_t)});
        ctx.check(name + ": convexity inequality margin", 0.0, rep.convexity_margin, 1e-10, "at-least");
    };
}

Runner parse_l2_inequality(const Reader& r, const std::string& name) {
    const int seeds = r.integer_in("seeds", 100, 1, 100000);
    const int steps = r.integer_in("steps", 50, 2, 100000);
    const int points = r.integer_in("points", 64, 1, 1000000);
    const double alpha = r.number("alpha", 0.5);
    if (!(alpha > 0.0 && alpha < 1.0)) r.error("alpha", "must lie in (0, 1)");
    return [=](Context& ctx) {
        const double h = 1.0 / steps;
        // k_i = g_{1-alpha}((i + 1/2) h): positive and decreasing.
        std::vector<double> k(static_cast<std::size_t>(steps));
        for (int i = 0; i < steps; ++i) k[static_cast<std::size_t>(i)] = std::pow((i + 0.5) * h, -alpha) / std::tgamma(1.0 - alpha);
        const auto m = static_cast<std::size_t>(points);
        int failures = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (int seed = 0; seed < seeds; ++seed) {
            const std::vector<double> field = random_smooth_field(static_cast<std::uint64_t>(seed), static_cast<std::size_t>(steps) + 1, m);
            const std::span<const double> all(field);
            const InequalityReport rep = l2_norm_inequality_check(k, all.subspan(m), all.first(m), 1.0 / points);
            failures += !rep.passed;
            worst = std::min(worst, rep.min_margin / std::max(rep.scale, 1.0));
        }
        ctx.claim({name + ": failing seeds", 0.0, static_cast<double>(failures), 0.0, "at-most", false, true,
                   std::to_string(seeds) + " seeds; smallest scaled margin " + num(worst)});
    };
}

Runner parse_kochubei(const Reader& r, const std::string& name) {
    const double alpha = r.number("alpha", 0.5);
    if (!(alpha > 0.0 && alpha < 1.0)) r.error("alpha", "must lie in (0, 1)");
    const int d = dimension_of(r);
    const std::vector<double> times = parse_times(r, "times");
    const std::vector<double> ys = log_grid(r, "y", 1e-3, 30.0, 41);
    return [=](Context& ctx) {
        const KochubeiReport rep = kochubei_bound_check(alpha, d, times, ys);
        for (const BoundFit& f : rep.fits) {
            const double change = std::abs(f.refined_constant / f.constant - 1.0);
            ctx.verdict({name + ": " + f.name + " constant change under refinement", 0.0, change, 0.1, "at-most",
                         f.finite && f.stable, true,
                         "C = " + num(f.constant) + (f.sigma > 0.0 ? ", sigma = " + num(f.sigma) : std::string())});
        }
    };
}

// ---- fundamental solution --------------------------------------------------

Runner parse_z_lp_slope(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const int dim = dimension_of(r);
    const double p = r.number("p");
    if (!(p >= 1.0)) r.error("p", "must be >= 1");
    const std::vector<double> times = times_of(r, d);
    const auto window = window_of(r, times);
    const double tolerance = r.positive("tolerance", 0.05);
    return [=](Context& ctx) {
        const RelaxationModel& model = ctx.model(spec, times);
        std::vector<LpNormResult> res(times.size());
        parallel_for(times.size(), default_threads(), [&](std::size_t i) { res[i] = z_lp_norm(model.at(times[i]), dim, p); });
        std::size_t not_finite = 0;
        std::vector<double> values;
        for (const LpNormResult& x : res) {
            not_finite += x.status != NormStatus::finite;
            values.push_back(x.value);
        }
        ctx.check(name + ": times classified finite", static_cast<double>(times.size()),
                   static_cast<double>(times.size() - not_finite), 0.0, "at-least");
        if (not_finite > 0) return;
        const double rate = rate_of([&](double t) { return model.pair().cumulative_l(t); }, times, window.first, window.second);
        const double target = -0.5 * dim * (1.0 - 1.0 / p) * rate;
        ctx.series(name, times, values);
        FitRecord f = record_fit(name, times, values, window.first, window.second, target, ctx.tol(tolerance));
        ctx.check(name + ": slope", target, f.fit.slope, f.tolerance, "within");
        ctx.fit(std::move(f));
    };
}

Runner parse_z_lp_divergence(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const int dim = dimension_of(r);
    const double p = r.number("p");
    if (!(p >= 1.0)) r.error("p", "must be >= 1");
    const double t = r.positive("t", 10.0);
    const std::string expect = r.choice("expect", "divergent", {"divergent", "finite"});
    return [=](Context& ctx) {
        const std::vector<double> at{t};
        const LpNormResult res = z_lp_norm(ctx.model(spec, at).at(t), dim, p);
        const bool confirmed = norm_status_name(res.status) == expect;
        const std::size_t n = res.increments.size();
        const double ratio = n >= 2 ? res.increments[n - 1] / res.increments[n - 2] : nan;
        // Running totals against the inner radius reached by each halving.
        std::vector<double> radii(res.totals.size());
        for (std::size_t k = 0; k < radii.size(); ++k) radii[k] = res.r_min * std::ldexp(1.0, static_cast<int>(radii.size() - 1 - k));
        ctx.series(name + "-totals-by-rmin", radii, res.totals);
        ctx.verdict({name + ": core increment ratio per halving", expect == "divergent" ? 1.0 : 0.0, ratio, 0.0,
                     "classified", confirmed, true,
                     std::string(expect == "divergent" ? "divergence" : "finiteness") + " expected: " +
                         (confirmed ? "confirmed" : std::string("not confirmed (") + norm_status_name(res.status) + ")") +
                         "; literal 10% rule " + (res.literal_rule_divergent ? "divergent" : "not divergent")});
    };
}

Runner parse_z_weak_slope(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const int dim = dimension_of(r);
    if (dim < 3) r.error("dimension", "the weak norm of Z needs d >= 3");
    const std::vector<double> times = times_of(r, d);
    const auto window = window_of(r, times);
    const double tolerance = r.positive("tolerance", 0.05);
    return [=](Context& ctx) {
        const RelaxationModel& model = ctx.model(spec, times);
        std::vector<double> values(times.size());
        parallel_for(times.size(), default_threads(), [&](std::size_t i) { values[i] = z_weak_lp(model.at(times[i]), dim).value; });
        const double rate = rate_of([&](double t) { return model.pair().cumulative_l(t); }, times, window.first, window.second);
        const double target = -rate;
        ctx.series(name, times, values);
        FitRecord f = record_fit(name, times, values, window.first, window.second, target, ctx.tol(tolerance));
        ctx.check(name + ": slope", target, f.fit.slope, f.tolerance, "within");
        ctx.fit(std::move(f));
    };
}

Runner parse_mass(const Reader& r, const Defaults& d, const std::string& name) {
    const std::vector<PairSpec> specs = pairs_of(r, d);
    const std::vector<int> dims = r.integers("dimensions", {1, 2, 3, 4});
    for (int x : dims) {
        if (x < 1 || x > 64) r.error("dimensions", "must lie in [1, 64]");
    }
    const std::vector<double> times = times_of(r, d);
    const double tolerance = r.positive("tolerance", 1e-3);
    return [=](Context& ctx) {
        for (const PairSpec& spec : specs) {
            const RelaxationModel& model = ctx.model(spec, times);
            for (int dim : dims) {
                std::vector<MassReport> reps(times.size());
                parallel_for(times.size(), default_threads(), [&](std::size_t i) {
                    const SymbolSlice slice = model.at(times[i]);
                    reps[i] = mass_check(z_radial_hankel(slice, dim, default_radii(slice)));
                });
                double deviation = 0.0, negativity = 0.0;
                std::vector<double> masses;
                for (const MassReport& m : reps) {
                    deviation = std::max(deviation, m.deviation);
                    negativity = std::min(negativity, m.min_value / m.max_value);
                    masses.push_back(m.mass);
                }
                const std::string label = name + ": " + model.pair().describe() + ", d = " + std::to_string(dim);
                ctx.series(name + "-" + spec.type + "-d" + std::to_string(dim), times, masses);
                ctx.check(label + " max |mass - 1|", 0.0, deviation, ctx.tol(tolerance), "at-most");
                ctx.check(label + " min Z / max Z", 0.0, negativity, 1e-6, "at-least");
            }
        }
    };
}

Runner parse_msd(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const std::vector<int> dims = r.integers("dimensions", {1, 2, 3});
    for (int x : dims) {
        if (x < 1 || x > 64) r.error("dimensions", "must lie in [1, 64]");
    }
    const std::vector<double> times = times_of(r, d);
    const double tolerance = r.positive("tolerance", 0.01);
    return [=](Context& ctx) {
        const RelaxationModel& model = ctx.model(spec, times);
        for (int dim : dims) {
            std::vector<double> msd(times.size());
            parallel_for(times.size(), default_threads(), [&](std::size_t i) {
                const SymbolSlice slice = model.at(times[i]);
                msd[i] = msd_from_profile(z_radial_hankel(slice, dim, default_radii(slice)));
            });
            double worst = 0.0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double expected = 2.0 * dim * model.pair().cumulative_l(times[i]);
                worst = std::max(worst, std::abs(msd[i] / expected - 1.0));
            }
            ctx.series(name + "-d" + std::to_string(dim), times, msd);
            ctx.check(name + ": d = " + std::to_string(dim) + " max relative deviation from 2d(1*l)", 0.0, worst,
                       ctx.tol(tolerance), "at-most");
        }
    };
}

// ---- decay -----------------------------------------------------------------

Runner parse_slope(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const DatumSpec datum = datum_of(r, d);
    SweepSpec sweep;
    sweep.dimension = dimension_of(r);
    sweep.r = r.number("r", 2.0);
    if (!(sweep.r >= 1.0)) r.error("r", "must be >= 1");
    const std::string kind = r.choice("norm", "lebesgue", {"lebesgue", "weak", "gradient"});
    sweep.kind = kind == "weak" ? NormKind::weak : kind == "gradient" ? NormKind::gradient : NormKind::lebesgue;
    sweep.path = *parse_norm_path(r.choice("path", "grid", {"grid", "radial", "hankel"}));
    if (sweep.path == NormPath::grid && sweep.dimension > 3) r.error("path", "the grid path needs d <= 3");
    if (sweep.path == NormPath::radial && (sweep.r != 2.0 || sweep.kind == NormKind::weak)) {
        r.error("path", "the radial path computes L2 norms of u and grad u only");
    }
    if (sweep.path == NormPath::hankel && sweep.kind == NormKind::gradient) {
        r.error("path", "gradient norms use the grid or radial path");
    }
    sweep.times = times_of(r, d);
    const auto window = window_of(r, sweep.times);
    const std::string psi = r.choice("psi", "cumulative-l", {"cumulative-l", "t"});
    const double tolerance = r.positive("tolerance", 0.05);
    return [=](Context& ctx) {
        const RelaxationModel& model = ctx.model(spec, sweep.times);
        std::function<double(double)> scale;
        if (psi == "t") scale = [](double t) { return t; };
        const SweepResult res = decay_sweep(model, datum.build(), sweep, ctx.tol(tolerance), window, scale);
        ctx.series(name, res.times, res.values);
        FitRecord f{name, res.fit, res.tail_fit, res.target, res.tolerance, res.power_law, res.passed};
        ctx.claim({name + ": slope", res.target, res.fit.slope, res.tolerance, "within", false, true,
                   std::string(norm_kind_name(sweep.kind)) + " r = " + num(sweep.r) + ", d = " +
                       std::to_string(sweep.dimension) + ", " + norm_path_name(sweep.path) + " path, time scale " + psi});
        ctx.fit(std::move(f));
    };
}

Runner parse_band(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const DatumSpec datum = datum_of(r, d);
    SweepSpec sweep;
    sweep.dimension = dimension_of(r);
    sweep.path = NormPath::radial;
    sweep.times = times_of(r, d);
    if (sweep.times.front() <= 1.0) r.error("times", "the log weight needs t > 1");
    const double power = r.has("log_power") ? r.positive("log_power") : std::min(1.0, 0.25 * sweep.dimension);
    const double max_ratio = r.positive("max_ratio", 4.0);
    return [=](Context& ctx) {
        const RelaxationModel& model = ctx.model(spec, sweep.times);
        const std::vector<double> norms = norm_series(model, datum.build(), sweep);
        const BandReport b = band(sweep.times, norms, [power](double t) { return std::pow(std::log(t), power); });
        ctx.series(name, b.times, b.values);
        ctx.claim({name + ": band ratio B/b", max_ratio, b.ratio, 0.0, "at-most", false, true,
                   "|u|_2 (log t)^" + num(power) + " in [" + num(b.lower) + ", " + num(b.upper) + "]"});
    };
}

Runner parse_lower_bound(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    const DatumSpec datum = datum_of(r, d);
    const int dim = dimension_of(r);
    const std::vector<double> times = times_of(r, d);
    return [=](Context& ctx) {
        const RelaxationModel& model = ctx.model(spec, times);
        const LowerBoundReport rep = lower_bound_ratio(model, datum.build(), dim, times);
        ctx.series(name, rep.times, rep.ratios);
        ctx.verdict({name + ": infimum over head infimum", 0.5, rep.infimum / rep.head_infimum, 0.0, "at-least",
                     rep.passed, true,
                     rep.hypothesis_met ? "infimum " + num(rep.infimum) : std::string("hypothesis not met: zero mass")});
    };
}

Runner parse_profile(const Reader& r, const Defaults& d, const std::string& name) {
    const PairSpec spec = pair_of(r, d);
    if (spec.type != "fractional" || spec.alpha >= 1.0) r.error("pair", "the profile check needs a fractional pair with alpha < 1");
    DatumSpec datum = datum_of(r, d);
    const int dim = dimension_of(r);
    const double p = r.number("p");
    const std::vector<double> times = times_of(r, d);
    const double tolerance = r.positive("tolerance", 0.07);
    if (dim > 3) r.error("dimension", "the profile check runs on grids, d <= 3");
    if (!(p >= 1.0 && (dim == 1 || p < dim / (dim - 1.0)))) r.error("p", "must lie in [1, d/(d-1))");
    return [=](Context& ctx) {
        const ProfileReport rep = large_time_profile(spec.alpha, dim, p, datum.build(), times);
        ctx.series(name, rep.times, rep.values);
        ctx.check(name + ": decreasing", 1.0, rep.decreasing ? 1.0 : 0.0, 0.0, "at-least");
        FitRecord f = record_fit(name, rep.times, rep.values, rep.times.front(), rep.times.back(), -0.5 * spec.alpha,
                                 ctx.tol(tolerance));
        f.passed = f.fit.slope <= f.target + f.tolerance;
        ctx.claim({name + ": slope", -0.5 * spec.alpha, rep.fit.slope, ctx.tol(tolerance), "at-most", false, true,
                   "mass " + num(rep.mass) + ", first moment " + num(rep.first_moment)});
        ctx.fit(std::move(f));
    };
}

// ---- energy ----------------------------------------------------------------

Runner parse_ode_decay(const Reader& r, const std::string& name) {
    const double alpha = r.number("alpha");
    if (!(alpha > 0.0 && alpha < 1.0)) r.error("alpha", "must lie in (0, 1)");
    const int dim = dimension_of(r);
    const double mu = r.positive("mu", 1.0), w0 = r.positive("w0", 1.0);
    const double horizon = r.positive("horizon", 1e12);
    const double ratio = r.positive("ratio", 1.02);
    if (!(ratio > 1.0)) r.error("ratio", "must exceed 1");
    const double tolerance = r.positive("tolerance", 0.03);
    return [=](Context& ctx) {
        const double gamma = 1.0 + 4.0 / dim;
        const std::vector<double> coarse = ode_mesh(horizon, ratio);
        const std::vector<double> fine = ode_mesh(horizon, std::sqrt(ratio));
        const FracOdeSolution a = solve_fractional_ode(alpha, mu, gamma, w0, coarse);
        const FracOdeSolution b = solve_fractional_ode(alpha, mu, gamma, w0, fine);
        const PowerBoundReport rep = power_bound_fit(a, b);
        ctx.series(name, std::vector<double>(a.times.begin() + 1, a.times.end()),
                   std::vector<double>(a.values.begin() + 1, a.values.end()));
        const double target = -alpha * dim / (dim + 4.0);
        FitRecord f = record_fit(name, a.times, a.values, horizon / 100.0, horizon, target, ctx.tol(tolerance));
        ctx.check(name + ": slope", target, f.fit.slope, f.tolerance, "within");
        ctx.fit(std::move(f));
        const double change = std::max(std::abs(rep.c1 / rep.refined_c1 - 1.0), std::abs(rep.c2 / rep.refined_c2 - 1.0));
        ctx.verdict({name + ": c1, c2 change under refinement", 0.0, change, 0.01, "at-most", rep.finite && rep.stable,
                     true, "c1 = " + num(rep.c1) + ", c2 = " + num(rep.c2)});
    };
}

Runner parse_ode_oracle(const Reader& r, const std::string& name) {
    const double alpha = r.number("alpha", 0.5);
    if (!(alpha > 0.0 && alpha <= 1.0)) r.error("alpha", "must lie in (0, 1]");
    const double mu = r.positive("mu", 1.0);
    const double horizon = r.positive("horizon", 100.0);
    const double ratio = r.positive("ratio", 1.01);
    if (!(ratio > 1.0)) r.error("ratio", "must exceed 1");
    const double tolerance = r.positive("tolerance", 1e-4);
    return [=](Context& ctx) {
        const std::vector<double> grid = ode_mesh(horizon, ratio);
        const FracOdeSolution s = solve_fractional_ode(alpha, mu, 1.0, 1.0, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(s.values[i] - special::mittag_leffler_neg(alpha, mu * std::pow(grid[i], alpha))));
        }
        ctx.check(name + ": max |w - E_alpha(-mu t^alpha)|", 0.0, worst, ctx.tol(tolerance), "at-most");
    };
}

// ---------------------------------------------------------------------------

const std::map<std::string, std::set<std::string>>& allowed_checks() {
    static const std::map<std::string, std::set<std::string>> table{
        {"relaxation", {"ml-envelope", "volterra-oracle", "pair-certificate", "upgrade-constant"}},
        {"bounds-suite",
         {"smu-bounds", "complete-monotonicity", "multiplier", "taylor-derivative", "fundamental-identity",
          "l2-inequality", "kochubei"}},
        {"fundsol", {"z-lp-slope", "z-lp-divergence", "z-weak-slope", "mass", "msd", "kochubei"}},
        {"decay-sweep", {"slope", "band", "lower-bound", "profile", "upgrade-constant"}},
        {"energy", {"ode-decay", "ode-oracle", "fundamental-identity", "l2-inequality"}},
    };
    return table;
}

CheckPlan parse_check(const Reader& r, const std::string& kind, const Defaults& d, std::size_t index) {
    CheckPlan c;
    c.type = r.text("check");
    const auto& allowed = allowed_checks().at(kind);
    if (!allowed.contains(c.type)) {
        std::string listing;
        for (const auto& a : allowed) listing += (listing.empty() ? "" : ", ") + a;
        r.error("check", "\"" + c.type + "\" is not a " + kind + " check (expected one of: " + listing + ")");
    }
    c.name = r.text("name", c.type + "-" + std::to_string(index + 1));
    const std::string& n = c.name;
    const std::string& t = c.type;
    if (t == "ml-envelope") c.run = parse_ml_envelope(r, n);
    else if (t == "volterra-oracle") c.run = parse_volterra_oracle(r, n);
    else if (t == "pair-certificate") c.run = parse_pair_certificate(r, d, n);
    else if (t == "upgrade-constant") c.run = parse_upgrade_constant(r, d, n);
    else if (t == "smu-bounds") c.run = parse_smu_bounds(r, d, n);
    else if (t == "complete-monotonicity") c.run = parse_complete_monotonicity(r, d, n);
    else if (t == "multiplier") c.run = parse_multiplier(r, d, n);
    else if (t == "taylor-derivative") c.run = parse_taylor(r, d, n);
    else if (t == "fundamental-identity") c.run = parse_fundamental_identity(r, n);
    else if (t == "l2-inequality") c.run = parse_l2_inequality(r, n);
    else if (t == "kochubei") c.run = parse_kochubei(r, n);
    else if (t == "z-lp-slope") c.run = parse_z_lp_slope(r, d, n);
    else if (t == "z-lp-divergence") c.run = parse_z_lp_divergence(r, d, n);
    else if (t == "z-weak-slope") c.run = parse_z_weak_slope(r, d, n);
    else if (t == "mass") c.run = parse_mass(r, d, n);
    else if (t == "msd") c.run = parse_msd(r, d, n);
    else if (t == "slope") c.run = parse_slope(r, d, n);
    else if (t == "band") c.run = parse_band(r, d, n);
    else if (t == "lower-bound") c.run = parse_lower_bound(r, d, n);
    else if (t == "profile") c.run = parse_profile(r, d, n);
    else if (t == "ode-decay") c.run = parse_ode_decay(r, n);
    else if (t == "ode-oracle") c.run = parse_ode_oracle(r, n);
    r.finish();
    return c;
}

// ---------------------------------------------------------------------------
// Output

void write_json(std::ostream& out, const json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out << ",\n";
                first = false;
                out << inner << json(key).dump() << ": ";
                write_json(out, value, indent + 1);
            }
            out << '\n' << pad << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) out << ",\n";
                out << inner;
                write_json(out, j[i], indent + 1);
            }
            out << '\n' << pad << ']';
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            out << (std::isfinite(x) ? num(x) : "null");
            return;
        }
        default: out << j.dump();
    }
}

void save_json(const std::filesystem::path& file, const json& j) {
    std::ofstream out(file);
    if (!out) fail(ErrorCode::io, "cannot write " + file.string());
    write_json(out, j, 0);
    out << '\n';
}

json fit_json(const DecayFit& f) {
    return json{{"window", json::array({f.t_lo, f.t_hi})},
                {"slope", f.slope},
                {"intercept", f.intercept},
                {"max_relative_residual", f.max_relative_residual},
                {"points", f.points}};
}

// Doubles as JSON numbers; NaN becomes null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string format_cell(const json& v) {
    if (v.is_null()) return "-";
    if (v.is_number_float()) return num(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::io, "cannot read " + file.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::io, file.string() + ": " + e.what());
    }
}

std::string safe_file_name(const std::string& name) {
    std::string out;
    for (char ch : name) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.') ? ch : '_';
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

struct Experiment::Plan {
    std::string name;
    std::string kind;
    std::string description;
    std::string output;
    std::vector<CheckPlan> checks;
};

Experiment::Experiment(std::unique_ptr<Plan> plan) : plan_(std::move(plan)) {}
Experiment::Experiment(Experiment&&) noexcept = default;
Experiment& Experiment::operator=(Experiment&&) noexcept = default;
Experiment::~Experiment() = default;

const std::string& Experiment::name() const { return plan_->name; }
const std::string& Experiment::kind() const { return plan_->kind; }
const std::string& Experiment::description() const { return plan_->description; }
const std::string& Experiment::output() const { return plan_->output; }

Experiment Experiment::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::config, "cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

Experiment Experiment::parse(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') ++line, column = 1;
            else ++column;
        }
        std::string what = e.what();
        if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        fail(ErrorCode::config, source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON: " + what);
    }
    const Reader r(root, "", source);
    auto plan = std::make_unique<Plan>();
    plan->kind = r.text("kind");
    if (!allowed_checks().contains(plan->kind)) {
        r.error("kind", "unknown experiment kind \"" + plan->kind +
                            "\" (expected relaxation, fundsol, decay-sweep, energy or bounds-suite)");
    }
    plan->name = r.text("name");
    if (plan->name.empty()) r.error("name", "must not be empty");
    plan->description = r.text("description", "");
    plan->output = r.text("output", "");

    Defaults d;
    d.base = std::filesystem::path(source).parent_path();
    if (r.has("pair")) d.pair = parse_pair(r.child("pair"), d.base);
    if (r.has("datum")) d.datum = parse_datum(r.child("datum"));
    if (r.has("times")) d.times = parse_times(r, "times");

    const std::vector<Reader> checks = r.children("checks");
    std::set<std::string> names;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        plan->checks.push_back(parse_check(checks[i], plan->kind, d, i));
        if (!names.insert(plan->checks.back().name).second) {
            checks[i].error("name", "duplicate check name \"" + plan->checks.back().name + "\"");
        }
    }
    r.finish();
    return Experiment(std::move(plan));
}

ExperimentResult Experiment::run(const RunOptions& options) const {
    require(options.tolerance_scale > 0.0 && std::isfinite(options.tolerance_scale), ErrorCode::config,
            "tolerance scale must be positive");
    if (options.threads > 0) set_default_threads(options.threads);
    ExperimentResult result;
    result.name = plan_->name;
    result.kind = plan_->kind;
    Context ctx(result, options.tolerance_scale);
    for (const CheckPlan& c : plan_->checks) {
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(ctx);
        } catch (const Error& e) {
            throw Error(e.code(), "check \"" + c.name + "\" (" + c.type + "): " + e.what());
        }
        ctx.timing(c.name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return result;
}

bool ExperimentResult::passed() const { return failed_claims() == 0; }

std::size_t ExperimentResult::failed_claims() const {
    return static_cast<std::size_t>(
        std::count_if(claims.begin(), claims.end(), [](const Claim& c) { return c.gating && !c.passed; }));
}

void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io, "cannot create output directory " + dir.string() + ": " + ec.message());

    {
        std::ofstream out(dir / "series.csv");
        if (!out) fail(ErrorCode::io, "cannot write " + (dir / "series.csv").string());
        out << "series,t,norm\n";
        for (const Series& s : result.series) {
            for (std::size_t i = 0; i < s.t.size(); ++i) out << s.name << ',' << num(s.t[i]) << ',' << num(s.values[i]) << '\n';
        }
    }

    json fits = json::array();
    for (const FitRecord& f : result.fits) {
        json entry = fit_json(f.fit);
        entry["series"] = f.series;
        entry["target"] = f.target;
        entry["tolerance"] = f.tolerance;
        entry["pass"] = f.passed;
        entry["tail_slope"] = f.tail_fit.points > 0 ? json(f.tail_fit.slope) : json(nullptr);
        entry["power_law"] = f.power_law;
        fits.push_back(entry);
    }
    save_json(dir / "fit.json", json{{"name", result.name}, {"fits", fits}});

    json claims = json::array();
    for (const Claim& c : result.claims) {
        claims.push_back(json{{"claim", c.name},
                              {"target", number_or_null(c.target)},
                              {"measured", number_or_null(c.measured)},
                              {"tolerance", number_or_null(c.tolerance)},
                              {"comparison", c.comparison},
                              {"pass", c.passed},
                              {"gating", c.gating},
                              {"detail", c.detail}});
    }
    save_json(dir / "report.json", json{{"name", result.name},
                                        {"kind", result.kind},
                                        {"passed", result.passed()},
                                        {"failed_claims", result.failed_claims()},
                                        {"claims", claims}});

    json timings = json::array();
    for (const Timing& t : result.timings) timings.push_back(json{{"what", t.what}, {"seconds", t.seconds}});
    save_json(dir / "timing.json", json{{"name", result.name}, {"timings", timings}});
}

RenderedReport emit_report(const std::filesystem::path& dir) {
    std::vector<std::string> missing;
    for (const char* f : {"report.json", "fit.json", "series.csv"}) {
        if (!std::filesystem::exists(dir / f)) missing.emplace_back(f);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        fail(ErrorCode::io, "missing artifacts in " + dir.string() + ": " + list +
                                "; produce them with `run <config.json> --out " + dir.string() + "`");
    }
    const json report = read_json_file(dir / "report.json");
    const json fits = read_json_file(dir / "fit.json");

    RenderedReport out;
    out.passed = report.value("passed", false);

    std::vector<std::array<std::string, 6>> rows{{"claim", "target", "measured", "tolerance", "pass", "detail"}};
    for (const json& c : report.at("claims")) {
        std::string verdict = c.at("pass").get<bool>() ? "pass" : "FAIL";
        if (!c.value("gating", true)) verdict = "info";
        rows.push_back({c.at("claim").get<std::string>(), format_cell(c.at("target")), format_cell(c.at("measured")),
                        format_cell(c.at("tolerance")), verdict, c.value("detail", "")});
    }
    std::array<std::size_t, 5> width{};
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < width.size(); ++k) width[k] = std::max(width[k], row[k].size());
    }
    std::ostringstream text;
    text << report.value("name", "") << " (" << report.value("kind", "") << "): "
         << (out.passed ? "all claims pass" : std::to_string(report.value("failed_claims", 0)) + " claim(s) failed")
         << "\n\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < width.size(); ++k) {
            text << row[k] << std::string(width[k] - row[k].size() + 2, ' ');
        }
        text << row[5] << '\n';
    }
    if (!fits.at("fits").empty()) {
        text << "\nfits\n";
        for (const json& f : fits.at("fits")) {
            text << "  " << f.at("series").get<std::string>() << ": slope " << format_cell(f.at("slope")) << " on ["
                 << format_cell(f.at("window")[0]) << ", " << format_cell(f.at("window")[1]) << "], target "
                 << format_cell(f.at("target")) << ", tail slope " << format_cell(f.at("tail_slope"))
                 << (f.at("power_law").get<bool>() ? "" : " (not a clean power law)") << '\n';
        }
    }

    // Split series.csv into gnuplot-ready files.
    std::ifstream in(dir / "series.csv");
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::vector<std::string>> columns;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        const std::string name = line.substr(0, comma);
        std::string rest = line.substr(comma + 1);
        std::replace(rest.begin(), rest.end(), ',', ' ');
        if (!columns.contains(name)) order.push_back(name);
        columns[name].push_back(rest);
    }
    if (!order.empty()) {
        const std::filesystem::path plots = dir / "plot";
        std::filesystem::create_directories(plots);
        text << "\nplot data\n";
        for (const std::string& name : order) {
            const std::filesystem::path file = plots / (safe_file_name(name) + ".dat");
            std::ofstream dat(file);
            if (!dat) fail(ErrorCode::io, "cannot write " + file.string());
            dat << "# t " << name << '\n';
            for (const std::string& row : columns[name]) dat << row << '\n';
            out.plot_files.push_back(file);
            text << "  " << file.string() << '\n';
        }
    }
    out.text = text.str();
    return out;
}

std::vector<PresetInfo> list_presets(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) fail(ErrorCode::io, "preset directory " + dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<PresetInfo> out;
    for (const auto& f : files) {
        const Experiment e = Experiment::load(f);
        out.push_back({e.name(), e.kind(), e.description(), f});
    }
    return out;
}

}  // namespace subdiff
