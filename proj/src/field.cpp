#include "subdiff/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>

#include "subdiff/errors.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/quadrature.hpp"

namespace subdiff {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// ---------------------------------------------------------------------------
// FFTW plumbing.  Planning is not thread safe, execution of distinct plans is.

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {
        require(p != nullptr, ErrorCode::internal, "FFTW planning failed");
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

// Half spectrum of an N^d real grid: axes N x ... x N x (N/2 + 1).
struct Spectrum {
    int d;
    int n;
    ComplexBuffer data;
    std::size_t size;
};

std::vector<int> dims(int d, int n) { return std::vector<int>(static_cast<std::size_t>(d), n); }

Spectrum allocate_spectrum(int d, int n) {
    const std::size_t size = ipow(static_cast<std::size_t>(n), d - 1) * static_cast<std::size_t>(n / 2 + 1);
    Spectrum s{d, n, ComplexBuffer(fftw_alloc_complex(size)), size};
    require(s.data != nullptr, ErrorCode::internal, "FFTW allocation failed");
    return s;
}

Spectrum forward(const GridField& field) {
    const int d = field.dimension();
    const int n = field.points();
    Spectrum spec = allocate_spectrum(d, n);
    RealBuffer in(fftw_alloc_real(field.size()));
    require(in != nullptr, ErrorCode::internal, "FFTW allocation failed");
    const std::vector<int> shape = dims(d, n);
    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = std::make_unique<Plan>(fftw_plan_dft_r2c(d, shape.data(), in.get(), spec.data.get(), FFTW_ESTIMATE));
    }
    std::copy(field.values().begin(), field.values().end(), in.get());
    plan->execute();
    return spec;
}

// Unnormalised inverse, divided by N^d.
GridField inverse(Spectrum& spec, double extent) {
    const int d = spec.d;
    const int n = spec.n;
    GridField out(d, extent, n);
    RealBuffer buf(fftw_alloc_real(out.size()));
    require(buf != nullptr, ErrorCode::internal, "FFTW allocation failed");
    const std::vector<int> shape = dims(d, n);
    std::unique_ptr<Plan> plan;
    {
        std::lock_guard lock(planner_mutex());
        // c2r destroys its input; the caller's spectrum is scratch by contract.
        plan = std::make_unique<Plan>(fftw_plan_dft_c2r(d, shape.data(), spec.data.get(), buf.get(), FFTW_ESTIMATE));
    }
    plan->execute();
    const double scale = 1.0 / static_cast<double>(out.size());
    std::span<double> v = out.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = buf[i] * scale;
    return out;
}

// Visits every half-spectrum entry with its signed integer frequency vector.
template <class F>
void for_each_mode(int d, int n, F&& f) {
    const int half = n / 2 + 1;
    std::array<int, 3> idx{0, 0, 0};
    std::array<int, 3> freq{0, 0, 0};
    const std::size_t total = ipow(static_cast<std::size_t>(n), d - 1) * static_cast<std::size_t>(half);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        idx[d - 1] = static_cast<int>(rem % static_cast<std::size_t>(half));
        rem /= static_cast<std::size_t>(half);
        for (int a = d - 2; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        for (int a = 0; a < d; ++a) freq[a] = idx[a] < n / 2 ? idx[a] : idx[a] - n;
        if (d >= 1 && idx[d - 1] == n / 2) freq[d - 1] = n / 2;
        f(flat, std::span<const int>(freq.data(), static_cast<std::size_t>(d)));
    }
}

long long squared_norm(std::span<const int> k) {
    long long m = 0;
    for (int v : k) m += static_cast<long long>(v) * v;
    return m;
}

int parity(std::span<const int> k) {
    int p = 0;
    for (int v : k) p += v;
    return p & 1;
}

// s(t, |xi|^2) at every integer |k|^2 that occurs on the grid.
class SymbolCache {
public:
    SymbolCache(const std::function<double(double)>& symbol, int d, int n, double extent) : dxi_(2.0 * std::numbers::pi / extent) {
        const long long max_m = static_cast<long long>(d) * (n / 2) * (n / 2);
        if (d == 1) {
            direct_ = true;
            symbol_ = &symbol;
            return;
        }
        std::vector<char> used(static_cast<std::size_t>(max_m) + 1, 0);
        for_each_mode(d, n, [&](std::size_t, std::span<const int> k) { used[static_cast<std::size_t>(squared_norm(k))] = 1; });
        values_.assign(used.size(), 0.0);
        std::vector<std::size_t> list;
        for (std::size_t m = 0; m < used.size(); ++m) {
            if (used[m]) list.push_back(m);
        }
        parallel_for(list.size(), default_threads(), [&](std::size_t i) {
            const std::size_t m = list[i];
            values_[m] = symbol(static_cast<double>(m) * dxi_ * dxi_);
        });
    }
    [[nodiscard]] double operator()(long long m) const {
        if (direct_) return (*symbol_)(static_cast<double>(m) * dxi_ * dxi_);
        return values_[static_cast<std::size_t>(m)];
    }

private:
    double dxi_;
    bool direct_ = false;
    const std::function<double(double)>* symbol_ = nullptr;
    std::vector<double> values_;
};

void validate_grid(int dimension, double extent, int points) {
    require(dimension >= 1 && dimension <= 3, ErrorCode::domain, "grid: dimension must be 1, 2 or 3");
    require(power_of_two(points), ErrorCode::domain, "grid: point count must be a power of two");
    require(extent > 0.0 && std::isfinite(extent), ErrorCode::domain, "grid: extent must be positive");
}

void check_shell(const GridField& u0) {
    const int d = u0.dimension();
    const int n = u0.points();
    double peak = 0.0;
    for (double v : u0.values()) peak = std::max(peak, std::abs(v));
    double shell = 0.0;
    const std::span<const double> v = u0.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t rem = i;
        bool outer = false;
        for (int a = 0; a < d; ++a) {
            const int m = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
            outer = outer || m == 0 || m == n - 1;
        }
        if (outer) shell = std::max(shell, std::abs(v[i]));
    }
    if (shell >= 1e-12 * peak && shell > 0.0) {
        fail(ErrorCode::domain, "evolve: datum not negligible on the boundary shell (" + num(shell / peak) +
                                    " of its maximum); enlarge the box, e.g. L = " + num(2.0 * u0.extent()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// GridField

GridField::GridField(int dimension, double extent, int points) : d_(dimension), extent_(extent), n_(points) {
    validate_grid(dimension, extent, points);
    values_.assign(ipow(static_cast<std::size_t>(points), dimension), 0.0);
}

GridField::GridField(int dimension, double extent, int points, std::vector<double> values)
    : GridField(dimension, extent, points) {
    require(values.size() == values_.size(), ErrorCode::domain, "GridField: value count does not match N^d");
    for (double v : values) require(std::isfinite(v), ErrorCode::domain, "GridField: values must be finite");
    values_ = std::move(values);
}

double GridField::cell_volume() const { return std::pow(spacing(), d_); }

double GridField::radius_squared(std::size_t i) const {
    double r2 = 0.0;
    for (int a = 0; a < d_; ++a) {
        const double x = coordinate(static_cast<int>(i % static_cast<std::size_t>(n_)));
        r2 += x * x;
        i /= static_cast<std::size_t>(n_);
    }
    return r2;
}

GridField GridField::sample(int dimension, double extent, int points,
                            const std::function<double(std::span<const double>)>& f) {
    GridField g(dimension, extent, points);
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < g.values_.size(); ++i) {
        std::size_t rem = i;
        for (int a = dimension - 1; a >= 0; --a) {
            x[a] = g.coordinate(static_cast<int>(rem % static_cast<std::size_t>(points)));
            rem /= static_cast<std::size_t>(points);
        }
        g.values_[i] = f(std::span<const double>(x.data(), static_cast<std::size_t>(dimension)));
    }
    return g;
}

void GridField::write_csv(std::ostream& out) const {
    static const char* names[] = {"x", "y", "z"};
    for (int a = 0; a < d_; ++a) out << names[a] << ',';
    out << "value\n";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        std::array<int, 3> m{};
        std::size_t rem = i;
        for (int a = d_ - 1; a >= 0; --a) {
            m[a] = static_cast<int>(rem % static_cast<std::size_t>(n_));
            rem /= static_cast<std::size_t>(n_);
        }
        for (int a = 0; a < d_; ++a) out << num(coordinate(m[a])) << ',';
        out << num(values_[i]) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Datum

Datum Datum::gaussian(double sigma, std::vector<double> centre) {
    require(sigma > 0.0, ErrorCode::domain, "Datum: sigma must be positive");
    Datum d;
    d.terms_.push_back({1.0, sigma});
    bool zero = true;
    for (double c : centre) zero = zero && c == 0.0;
    if (!zero) d.centre_ = std::move(centre);
    return d;
}

Datum Datum::gaussian_difference(double sigma1, double sigma2) {
    require(sigma1 > 0.0 && sigma2 > 0.0 && sigma1 != sigma2, ErrorCode::domain,
            "Datum: difference of Gaussians needs two distinct positive widths");
    Datum d;
    d.terms_.push_back({1.0, sigma1});
    d.terms_.push_back({-1.0, sigma2});
    return d;
}

Datum Datum::scaled_gaussian(double mass, double sigma) {
    Datum d = gaussian(sigma);
    d.terms_[0].weight = mass;
    return d;
}

double Datum::value(std::span<const double> x) const {
    const double dim = static_cast<double>(x.size());
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double c = a < centre_.size() ? centre_[a] : 0.0;
        r2 += (x[a] - c) * (x[a] - c);
    }
    double v = 0.0;
    for (const Term& t : terms_) {
        v += t.weight * std::pow(2.0 * std::numbers::pi * t.sigma * t.sigma, -0.5 * dim) *
             std::exp(-0.5 * r2 / (t.sigma * t.sigma));
    }
    return v;
}

std::complex<double> Datum::spectrum(std::span<const double> xi) const {
    double r2 = 0.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) {
        r2 += xi[a] * xi[a];
        if (a < centre_.size()) phase -= xi[a] * centre_[a];
    }
    double v = 0.0;
    for (const Term& t : terms_) v += t.weight * std::exp(-0.5 * t.sigma * t.sigma * r2);
    return std::polar(v, phase);
}

double Datum::radial_spectrum(double rho) const {
    require(radial(), ErrorCode::precondition, "Datum: radial spectrum needs a centred datum");
    double v = 0.0;
    for (const Term& t : terms_) v += t.weight * std::exp(-0.5 * t.sigma * t.sigma * rho * rho);
    return v;
}

double Datum::mass() const {
    double m = 0.0;
    for (const Term& t : terms_) m += t.weight;
    return m;
}

double Datum::first_moment_norm() const {
    double c2 = 0.0;
    for (double c : centre_) c2 += c * c;
    return std::abs(mass()) * std::sqrt(c2);
}

double Datum::support_radius() const {
    double sigma = 0.0;
    for (const Term& t : terms_) sigma = std::max(sigma, t.sigma);
    double c2 = 0.0;
    for (double c : centre_) c2 += c * c;
    return std::sqrt(c2) + sigma * std::sqrt(2.0 * std::log(1e16));
}

GridSize choose_grid(double cumulative_l, const Datum& datum, int dimension, const GridPolicy& policy) {
    require(dimension >= 1 && dimension <= 3, ErrorCode::domain, "choose_grid: dimension must be 1, 2 or 3");
    require(cumulative_l >= 0.0, ErrorCode::domain, "choose_grid: (1*l) must be nonnegative");
    const double extent = std::max(2.0 * policy.kappa * std::sqrt(cumulative_l), 2.4 * datum.support_radius());
    const int cap = dimension == 1 ? policy.max_points_1d : (dimension == 2 ? policy.max_points_2d : policy.max_points_3d);
    int n = 64;
    while (extent / n > policy.max_spacing && n < cap) n *= 2;
    return {extent, n, extent / n > policy.max_spacing};
}

// ---------------------------------------------------------------------------
// Evolution

GridField evolve(const SymbolSlice& symbol, const GridField& u0) {
    check_shell(u0);
    Spectrum spec = forward(u0);
    const std::function<double(double)> fn = [&](double mu) { return symbol(mu); };
    const SymbolCache cache(fn, u0.dimension(), u0.points(), u0.extent());
    for_each_mode(u0.dimension(), u0.points(), [&](std::size_t i, std::span<const int> k) {
        const double s = cache(squared_norm(k));
        spec.data[i][0] *= s;
        spec.data[i][1] *= s;
    });
    return inverse(spec, u0.extent());
}

namespace {

// Spectrum array of the grid function whose continuous transform is g(xi).
template <class G>
Spectrum spectral_samples(int d, double extent, int n, G&& g) {
    Spectrum spec = allocate_spectrum(d, n);
    const double dxi = 2.0 * std::numbers::pi / extent;
    const double scale = std::pow(static_cast<double>(n) / extent, d);
    std::array<double, 3> xi{};
    for_each_mode(d, n, [&](std::size_t i, std::span<const int> k) {
        for (int a = 0; a < d; ++a) xi[a] = dxi * k[a];
        // Node x_m = (m - N/2) dx contributes the phase (-1)^{k_1 + ... + k_d}.
        std::complex<double> v = g(std::span<const double>(xi.data(), static_cast<std::size_t>(d)), k) * scale;
        if (parity(k)) v = -v;
        spec.data[i][0] = v.real();
        spec.data[i][1] = v.imag();
    });
    return spec;
}

}  // namespace

GridField evolve(const SymbolSlice& symbol, const Datum& datum, int dimension, double extent, int points) {
    validate_grid(dimension, extent, points);
    const std::function<double(double)> fn = [&](double mu) { return symbol(mu); };
    const SymbolCache cache(fn, dimension, points, extent);
    Spectrum spec = spectral_samples(dimension, extent, points, [&](std::span<const double> xi, std::span<const int> k) {
        return datum.spectrum(xi) * cache(squared_norm(k));
    });
    return inverse(spec, extent);
}

GridField symbol_inverse(const SymbolSlice& symbol, int dimension, double extent, int points) {
    return symbol_inverse(std::function<double(double)>([&](double mu) { return symbol(mu); }), dimension, extent, points);
}

GridField symbol_inverse(const std::function<double(double)>& symbol, int dimension, double extent, int points) {
    validate_grid(dimension, extent, points);
    const SymbolCache cache(symbol, dimension, points, extent);
    Spectrum spec = spectral_samples(dimension, extent, points, [&](std::span<const double>, std::span<const int> k) {
        return std::complex<double>(cache(squared_norm(k)), 0.0);
    });
    return inverse(spec, extent);
}

std::vector<GridField> gradient_field(const GridField& field) {
    const int d = field.dimension();
    const int n = field.points();
    const Spectrum base = forward(field);
    const double dxi = 2.0 * std::numbers::pi / field.extent();
    std::vector<GridField> out;
    for (int axis = 0; axis < d; ++axis) {
        Spectrum spec = allocate_spectrum(d, n);
        for_each_mode(d, n, [&](std::size_t i, std::span<const int> k) {
            // The Nyquist mode has no odd counterpart; drop it so the result stays real.
            const double xi = std::abs(k[axis]) == n / 2 ? 0.0 : dxi * k[axis];
            spec.data[i][0] = -xi * base.data[i][1];
            spec.data[i][1] = xi * base.data[i][0];
        });
        out.push_back(inverse(spec, field.extent()));
    }
    return out;
}

GridField magnitude(std::span<const GridField> components) {
    require(!components.empty(), ErrorCode::domain, "magnitude: no components");
    GridField out(components[0].dimension(), components[0].extent(), components[0].points());
    std::span<double> v = out.values();
    for (const GridField& c : components) {
        require(c.size() == out.size(), ErrorCode::domain, "magnitude: component grids differ");
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += c.values()[i] * c.values()[i];
    }
    for (double& x : v) x = std::sqrt(x);
    return out;
}

// ---------------------------------------------------------------------------
// Norms

double lp_norm(const GridField& field, double p) {
    require(p >= 1.0, ErrorCode::domain, "lp_norm: p must be >= 1, got " + num(p));
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : field.values()) m = std::max(m, std::abs(v));
        return m;
    }
    double sum = 0.0;
    for (double v : field.values()) sum += std::pow(std::abs(v), p);
    return std::pow(sum * field.cell_volume(), 1.0 / p);
}

double weak_lp_quasinorm(const GridField& field, double r) {
    require(r > 1.0 && std::isfinite(r), ErrorCode::domain, "weak_lp_quasinorm: r must lie in (1, inf)");
    std::vector<double> a;
    a.reserve(field.size());
    for (double v : field.values()) {
        if (v != 0.0) a.push_back(std::abs(v));
    }
    if (a.empty()) return 0.0;
    std::sort(a.begin(), a.end(), std::greater<>());
    // For lambda just below the j-th largest magnitude, d_f(lambda) = j dV.
    const double dv = field.cell_volume();
    double sup = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (j + 1 < a.size() && a[j + 1] == a[j]) continue;
        sup = std::max(sup, a[j] * std::pow(static_cast<double>(j + 1) * dv, 1.0 / r));
    }
    return sup;
}

double spectral_l2_norm(const GridField& field) {
    const Spectrum spec = forward(field);
    const int n = field.points();
    double sum = 0.0;
    for_each_mode(field.dimension(), n, [&](std::size_t i, std::span<const int> k) {
        // Entries of the last axis other than 0 and N/2 stand for a conjugate pair.
        const int last = k[k.size() - 1];
        const double mult = (last == 0 || last == n / 2) ? 1.0 : 2.0;
        sum += mult * (spec.data[i][0] * spec.data[i][0] + spec.data[i][1] * spec.data[i][1]);
    });
    return std::sqrt(sum * field.cell_volume() / static_cast<double>(field.size()));
}

// ---------------------------------------------------------------------------
// Radial Plancherel

double sphere_area(int dimension) {
    require(dimension >= 1, ErrorCode::domain, "sphere_area: dimension must be positive");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dimension) / std::tgamma(0.5 * dimension);
}

double ball_volume(int dimension) {
    require(dimension >= 1, ErrorCode::domain, "ball_volume: dimension must be positive");
    return std::pow(std::numbers::pi, 0.5 * dimension) / std::tgamma(0.5 * dimension + 1.0);
}

RadialSpectrum::RadialSpectrum(int dimension, const Datum& datum, int panels_per_decade)
    : d_(dimension), datum_(datum), panels_per_decade_(panels_per_decade) {
    require(dimension >= 1, ErrorCode::domain, "RadialSpectrum: dimension must be positive");
    require(datum.radial(), ErrorCode::precondition, "RadialSpectrum: datum must be centred");
    require(panels_per_decade >= 1, ErrorCode::domain, "RadialSpectrum: need at least one panel per decade");
    // |u0~|^2 < 1e-32 beyond rho_max; geometric panels below 1, uniform above.
    double rho_max = 2.0;
    while (std::abs(datum.radial_spectrum(rho_max)) > 1e-16 || std::abs(datum.radial_spectrum(0.5 * rho_max)) > 1e-16) {
        rho_max *= 2.0;
        require(rho_max < 1e8, ErrorCode::domain, "RadialSpectrum: datum spectrum does not decay");
    }
    rho_min_ = 1e-9;
    std::vector<double> breaks;
    const int geometric = 9 * panels_per_decade;
    for (int i = 0; i <= geometric; ++i) breaks.push_back(rho_min_ * std::pow(10.0, 9.0 * i / geometric));
    const double width = 0.5 / panels_per_decade;
    while (breaks.back() < rho_max) breaks.push_back(breaks.back() + width);
    const quad::GaussRule& rule = quad::gauss_legendre(8);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double rho = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
            nodes_.push_back(rho);
            weights_.push_back(0.5 * (b - a) * rule.weights[q]);
            values_.push_back(datum.radial_spectrum(rho));
        }
    }
}

RadialSpectrum RadialSpectrum::refined() const { return RadialSpectrum(d_, datum_, 2 * panels_per_decade_); }

double l2_norm_plancherel_radial(const SymbolSlice& symbol, const RadialSpectrum& spectrum, int weight_power) {
    require(weight_power >= 0, ErrorCode::domain, "l2_norm_plancherel_radial: weight power must be nonnegative");
    const int d = spectrum.dimension();
    auto integrate = [&](const RadialSpectrum& sp) {
        double sum = 0.0;
        const auto nodes = sp.nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double rho = nodes[i];
            const double s = symbol(rho * rho);
            const double u = sp.values()[i];
            sum += sp.weights()[i] * s * s * u * u * std::pow(rho, d - 1 + 2 * weight_power);
        }
        // Below rho_min both s and the datum spectrum are at their rho = 0 values.
        const double u0 = sp.values()[0];
        const int power = d + 2 * weight_power;
        sum += u0 * u0 * std::pow(sp.rho_min(), power) / power;
        return sum * sphere_area(d) * std::pow(2.0 * std::numbers::pi, -d);
    };
    RadialSpectrum current = spectrum;
    double value = integrate(current);
    for (int level = 0; level < 6; ++level) {
        RadialSpectrum next = current.refined();
        const double v = integrate(next);
        const bool done = std::abs(v - value) <= 1e-6 * std::abs(v);
        value = v;
        current = std::move(next);
        if (done) return std::sqrt(std::max(value, 0.0));
    }
    fail(ErrorCode::resolution, "l2_norm_plancherel_radial: panel refinement did not settle to 1e-6");
}

double msd_analytic(const KernelPair& pair, double t, int dimension) {
    require(t >= 0.0, ErrorCode::domain, "msd_analytic: t must be nonnegative");
    require(dimension >= 1, ErrorCode::domain, "msd_analytic: dimension must be positive");
    return 2.0 * dimension * pair.cumulative_l(t);
}

double msd_empirical(const GridField& z) {
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) sum += z.radius_squared(i) * z.values()[i];
    return sum * z.cell_volume();
}

}  // namespace subdiff
