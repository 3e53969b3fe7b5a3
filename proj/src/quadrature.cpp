#include "subdiff/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "subdiff/errors.hpp"

namespace subdiff::quad {

namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

// Kronrod 15-point extension of the 7-point Gauss rule.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double gauss7 = fc * kWg[3];
    double kron15 = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron15 += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss7 += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, kron15 * h, std::abs((kron15 - gauss7) * h)};
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    require(n >= 1 && n <= 512, ErrorCode::domain, "gauss_legendre: order out of range");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

AdaptiveResult gauss_kronrod(const std::function<double(double)>& f, std::span<const double> breaks, double rel_tol,
                             double abs_tol, int max_intervals) {
    std::priority_queue<Segment> heap;
    double total = 0.0;
    double error = 0.0;
    AdaptiveResult result;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        Segment s = kronrod(f, breaks[i], breaks[i + 1]);
        result.evaluations += 15;
        total += s.value;
        error += s.error;
        heap.push(s);
    }
    int intervals = static_cast<int>(heap.size());
    while (!heap.empty() && error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (intervals >= max_intervals) {
            result.converged = false;
            break;
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            result.converged = false;
            break;
        }
        Segment left = kronrod(f, worst.a, mid);
        Segment right = kronrod(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum to avoid drift from the incremental updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    result.value = total;
    result.error = error;
    return result;
}

AdaptiveResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double rel_tol,
                             double abs_tol, int max_intervals) {
    const double breaks[2] = {a, b};
    return gauss_kronrod(f, std::span<const double>(breaks, 2), rel_tol, abs_tol, max_intervals);
}

SeriesLimit euler_limit(std::span<const double> terms) {
    SeriesLimit out;
    if (terms.empty()) return out;
    std::vector<double> level(terms.size());
    double partial = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        partial += terms[i];
        level[i] = partial;
    }
    if (level.size() == 1) {
        out.value = level[0];
        out.error = std::abs(terms[0]);
        return out;
    }
    std::size_t n = level.size();
    double spread = std::abs(terms.back());
    while (n > 1) {
        if (n == 2) spread = 0.5 * std::abs(level[0] - level[1]);
        for (std::size_t i = 0; i + 1 < n; ++i) level[i] = 0.5 * (level[i] + level[i + 1]);
        --n;
    }
    out.value = level[0];
    // Half the gap between the last two averaged partial sums tracks the remaining error.
    out.error = spread;
    return out;
}

double tanh_sinh(const std::function<double(double, double, double)>& f, double a, double b, double step) {
    const double half = 0.5 * (b - a);
    const double half_pi = 0.5 * std::numbers::pi;
    double sum = 0.0;
    for (int k = 0;; ++k) {
        const double s = k * step;
        const double u = half_pi * std::sinh(s);
        const double cu = std::cosh(u);
        const double weight = half_pi * std::cosh(s) / (cu * cu);
        // 1 - tanh(u) = exp(-u) / cosh(u)
        const double complement = std::exp(-u) / cu;
        const double near = half * complement;
        if (near <= 0.0 || weight < 1e-300) break;
        if (k == 0) {
            sum += weight * f(a + half, half, half);
        } else {
            sum += weight * (f(b - near, 2.0 * half - near, near) + f(a + near, near, 2.0 * half - near));
        }
        if (s > 6.5) break;
    }
    return sum * half * step;
}

}  // namespace subdiff::quad
