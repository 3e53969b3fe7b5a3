#include "subdiff/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "subdiff/errors.hpp"

namespace subdiff {

UniformSpline::UniformSpline(double x0, double h, std::vector<double> values) : x0_(x0), h_(h), y_(std::move(values)) {
    const std::size_t n = y_.size();
    require(n >= 2 && h > 0.0, ErrorCode::domain, "UniformSpline: need at least two points and positive spacing");
    m_.assign(n, 0.0);
    if (n < 3) return;
    // Thomas algorithm for the natural spline system with uniform spacing.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h * h);
        const double denom = 4.0 - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs - d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = d[i] - c[i] * m_[i + 1];
        if (i == 1) break;
    }
}

double UniformSpline::operator()(double x) const {
    const double u = (x - x0_) / h_;
    const auto last = static_cast<double>(y_.size() - 2);
    const double cell = std::clamp(std::floor(u), 0.0, last);
    const auto i = static_cast<std::size_t>(cell);
    const double b = u - cell;
    const double a = 1.0 - b;
    const double h2 = h_ * h_ / 6.0;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h2;
}

double LogLogSpline::operator()(double x) const { return std::exp(spline_(std::log(x))); }

double linear_interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
    require(!xs.empty() && x >= xs.front() && x <= xs.back(), ErrorCode::range, "linear_interpolate: outside the grid");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const auto j = static_cast<std::size_t>(it - xs.begin());
    if (j == 0) return ys.front();
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - w) * ys[j - 1] + w * ys[j];
}

}  // namespace subdiff
