#pragma once

#include <span>
#include <vector>

namespace subdiff {

// Natural cubic spline on a uniform abscissa grid x0 + i*h.
class UniformSpline {
public:
    UniformSpline() = default;
    UniformSpline(double x0, double h, std::vector<double> values);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double x_min() const { return x0_; }
    [[nodiscard]] double x_max() const { return x0_ + h_ * static_cast<double>(y_.size() - 1); }
    [[nodiscard]] bool empty() const { return y_.empty(); }

private:
    double x0_ = 0.0;
    double h_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives
};

// Positive function tabulated as log f against log x; evaluation outside the
// tabulated range is the caller's responsibility.
class LogLogSpline {
public:
    LogLogSpline() = default;
    template <class F>
    LogLogSpline(F&& f, double x_lo, double x_hi, int per_decade);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double x_min() const { return lo_; }
    [[nodiscard]] double x_max() const { return hi_; }
    [[nodiscard]] bool contains(double x) const { return x >= lo_ && x <= hi_; }

private:
    UniformSpline spline_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

// Piecewise-linear interpolation on an increasing abscissa; requires x inside [xs.front(), xs.back()].
double linear_interpolate(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace subdiff

#include <cmath>

namespace subdiff {

template <class F>
LogLogSpline::LogLogSpline(F&& f, double x_lo, double x_hi, int per_decade) : lo_(x_lo), hi_(x_hi) {
    const double u0 = std::log(x_lo);
    const double u1 = std::log(x_hi);
    const int n = std::max(4, static_cast<int>(std::ceil((u1 - u0) / std::log(10.0) * per_decade)) + 1);
    const double h = (u1 - u0) / (n - 1);
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = std::log(f(std::exp(u0 + h * i)));
    spline_ = UniformSpline(u0, h, std::move(values));
}

}  // namespace subdiff
