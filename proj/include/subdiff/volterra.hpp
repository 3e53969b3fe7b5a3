#pragma once

#include <functional>
#include <span>

namespace subdiff::volterra {

// A convolution kernel K together with its first and second primitives
// K1(x) = int_0^x K and K2(x) = int_0^x K1, which must be accurate for small x.
struct KernelFunctions {
    std::function<double(double)> value;
    std::function<double(double)> first;
    std::function<double(double)> second;
};

// Product-integration weights for a piecewise-linear y on the mesh:
//   int_{t_m}^{t_n} K(t_n - tau) y(tau) dtau  ~=  sum_{j=m}^{n} w[j] y_j,
// with m = first_interval.  Entries of w outside [m, n] are left untouched
// apart from w[m..n] being overwritten.  The last interval uses the exact
// primitives; earlier ones use Gauss-Legendre on K, whose order is chosen from
// the ratio of the interval length to its distance from the singularity.
void row_weights(const KernelFunctions& kernel, std::span<const double> mesh, std::size_t n, std::span<double> w,
                 std::size_t first_interval = 0);

}  // namespace subdiff::volterra
