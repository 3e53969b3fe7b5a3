#include "subdiff/volterra.hpp"

#include <algorithm>

#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"

namespace subdiff::volterra {

void row_weights(const KernelFunctions& kernel, std::span<const double> mesh, std::size_t n, std::span<double> w,
                 std::size_t first_interval) {
    require(n < mesh.size() && w.size() > n && first_interval < n, ErrorCode::internal, "row_weights: bad indices");
    std::fill(w.begin() + static_cast<std::ptrdiff_t>(first_interval), w.begin() + static_cast<std::ptrdiff_t>(n) + 1,
              0.0);
    const double tn = mesh[n];
    const quad::GaussRule& g3 = quad::gauss_legendre(3);
    const quad::GaussRule& g6 = quad::gauss_legendre(6);
    const quad::GaussRule& g12 = quad::gauss_legendre(12);
    for (std::size_t j = first_interval; j < n; ++j) {
        const double a = tn - mesh[j + 1];
        const double b = tn - mesh[j];
        // Taken from the mesh directly: b - a cancels when t_n >> t_{j+1}.
        const double h = mesh[j + 1] - mesh[j];
        double left = 0.0;   // coefficient of y_j
        double right = 0.0;  // coefficient of y_{j+1}
        if (j + 1 == n) {
            const double k1 = kernel.first(h);
            const double k2 = kernel.second(h);
            right = k2 / h;
            left = k1 - right;
        } else if (a < 4.0 * h) {
            // Close to the singularity: exact moments from the primitives,
            // int_a^b K(s)(s - a) ds = h K1(b) - (K2(b) - K2(a)).
            const double k1a = kernel.first(a);
            const double k1b = kernel.first(b);
            const double moment = h * k1b - (kernel.second(b) - kernel.second(a));
            left = moment / h;
            right = (k1b - k1a) - left;
        } else {
            const quad::GaussRule& rule = a >= 32.0 * h ? g3 : (a >= 12.0 * h ? g6 : g12);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                // Node position inside [t_j, t_{j+1}] as a fraction from the left.
                const double x = 0.5 * (1.0 + rule.nodes[i]);
                const double kv = 0.5 * rule.weights[i] * h * kernel.value(a + (1.0 - x) * h);
                left += kv * (1.0 - x);
                right += kv * x;
            }
        }
        w[j] += left;
        w[j + 1] += right;
    }
}

}  // namespace subdiff::volterra
