#include "thbch/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thbch {

// Nodes on [-1,1] by Newton iteration on the Legendre polynomial, then mapped
// to [0,1].
QuadratureRule::QuadratureRule(int num_points) {
    if (num_points < 1) throw std::invalid_argument("QuadratureRule: need >= 1 point");
    const int n = num_points;
    points.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        points[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace thbch
