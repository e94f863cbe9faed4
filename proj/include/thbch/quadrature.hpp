#pragma once

#include <vector>

namespace thbch {

/// Gauss-Legendre rule on [0,1], exact for polynomials of degree 2n-1.
struct QuadratureRule {
    explicit QuadratureRule(int num_points);

    int order() const { return static_cast<int>(points.size()); }

    std::vector<double> points;   // in (0,1)
    std::vector<double> weights;  // sum to 1
};

}  // namespace thbch
