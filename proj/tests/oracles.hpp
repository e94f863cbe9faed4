// Test-only helpers: independent oracles and a small deterministic RNG.
#pragma once

#include <cmath>
#include <functional>
#include <random>

namespace testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double a, double b) {
        // fixed 53-bit mapping, independent of library distributions
        double u = (eng_() >> 11) * 0x1.0p-53;
        return a + (b - a) * u;
    }
    int uniform_int(int a, int b) {  // inclusive
        return a + static_cast<int>(eng_() % static_cast<std::uint64_t>(b - a + 1));
    }

private:
    std::mt19937_64 eng_;
};

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Linear scan over spans: smallest i with knots[i] <= x < knots[i+1].
inline int scan_span(const std::vector<double>& knots, int degree, double x) {
    int n = static_cast<int>(knots.size()) - degree - 1;
    if (x >= 1.0) {
        int i = n - 1;
        while (knots[i] == knots[i + 1]) --i;
        return i;
    }
    for (int i = degree; i < n; ++i)
        if (knots[i] <= x && x < knots[i + 1]) return i;
    return -1;
}

}  // namespace testing
