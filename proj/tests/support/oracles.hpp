#pragma once

// Reference computations for the unit and acceptance tests. Each one is
// written independently of the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "specflow/vec.hpp"

namespace oracle {

using specflow::Vec;

// Nearest integer by scanning candidates, ties to the smaller one.
inline double nearest_integer(double s) {
    double best = std::floor(s) - 1;
    for (double n = std::floor(s) - 1; n <= std::floor(s) + 1; n += 1)
        if (std::abs(n - s) < std::abs(best - s)) best = n;
    return best;
}

inline Vec snap(const Vec& s) {
    Vec v(s.dim());
    for (int k = 0; k < s.dim(); ++k) v[k] = nearest_integer(s[k]) - s[k];
    return v;
}

// Smallest power of two K with 1 - 1/(2K) > 1/alpha, written as
// alpha (2K - 1) > 2K to stay away from rounding in 1/alpha.
inline std::int64_t grid_k(double alpha) {
    std::int64_t k = 1;
    while (!(alpha * static_cast<double>(2 * k - 1) > static_cast<double>(2 * k))) k *= 2;
    return k;
}

// One-dimensional f_{[a,b],K,v} and h with cap L, from the closed form.
inline double shift_1d(double a, double b, double K, double v, double x, double L = INFINITY) {
    double d = std::min(x - a, b - x);
    return x + std::min(d, L) / K * v;
}

// Flow under a ceiling on one orbit: prefix sums of the ceiling along the
// orbit, then a binary search for the floor in which t + r lands.
struct Suspended {
    std::int64_t index;
    double t;
};

inline Suspended suspend_prefix(const std::function<double(std::int64_t)>& f, std::int64_t z, double t, double r,
                                std::int64_t span) {
    // S[k] = time from (z, 0) to (z + k - span, 0), k in [0, 2 span].
    std::vector<double> S(2 * span + 1);
    double acc = 0.0;
    std::vector<double> back(span + 1);
    for (std::int64_t i = 1; i <= span; ++i) {
        acc += f(z - i);
        back[i] = acc;
    }
    for (std::int64_t k = 0; k < span; ++k) S[k] = -back[span - k];
    S[span] = 0.0;
    acc = 0.0;
    for (std::int64_t i = 0; i < span; ++i) {
        acc += f(z + i);
        S[span + i + 1] = acc;
    }
    const double target = t + r;
    auto it = std::upper_bound(S.begin(), S.end(), target);
    std::int64_t k = static_cast<std::int64_t>(it - S.begin()) - 1;
    return {z + k - span, target - S[k]};
}

// Empirical bi-Lipschitz constants of a map over random pairs from a
// sampler, without seam targeting.
struct Constants {
    double lo = INFINITY;
    double hi = 0.0;
};

template <class Map, class Sampler>
Constants pair_constants(Map&& map, Sampler&& sample, std::size_t pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Constants c;
    for (std::size_t i = 0; i < pairs; ++i) {
        Vec x = sample(rng), y = sample(rng);
        double dx = specflow::norm(x - y);
        if (dx < 1e-6) continue;
        double q = specflow::norm(map(x) - map(y)) / dx;
        c.lo = std::min(c.lo, q);
        c.hi = std::max(c.hi, q);
    }
    return c;
}

}  // namespace oracle
