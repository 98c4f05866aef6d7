#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace oneshot {

// All information quantities in this library are in bits; log2_of is the one
// logarithm used for them. ln_of exists only for the exponential bound
// formulas that are stated in nats.
inline double log2_of(double x) { return std::log2(x); }
inline double ln_of(double x) { return std::log(x); }

// Compensated (Neumaier) summation. Mass totals are checked against 1e-12
// tolerances, so plain accumulation over large expanded alphabets is not
// good enough.
inline double neumaier_sum(std::span<const double> xs) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

constexpr double kMassTolerance = 1e-12;
constexpr double kDerivedTolerance = 1e-9;

} // namespace oneshot
