#pragma once

#include <cmath>
#include <span>

#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"

namespace oneshot {

inline double l1_distance_spans(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

// Total variation style L1 distance: sum over atoms of |a - b|.
inline double l1_distance(const FiniteDist& a, const FiniteDist& b) {
    require_same_alphabet(a, b);
    return l1_distance_spans(a.masses(), b.masses());
}

inline double l1_distance(const JointDist& a, const JointDist& b) {
    require_same_alphabet(a, b);
    return l1_distance_spans(a.masses(), b.masses());
}

} // namespace oneshot
