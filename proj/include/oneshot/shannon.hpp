#pragma once

#include <cmath>
#include <span>

#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"

namespace oneshot {

inline double shannon_entropy_span(std::span<const double> masses) {
    double h = 0.0;
    for (double m : masses) {
        if (m > 0.0) h -= m * log2_of(m);
    }
    return h;
}

inline double shannon_entropy(const FiniteDist& d) { return shannon_entropy_span(d.masses()); }

struct ShannonSummary {
    double h_row;           // H[X]
    double h_col;           // H[Y]
    double h_joint;         // H[XY]
    double h_row_given_col; // H[X|Y]
    double h_col_given_row; // H[Y|X]
    double mutual_info;     // I[X;Y]
};

// Base-2 Shannon quantities of a joint. Chain rule H[XY] = H[Y] + H[X|Y]
// holds within kDerivedTolerance by construction.
inline ShannonSummary shannon_quantities(const JointDist& j) {
    ShannonSummary s{};
    s.h_row = shannon_entropy(j.row_marginal());
    s.h_col = shannon_entropy(j.col_marginal());
    s.h_joint = shannon_entropy_span(j.masses());
    s.h_row_given_col = s.h_joint - s.h_col;
    s.h_col_given_row = s.h_joint - s.h_row;
    s.mutual_info = s.h_row + s.h_col - s.h_joint;
    return s;
}

// Kullback-Leibler divergence D(P||Q) in bits. Requires Supp(P) in Supp(Q).
inline double kl_divergence(const FiniteDist& p, const FiniteDist& q) {
    require_same_alphabet(p, q);
    double d = 0.0;
    for (symbol i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw support_error("kl_divergence: Supp(P) not contained in Supp(Q)");
        d += p[i] * log2_of(p[i] / q[i]);
    }
    return d;
}

} // namespace oneshot
