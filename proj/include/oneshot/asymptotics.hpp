#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"
#include "oneshot/shannon.hpp"
#include "oneshot/smooth.hpp"

namespace oneshot {

// Expanded alphabets are computed exactly, so their size is capped rather
// than falling back to sampling.
constexpr std::size_t kAtomBudget = std::size_t{1} << 22;

namespace detail {
inline std::size_t checked_power(std::size_t base, int n) {
    std::size_t size = 1;
    for (int i = 0; i < n; ++i) {
        if (size > kAtomBudget / base)
            throw resource_error("expanded alphabet exceeds the atom budget");
        size *= base;
    }
    return size;
}
} // namespace detail

// n-fold iid product of a pmf, atom masses as exact products.
inline FiniteDist product_expand(const FiniteDist& base, int n) {
    if (n < 1) throw validation_error("replication count must be positive");
    detail::checked_power(base.size(), n);
    std::vector<double> cur{1.0};
    for (int i = 0; i < n; ++i) {
        std::vector<double> next(cur.size() * base.size());
        for (std::size_t a = 0; a < cur.size(); ++a)
            for (symbol b = 0; b < base.size(); ++b) next[a * base.size() + b] = cur[a] * base[b];
        cur = std::move(next);
    }
    return FiniteDist(std::move(cur));
}

// n-fold iid product of a joint, rows and columns expanding in lockstep.
inline JointDist product_expand(const JointDist& base, int n) {
    if (n < 1) throw validation_error("replication count must be positive");
    detail::checked_power(base.rows() * base.cols(), n);
    std::vector<double> cur{1.0};
    std::size_t rows = 1, cols = 1;
    for (int i = 0; i < n; ++i) {
        std::vector<double> next(cur.size() * base.rows() * base.cols());
        const std::size_t next_cols = cols * base.cols();
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                const double m = cur[r * cols + c];
                for (symbol br = 0; br < base.rows(); ++br)
                    for (symbol bc = 0; bc < base.cols(); ++bc)
                        next[(r * base.rows() + br) * next_cols + (c * base.cols() + bc)] =
                            m * base.at(br, bc);
            }
        cur = std::move(next);
        rows *= base.rows();
        cols *= base.cols();
    }
    return JointDist(std::move(cur), rows, cols);
}

struct ConvergencePoint {
    int n = 0;
    double value_bits = 0.0;     // normalized smoothed quantity at this n
    double reference_bits = 0.0; // the Shannon limit it should approach
    double gap = 0.0;
};

// Normalized conditional smooth H0 of the iid extension, against H[X|Y].
inline std::vector<ConvergencePoint> convergence_h0_cond(const JointDist& base, double eps,
                                                         int n_max) {
    require_eps_in_unit(eps);
    const double reference = shannon_quantities(base).h_row_given_col;
    std::vector<ConvergencePoint> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const JointDist expanded = product_expand(base, n);
        const double value = smooth_h0_cond(expanded, eps).value_bits / n;
        out.push_back({n, value, reference, value - reference});
    }
    return out;
}

// Normalized smooth max divergence of the iid extensions, against D(P||Q).
inline std::vector<ConvergencePoint> convergence_d_inf(const FiniteDist& p, const FiniteDist& q,
                                                       double eps, int n_max) {
    require_eps_in_unit(eps);
    const double reference = kl_divergence(p, q);
    std::vector<ConvergencePoint> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const FiniteDist pn = product_expand(p, n);
        const FiniteDist qn = product_expand(q, n);
        const double value = smooth_d_inf(pn, qn, eps).value_bits / n;
        out.push_back({n, value, reference, value - reference});
    }
    return out;
}

// Mass under P of atoms whose normalized log-likelihood ratio exceeds the
// threshold (bits per symbol).
inline double llr_upper_tail_mass(const FiniteDist& p_n, const FiniteDist& q_n,
                                  double threshold_bits, int n) {
    require_same_alphabet(p_n, q_n);
    std::vector<double> tail;
    for (symbol i = 0; i < p_n.size(); ++i) {
        if (p_n[i] <= 0.0) continue;
        if (q_n[i] <= 0.0) throw support_error("llr tail: Supp(P) not contained in Supp(Q)");
        if (log2_of(p_n[i] / q_n[i]) / n > threshold_bits) tail.push_back(p_n[i]);
    }
    return neumaier_sum(tail);
}

// Finite-n realization of the spectral sup rate: the smallest threshold t
// with Pr{(1/n) log2 P/Q <= t} >= 1 - alpha.
inline double info_spectrum_quantile(const FiniteDist& p_n, const FiniteDist& q_n, double alpha,
                                     int n) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw validation_error("alpha must be in (0,1)");
    require_same_alphabet(p_n, q_n);
    std::vector<std::pair<double, double>> spectrum; // (llr per symbol, mass)
    for (symbol i = 0; i < p_n.size(); ++i) {
        if (p_n[i] <= 0.0) continue;
        if (q_n[i] <= 0.0) throw support_error("spectrum: Supp(P) not contained in Supp(Q)");
        spectrum.emplace_back(log2_of(p_n[i] / q_n[i]) / n, p_n[i]);
    }
    std::sort(spectrum.begin(), spectrum.end());
    double cum = 0.0;
    for (const auto& [llr, mass] : spectrum) {
        cum += mass;
        if (cum >= 1.0 - alpha) return llr;
    }
    return spectrum.back().first;
}

struct AppendixTruncation {
    double kept_mass = 0.0;  // P_n-mass of the ratio-capped set
    double value_bits = 0.0; // normalized max divergence of P_n restricted to it
};

// Restrict P_n to atoms whose normalized log ratio stays below lambda and
// report the restricted mass and divergence rate.
inline AppendixTruncation truncated_divergence(const FiniteDist& p_n, const FiniteDist& q_n,
                                               double lambda_bits, int n) {
    require_same_alphabet(p_n, q_n);
    std::vector<double> kept;
    double best = -std::numeric_limits<double>::infinity();
    for (symbol i = 0; i < p_n.size(); ++i) {
        if (p_n[i] <= 0.0) continue;
        if (q_n[i] <= 0.0) throw support_error("truncation: Supp(P) not contained in Supp(Q)");
        const double llr = log2_of(p_n[i] / q_n[i]) / n;
        if (llr <= lambda_bits) {
            kept.push_back(p_n[i]);
            best = std::max(best, llr);
        }
    }
    return AppendixTruncation{neumaier_sum(kept), best};
}

} // namespace oneshot
