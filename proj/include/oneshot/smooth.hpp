#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"
#include "oneshot/sub_weighting.hpp"

namespace oneshot {

// Value of a smoothed quantity together with the optimizer that attains it.
// All optima here are exact minima over the compact ball B^eps; nothing is
// iterative or approximate.
struct SmoothResult {
    double value_bits;
    SubWeighting witness;
    double epsilon;
};

inline void require_eps_in_unit(double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw validation_error("eps must be in [0,1)");
}

// ----- unsmoothed support entropies ---------------------------------------

inline double h0(const FiniteDist& d) { return log2_of(static_cast<double>(d.support_size())); }

inline double h0(const JointDist& j) { return log2_of(static_cast<double>(j.support_size())); }

// H0 of the row variable given the column variable: log2 of the largest
// per-column support, columns with zero marginal excluded.
inline double h0_cond(const JointDist& j) {
    std::size_t best = 1;
    for (symbol c = 0; c < j.cols(); ++c) {
        std::size_t s = 0;
        for (symbol r = 0; r < j.rows(); ++r)
            if (j.at(r, c) > 0.0) ++s;
        best = std::max(best, s);
    }
    return log2_of(static_cast<double>(best));
}

// ----- greedy support smoothing --------------------------------------------

namespace detail {

// Atoms ordered for removal: lightest first, ties broken toward the larger
// index so witnesses are reproducible.
inline std::vector<std::size_t> removal_order(std::span<const double> masses) {
    std::vector<std::size_t> order(masses.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (masses[a] != masses[b]) return masses[a] < masses[b];
        return a > b;
    });
    return order;
}

// Zero as many of the lightest positive atoms as fit in the eps budget
// (weak inequality: a removal landing exactly on eps is allowed). Returns
// keep-flags per atom.
inline std::vector<char> greedy_smooth_flags(std::span<const double> masses, double eps) {
    std::vector<char> keep(masses.size(), 1);
    double removed = 0.0;
    for (std::size_t i : removal_order(masses)) {
        if (masses[i] <= 0.0) continue;
        if (removed + masses[i] <= eps) {
            removed += masses[i];
            keep[i] = 0;
        } else {
            break;
        }
    }
    return keep;
}

inline std::vector<double> masked_weights(std::span<const double> masses,
                                          std::span<const char> keep) {
    std::vector<double> w(masses.size(), 0.0);
    for (std::size_t i = 0; i < masses.size(); ++i)
        if (keep[i]) w[i] = masses[i];
    return w;
}

} // namespace detail

// Smooth zeroth-order Renyi entropy: minimal log support size over the ball
// B^eps(p). The greedy lightest-first removal attains the exact optimum.
inline SmoothResult smooth_h0(const FiniteDist& d, double eps) {
    require_eps_in_unit(eps);
    const auto keep = detail::greedy_smooth_flags(d.masses(), eps);
    std::size_t survivors = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (keep[i] && d[i] > 0.0) ++survivors;
    SubWeighting witness = SubWeighting::of(d, detail::masked_weights(d.masses(), keep), eps);
    return SmoothResult{log2_of(static_cast<double>(survivors)), std::move(witness), eps};
}

// Same optimization with the joint flattened to a single alphabet.
inline SmoothResult smooth_h0_joint(const JointDist& j, double eps) {
    require_eps_in_unit(eps);
    const auto keep = detail::greedy_smooth_flags(j.masses(), eps);
    std::size_t survivors = 0;
    for (std::size_t i = 0; i < j.masses().size(); ++i)
        if (keep[i] && j.masses()[i] > 0.0) ++survivors;
    SubWeighting witness =
        SubWeighting::of(j, detail::masked_weights(j.masses(), keep), eps);
    return SmoothResult{log2_of(static_cast<double>(survivors)), std::move(witness), eps};
}

// Conditional smooth H0 of the row variable given the column variable:
// minimize over q in B^eps(p) the worst per-column support size, conditionals
// taken against the original column marginal. For a target size k the
// cheapest removal zeroes, in every column, its (support - k)+ lightest
// atoms; cost(k) is non-increasing, so the optimum is the smallest feasible k.
inline SmoothResult smooth_h0_cond(const JointDist& j, double eps) {
    require_eps_in_unit(eps);
    struct Column {
        std::vector<std::pair<double, symbol>> atoms; // sorted: lightest first, larger row first
        std::vector<double> prefix;                   // prefix[t] = mass of the t lightest atoms
    };
    std::vector<Column> cols(j.cols());
    std::size_t max_support = 1;
    for (symbol c = 0; c < j.cols(); ++c) {
        auto& col = cols[c];
        for (symbol r = 0; r < j.rows(); ++r)
            if (j.at(r, c) > 0.0) col.atoms.emplace_back(j.at(r, c), r);
        std::sort(col.atoms.begin(), col.atoms.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second;
        });
        col.prefix.resize(col.atoms.size() + 1, 0.0);
        for (std::size_t t = 0; t < col.atoms.size(); ++t)
            col.prefix[t + 1] = col.prefix[t] + col.atoms[t].first;
        max_support = std::max(max_support, col.atoms.size());
    }

    auto cost = [&](std::size_t k) {
        double total = 0.0;
        for (const auto& col : cols)
            if (col.atoms.size() > k) total += col.prefix[col.atoms.size() - k];
        return total;
    };

    std::size_t k_star = max_support;
    for (std::size_t k = 1; k <= max_support; ++k) {
        if (cost(k) <= eps) {
            k_star = k;
            break;
        }
    }

    std::vector<double> weights(j.masses().begin(), j.masses().end());
    for (symbol c = 0; c < j.cols(); ++c) {
        const auto& col = cols[c];
        if (col.atoms.size() <= k_star) continue;
        const std::size_t drop = col.atoms.size() - k_star;
        for (std::size_t t = 0; t < drop; ++t) {
            const symbol r = col.atoms[t].second;
            weights[r * j.cols() + c] = 0.0;
        }
    }
    SubWeighting witness = SubWeighting::of(j, std::move(weights), eps);
    return SmoothResult{log2_of(static_cast<double>(k_star)), std::move(witness), eps};
}

// ----- max Renyi divergence and its smoothing ------------------------------

namespace detail {

inline double max_ratio(std::span<const double> p, std::span<const double> q) {
    double best = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw support_error("max divergence: Supp(P) not contained in Supp(Q)");
        best = any ? std::max(best, p[i] / q[i]) : p[i] / q[i];
        any = true;
    }
    if (!any) throw validation_error("max divergence of an empty distribution");
    return best;
}

// Minimal lambda with removal(lambda) = sum_x max(0, p - lambda q) <= eps.
// removal is continuous, piecewise linear and strictly decreasing on
// [0, max ratio], so the walk down the ratio-sorted segments solves the
// crossing exactly -- no iterative search.
inline double waterfill_lambda(std::span<const double> p, std::span<const double> q, double eps) {
    struct Atom {
        double ratio, p, q;
    };
    std::vector<Atom> atoms;
    atoms.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw support_error("max divergence: Supp(P) not contained in Supp(Q)");
        atoms.push_back({p[i] / q[i], p[i], q[i]});
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.ratio > b.ratio; });

    double p_cum = 0.0, q_cum = 0.0;
    std::size_t i = 0;
    while (i < atoms.size()) {
        const double r = atoms[i].ratio;
        while (i < atoms.size() && atoms[i].ratio == r) {
            p_cum += atoms[i].p;
            q_cum += atoms[i].q;
            ++i;
        }
        const double lower = (i < atoms.size()) ? atoms[i].ratio : 0.0;
        const double removal_at_lower = p_cum - lower * q_cum;
        if (removal_at_lower > eps) return (p_cum - eps) / q_cum;
    }
    // removal(0) = total mass of p <= eps would be required to get here.
    throw validation_error("waterfill: eps budget covers the entire distribution");
}

inline std::vector<double> waterfill_witness(std::span<const double> p, std::span<const double> q,
                                             double lambda) {
    std::vector<double> w(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) w[i] = std::min(p[i], lambda * q[i]);
    return w;
}

} // namespace detail

// Max Renyi divergence D_inf(P||Q) in bits.
inline double d_inf(const FiniteDist& p, const FiniteDist& q) {
    require_same_alphabet(p, q);
    return log2_of(detail::max_ratio(p.masses(), q.masses()));
}

inline double d_inf(const JointDist& p, const JointDist& q) {
    require_same_alphabet(p, q);
    return log2_of(detail::max_ratio(p.masses(), q.masses()));
}

// Smooth max Renyi divergence. The value can be negative: B^eps contains
// sub-normalized functions, and scaling below Q is sometimes optimal.
inline SmoothResult smooth_d_inf(const FiniteDist& p, const FiniteDist& q, double eps) {
    require_same_alphabet(p, q);
    require_eps_in_unit(eps);
    if (eps == 0.0) {
        const double value = d_inf(p, q);
        std::vector<double> w(p.masses().begin(), p.masses().end());
        return SmoothResult{value, SubWeighting::of(p, std::move(w), 0.0), 0.0};
    }
    const double lambda = detail::waterfill_lambda(p.masses(), q.masses(), eps);
    SubWeighting witness =
        SubWeighting::of(p, detail::waterfill_witness(p.masses(), q.masses(), lambda), eps);
    return SmoothResult{log2_of(lambda), std::move(witness), eps};
}

inline SmoothResult smooth_d_inf(const JointDist& p, const JointDist& q, double eps) {
    require_same_alphabet(p, q);
    require_eps_in_unit(eps);
    if (eps == 0.0) {
        const double value = d_inf(p, q);
        std::vector<double> w(p.masses().begin(), p.masses().end());
        return SmoothResult{value, SubWeighting::of(p, std::move(w), 0.0), 0.0};
    }
    const double lambda = detail::waterfill_lambda(p.masses(), q.masses(), eps);
    SubWeighting witness =
        SubWeighting::of(p, detail::waterfill_witness(p.masses(), q.masses(), lambda), eps);
    return SmoothResult{log2_of(lambda), std::move(witness), eps};
}

// Smooth max information I_inf^eps between the row and column variables:
// smooth max divergence of the joint against the product of its marginals.
inline SmoothResult smooth_i_inf(const JointDist& j, double eps) {
    return smooth_d_inf(j, JointDist::product(j.row_marginal(), j.col_marginal()), eps);
}

// ----- joint truncation feeding the distributed codec ----------------------

// Intersect the supports of the three smoothing witnesses (joint, row|col,
// col|row) at budget eps/6 each and restrict p to that set. The result lives
// in B^{eps/2}(p) and inherits all three support bounds.
inline SubWeighting sw_truncation(const JointDist& j, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("truncation eps must be in (0,1)");
    const double e6 = eps / 6.0;
    const SmoothResult joint = smooth_h0_joint(j, e6);
    const SmoothResult row_given_col = smooth_h0_cond(j, e6);
    const SmoothResult col_given_row = smooth_h0_cond(j.transposed(), e6);

    std::vector<double> weights(j.masses().begin(), j.masses().end());
    for (symbol r = 0; r < j.rows(); ++r) {
        for (symbol c = 0; c < j.cols(); ++c) {
            const std::size_t flat = r * j.cols() + c;
            const bool kept = joint.witness[flat] > 0.0 && row_given_col.witness.at(r, c) > 0.0 &&
                              col_given_row.witness.at(c, r) > 0.0;
            if (!kept) weights[flat] = 0.0;
        }
    }
    return SubWeighting::of(j, std::move(weights), eps / 2.0);
}

} // namespace oneshot
