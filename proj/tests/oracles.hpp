#pragma once

// Test-only brute-force references. Everything here is deliberately
// independent of the algorithmic paths in the library: subset enumeration
// instead of greedy ordering, bisection instead of the segment walk.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"
#include "oneshot/rng.hpp"

namespace oneshot::testing {

// Smallest achievable support size by zeroing any subset of atoms whose
// total mass fits in eps. Full 2^n enumeration.
inline double oracle_smooth_h0(std::span<const double> masses, double eps) {
    const std::size_t n = masses.size();
    if (n > 20) throw std::runtime_error("oracle_smooth_h0: instance too large");
    std::size_t best_removed = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double removed = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                removed += masses[i];
                if (masses[i] > 0.0) ++count;
            }
        }
        if (removed <= eps) best_removed = std::max(best_removed, count);
    }
    std::size_t support = 0;
    for (double m : masses)
        if (m > 0.0) ++support;
    return std::log2(static_cast<double>(support - best_removed));
}

// Minimal worst-column support over all global keep-patterns, by full
// enumeration over the flattened atom set. Exponential; keep rows*cols <= 20.
inline double oracle_smooth_h0_cond_global(const JointDist& j, double eps) {
    const std::size_t n = j.rows() * j.cols();
    if (n > 20) throw std::runtime_error("oracle_smooth_h0_cond_global: instance too large");
    const auto m = j.masses();
    std::size_t best = j.rows() + 1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double removed = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!(mask & (std::uint64_t{1} << i))) removed += m[i];
        if (removed > eps) continue;
        std::size_t worst = 0;
        for (symbol c = 0; c < j.cols(); ++c) {
            std::size_t s = 0;
            for (symbol r = 0; r < j.rows(); ++r) {
                const std::size_t i = r * j.cols() + c;
                if ((mask & (std::uint64_t{1} << i)) && m[i] > 0.0) ++s;
            }
            worst = std::max(worst, s);
        }
        worst = std::max<std::size_t>(worst, 1);
        best = std::min(best, worst);
    }
    return std::log2(static_cast<double>(best));
}

// Column-factored exhaustive variant: per column enumerate every keep-subset
// to get the cheapest removal for each kept size, then scan the worst-support
// target k. Handles alphabets up to ~12 rows.
inline double oracle_smooth_h0_cond(const JointDist& j, double eps) {
    if (j.rows() > 12) throw std::runtime_error("oracle_smooth_h0_cond: too many rows");
    const std::size_t rows = j.rows();
    std::vector<std::vector<double>> cheapest(j.cols());
    std::size_t max_support = 1;
    for (symbol c = 0; c < j.cols(); ++c) {
        std::vector<double> col(rows);
        for (symbol r = 0; r < rows; ++r) col[r] = j.at(r, c);
        auto& best = cheapest[c];
        best.assign(rows + 1, std::numeric_limits<double>::infinity());
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rows); ++mask) {
            double removed = 0.0;
            std::size_t kept = 0;
            for (std::size_t r = 0; r < rows; ++r) {
                if (mask & (std::uint64_t{1} << r)) {
                    if (col[r] > 0.0) ++kept;
                } else {
                    removed += col[r];
                }
            }
            best[kept] = std::min(best[kept], removed);
        }
        // cheapest removal with kept support at most s
        for (std::size_t s = 1; s <= rows; ++s) best[s] = std::min(best[s], best[s - 1]);
        std::size_t support = 0;
        for (double v : col)
            if (v > 0.0) ++support;
        max_support = std::max(max_support, support);
    }
    for (std::size_t k = 1; k <= max_support; ++k) {
        double cost = 0.0;
        for (const auto& best : cheapest) cost += best[std::min(k, best.size() - 1)];
        if (cost <= eps) return std::log2(static_cast<double>(k));
    }
    return std::log2(static_cast<double>(max_support));
}

// Minimal feasible scaling by bisection on the removal function
// sum_x max(0, p - lambda q). Monotone, so 200 halvings pin lambda to the
// last representable bit.
inline double oracle_smooth_d_inf(std::span<const double> p, std::span<const double> q,
                                  double eps) {
    double hi = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw std::runtime_error("oracle_smooth_d_inf: support violation");
        hi = std::max(hi, p[i] / q[i]);
    }
    if (eps == 0.0) return std::log2(hi); // definitional reduction
    const auto removal = [&](double lambda) {
        double r = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] > 0.0) r += std::max(0.0, p[i] - lambda * q[i]);
        return r;
    };
    if (removal(hi) > eps) throw std::runtime_error("oracle_smooth_d_inf: infeasible at max ratio");
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (removal(mid) <= eps)
            hi = mid;
        else
            lo = mid;
    }
    return std::log2(hi);
}

// ----- deterministic random instances ---------------------------------------

// Rescale to total exactly 1 (the residual lands on the heaviest atom).
inline void normalize_exact(std::vector<double>& masses) {
    double total = neumaier_sum(masses);
    for (double& m : masses) m /= total;
    total = neumaier_sum(masses);
    auto heaviest = std::max_element(masses.begin(), masses.end());
    *heaviest += 1.0 - total;
}

inline FiniteDist random_dist(RngStream& rng, std::size_t max_atoms, double zero_prob = 0.2) {
    const std::size_t n = 2 + rng.next_below(max_atoms - 1);
    std::vector<double> m(n);
    for (auto& v : m) {
        const double u = rng.next_unit();
        v = rng.next_unit() < zero_prob ? 0.0 : u * u + 1e-3;
    }
    bool any = false;
    for (double v : m) any = any || v > 0.0;
    if (!any) m[rng.next_below(n)] = 1.0;
    normalize_exact(m);
    return FiniteDist(std::move(m));
}

inline JointDist random_joint(RngStream& rng, std::size_t max_rows, std::size_t max_cols,
                              double zero_prob = 0.3) {
    const std::size_t r = 2 + rng.next_below(max_rows - 1);
    const std::size_t c = 2 + rng.next_below(max_cols - 1);
    std::vector<double> m(r * c);
    for (auto& v : m) {
        const double u = rng.next_unit();
        v = rng.next_unit() < zero_prob ? 0.0 : u * u + 1e-3;
    }
    bool any = false;
    for (double v : m) any = any || v > 0.0;
    if (!any) m[rng.next_below(r * c)] = 1.0;
    normalize_exact(m);
    return JointDist(std::move(m), r, c);
}

// Full-support variant for divergence pairs.
inline FiniteDist random_full_support_dist(RngStream& rng, std::size_t atoms) {
    std::vector<double> m(atoms);
    for (auto& v : m) v = rng.next_unit() + 1e-3;
    normalize_exact(m);
    return FiniteDist(std::move(m));
}

inline Kernel random_kernel(RngStream& rng, std::size_t given_size, std::size_t out_size) {
    std::vector<std::optional<FiniteDist>> rows;
    rows.reserve(given_size);
    for (std::size_t i = 0; i < given_size; ++i)
        rows.emplace_back(random_full_support_dist(rng, out_size));
    return Kernel(std::move(rows));
}

} // namespace oneshot::testing
