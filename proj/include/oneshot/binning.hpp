#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"
#include "oneshot/rng.hpp"
#include "oneshot/smooth.hpp"

namespace oneshot {

// Uniform independent assignment of a dense alphabet to 2^ell bins.
struct BinAssignment {
    std::vector<std::uint64_t> bins; // symbol -> bin index in [0, 2^ell)
    int ell = 0;

    std::uint64_t bin_count() const { return std::uint64_t{1} << ell; }
    std::uint64_t operator[](symbol s) const { return bins[s]; }
};

inline BinAssignment random_bins(std::size_t alphabet_size, int ell, RngStream& rng) {
    if (ell < 0 || ell > 30) throw validation_error("bin rate ell must be in [0,30]");
    BinAssignment a;
    a.ell = ell;
    a.bins.resize(alphabet_size);
    for (symbol s = 0; s < alphabet_size; ++s) a.bins[s] = rng.next_below(a.bin_count());
    return a;
}

struct ErrorReport {
    enum class Method { exact, monte_carlo };

    double error_prob = 0.0;
    Method method = Method::exact;
    std::uint64_t trials = 0;
    double confidence_radius = 0.0; // 3 sigma for MC estimates, 0 for exact

    static ErrorReport exact(double p) { return ErrorReport{p, Method::exact, 0, 0.0}; }

    static ErrorReport monte_carlo(double p, std::uint64_t trials) {
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
        return ErrorReport{p, Method::monte_carlo, trials, 3.0 * sigma};
    }
};

// One realized distributed code: independent bin maps for both sources plus
// the truncated support set the joint decoder searches.
struct SWCode {
    BinAssignment bin_row; // over the row alphabet (X)
    BinAssignment bin_col; // over the column alphabet (Y)
    SubWeighting q;        // truncation in B^{eps/2}(p), matrix-shaped
};

inline SWCode build_sw_code(const JointDist& j, int ell_a, int ell_b, double eps, RngStream& rng) {
    BinAssignment ba = random_bins(j.rows(), ell_a, rng);
    BinAssignment bb = random_bins(j.cols(), ell_b, rng);
    return SWCode{std::move(ba), std::move(bb), sw_truncation(j, eps)};
}

// Declare the unique q-positive pair in the received bin product; none or
// several candidates is a decoding failure (a value, not a fault).
inline std::optional<std::pair<symbol, symbol>> sw_decode(const SWCode& code, std::uint64_t i,
                                                          std::uint64_t jdx) {
    std::optional<std::pair<symbol, symbol>> found;
    for (symbol r = 0; r < code.q.rows(); ++r) {
        if (code.bin_row[r] != i) continue;
        for (symbol c = 0; c < code.q.cols(); ++c) {
            if (code.bin_col[c] != jdx || !code.q.in_support(r, c)) continue;
            if (found) return std::nullopt;
            found = std::make_pair(r, c);
        }
    }
    return found;
}

struct SWErrorBreakdown {
    ErrorReport report; // exact total decoding error for this codebook
    double e1 = 0.0;    // source pair outside Supp(q)
    double e2 = 0.0;    // q-positive impostor sharing the row bin
    double e3 = 0.0;    // q-positive impostor sharing the column bin
    double e4 = 0.0;    // q-positive impostor pair sharing both bins
};

// Exact per-codebook evaluation by full enumeration of the alphabet; the only
// randomness in a sweep is over codebooks.
inline SWErrorBreakdown sw_exact_error(const SWCode& code, const JointDist& j) {
    if (j.rows() != code.q.rows() || j.cols() != code.q.cols())
        throw validation_error("code alphabet does not match joint");
    const std::size_t rows = j.rows(), cols = j.cols();

    // Occupancy counts of q-support atoms per bin slice.
    std::unordered_map<std::uint64_t, std::uint32_t> by_rowbin_col; // (i, y)
    std::unordered_map<std::uint64_t, std::uint32_t> by_colbin_row; // (j, x)
    std::unordered_map<std::uint64_t, std::uint32_t> by_binpair;    // (i, j)
    for (symbol r = 0; r < rows; ++r) {
        for (symbol c = 0; c < cols; ++c) {
            if (!code.q.in_support(r, c)) continue;
            by_rowbin_col[code.bin_row[r] * cols + c] += 1;
            by_colbin_row[code.bin_col[c] * rows + r] += 1;
            by_binpair[code.bin_row[r] * code.bin_col.bin_count() + code.bin_col[c]] += 1;
        }
    }
    const auto count = [](const std::unordered_map<std::uint64_t, std::uint32_t>& m,
                          std::uint64_t key) -> std::uint32_t {
        const auto it = m.find(key);
        return it == m.end() ? 0 : it->second;
    };

    SWErrorBreakdown out;
    double err = 0.0;
    for (symbol r = 0; r < rows; ++r) {
        for (symbol c = 0; c < cols; ++c) {
            const double mass = j.at(r, c);
            if (mass <= 0.0) continue;
            const std::uint64_t i = code.bin_row[r];
            const std::uint64_t jb = code.bin_col[c];
            const std::uint32_t in_q = code.q.in_support(r, c) ? 1 : 0;
            const std::uint32_t row_slice = count(by_rowbin_col, i * cols + c);
            const std::uint32_t col_slice = count(by_colbin_row, jb * rows + r);
            const std::uint32_t cell = count(by_binpair, i * code.bin_col.bin_count() + jb);

            if (!in_q) out.e1 += mass;
            if (row_slice - in_q > 0) out.e2 += mass;
            if (col_slice - in_q > 0) out.e3 += mass;
            // impostor pairs differing in both coordinates, by inclusion-exclusion
            const std::int64_t impostors = static_cast<std::int64_t>(cell) - row_slice - col_slice + in_q;
            if (impostors > 0) out.e4 += mass;

            const bool correct = in_q && cell == 1;
            if (!correct) err += mass;
        }
    }
    out.report = ErrorReport::exact(err);
    return out;
}

namespace detail {
inline int ceil_rate(double v) {
    const double c = std::ceil(v);
    return c < 0.0 ? 0 : static_cast<int>(c);
}
} // namespace detail

struct SWRateBounds {
    int ell_a_min = 0;
    int ell_b_min = 0;
    int sum_min = 0;
};

// Message lengths sufficient for the distributed codec at overall budget eps:
// the three smoothed-entropy right-hand sides rounded up to whole bits.
inline SWRateBounds sw_rate_bounds(const JointDist& j, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("eps must be in (0,1)");
    const double slack = -log2_of(eps / 6.0);
    SWRateBounds b;
    b.ell_a_min = detail::ceil_rate(smooth_h0_cond(j, eps / 6.0).value_bits + slack);
    b.ell_b_min = detail::ceil_rate(smooth_h0_cond(j.transposed(), eps / 6.0).value_bits + slack);
    b.sum_min = detail::ceil_rate(smooth_h0_joint(j, eps / 6.0).value_bits + slack);
    return b;
}

// Smallest per-source rates meeting all three bounds.
inline std::pair<int, int> sw_default_rates(const SWRateBounds& b) {
    const int ell_a = b.ell_a_min;
    const int ell_b = std::max(b.ell_b_min, b.sum_min - b.ell_a_min);
    return {ell_a, ell_b};
}

struct SWConverseAudit {
    bool pass = false;
    double eps_hat = 0.0;
    double margin_a = 0.0;
    double margin_b = 0.0;
    double margin_sum = 0.0;
};

// Check a realized code's rates against the converse lower bounds implied by
// its own exact error. These hold for every code, so a failed audit is a
// test failure, not a runtime error.
inline SWConverseAudit sw_converse_audit(const SWCode& code, const JointDist& j) {
    SWConverseAudit a;
    a.eps_hat = sw_exact_error(code, j).report.error_prob;
    const double ell_a = code.bin_row.ell;
    const double ell_b = code.bin_col.ell;
    if (a.eps_hat >= 1.0) {
        // Limit case: the bounds collapse to zero as the error tends to 1.
        a.margin_a = ell_a;
        a.margin_b = ell_b;
        a.margin_sum = ell_a + ell_b;
    } else {
        a.margin_a = ell_a - smooth_h0_cond(j, a.eps_hat).value_bits;
        a.margin_b = ell_b - smooth_h0_cond(j.transposed(), a.eps_hat).value_bits;
        a.margin_sum = ell_a + ell_b - smooth_h0_joint(j, a.eps_hat).value_bits;
    }
    a.pass = a.margin_a >= -kDerivedTolerance && a.margin_b >= -kDerivedTolerance &&
             a.margin_sum >= -kDerivedTolerance;
    return a;
}

} // namespace oneshot
