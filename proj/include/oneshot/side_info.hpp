#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>

#include "oneshot/binning.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/smooth.hpp"

namespace oneshot {

// Point-to-point compression of the row variable with the column variable
// available at the decoder: bin the source, decode to the unique bin member
// whose smoothed conditional support contains the observed side information.
struct SideInfoCode {
    BinAssignment bins; // over the source (row) alphabet
    SubWeighting q;     // smoothing witness over rows x side-info columns
    double eps_a = 0.0;
};

// Sufficient rate at smoothing budget eps_a; the averaged decoding error of
// the resulting code is at most 2 * eps_a.
inline int side_info_rate_bound(const JointDist& j_xu, double eps_a) {
    if (!(eps_a > 0.0 && eps_a < 1.0)) throw validation_error("eps_a must be in (0,1)");
    return detail::ceil_rate(smooth_h0_cond(j_xu, eps_a).value_bits + log2_of(1.0 / eps_a));
}

inline SideInfoCode build_side_info_code(const JointDist& j_xu, int ell_a, double eps_a,
                                         RngStream& rng) {
    require_eps_in_unit(eps_a);
    SmoothResult sm = smooth_h0_cond(j_xu, eps_a);
    return SideInfoCode{random_bins(j_xu.rows(), ell_a, rng), std::move(sm.witness), eps_a};
}

inline std::optional<symbol> side_info_decode(const SideInfoCode& code, std::uint64_t bin,
                                              symbol u) {
    std::optional<symbol> found;
    for (symbol x = 0; x < code.q.rows(); ++x) {
        if (code.bins[x] != bin || !code.q.in_support(x, u)) continue;
        if (found) return std::nullopt;
        found = x;
    }
    return found;
}

inline ErrorReport side_info_exact_error(const SideInfoCode& code, const JointDist& j_xu) {
    if (j_xu.rows() != code.q.rows() || j_xu.cols() != code.q.cols())
        throw validation_error("code alphabet does not match joint");
    // candidates per (bin, u): q-support rows landing in the bin
    std::unordered_map<std::uint64_t, std::uint32_t> cell;
    for (symbol x = 0; x < j_xu.rows(); ++x)
        for (symbol u = 0; u < j_xu.cols(); ++u)
            if (code.q.in_support(x, u)) cell[code.bins[x] * j_xu.cols() + u] += 1;

    double err = 0.0;
    for (symbol x = 0; x < j_xu.rows(); ++x) {
        for (symbol u = 0; u < j_xu.cols(); ++u) {
            const double mass = j_xu.at(x, u);
            if (mass <= 0.0) continue;
            const auto it = cell.find(code.bins[x] * j_xu.cols() + u);
            const std::uint32_t n = it == cell.end() ? 0 : it->second;
            const bool correct = code.q.in_support(x, u) && n == 1;
            if (!correct) err += mass;
        }
    }
    return ErrorReport::exact(err);
}

} // namespace oneshot
