#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "oneshot/binning.hpp"
#include "oneshot/distortion.hpp"
#include "oneshot/errors.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"
#include "oneshot/rng.hpp"
#include "oneshot/sampling.hpp"
#include "oneshot/smooth.hpp"

namespace oneshot {

// Fixed-rate lossy code: 2^{ell_a} reproduction symbols drawn iid from the
// test channel's output marginal, minimum-distortion encoding.
struct RDCode {
    std::vector<symbol> codebook;
    int ell_a = 0;
};

inline RDCode build_rd_code(const JointDist& j, int ell_a, RngStream& rng) {
    if (ell_a < 0 || ell_a > 30) throw validation_error("ell_a must be in [0,30]");
    const CdfSampler draw_y(j.col_marginal());
    RDCode code;
    code.ell_a = ell_a;
    code.codebook.resize(std::uint64_t{1} << ell_a);
    for (auto& c : code.codebook) c = draw_y.draw(rng);
    return code;
}

// Sufficient rate for excess probability eps given a test channel whose
// smoothed max information at eps1 is I. A negative I means a single
// independent draw already covers the distortion ball, so zero rate works.
inline int rd_rate_bound(const JointDist& j, double eps, double eps1) {
    if (!(eps1 > 0.0 && eps1 < 1.0) || !(eps > 0.0 && eps < 1.0) || !(2.0 * eps1 < eps))
        throw validation_error("rd rate bound requires 0 < 2*eps1 < eps < 1");
    const double i_inf = smooth_i_inf(j, eps1).value_bits;
    if (i_inf < 0.0) return 0;
    return detail::ceil_rate(i_inf + log2_of(-ln_of(eps - 2.0 * eps1)));
}

// Encoder: index of the minimum-distortion codeword, ties to the smallest
// index.
inline std::uint64_t rd_encode(const RDCode& code, symbol x, const DistortionTable& dt) {
    std::uint64_t best = 0;
    double best_d = dt.at(x, code.codebook[0]);
    for (std::uint64_t i = 1; i < code.codebook.size(); ++i) {
        const double d = dt.at(x, code.codebook[i]);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

inline symbol rd_reproduction(const RDCode& code, symbol x, const DistortionTable& dt) {
    return code.codebook[rd_encode(code, x, dt)];
}

inline std::vector<symbol> rd_reproduction_map(const RDCode& code, const DistortionTable& dt) {
    std::vector<symbol> map(dt.rows());
    for (symbol x = 0; x < dt.rows(); ++x) map[x] = rd_reproduction(code, x, dt);
    return map;
}

// Exact probability, for this codebook, that the realized distortion exceeds
// gamma.
inline double rd_exact_excess_prob(const RDCode& code, const JointDist& j,
                                   const DistortionTable& dt, double gamma) {
    require_same_shape(j, dt);
    const FiniteDist p_x = j.row_marginal();
    double excess = 0.0;
    for (symbol x = 0; x < dt.rows(); ++x) {
        if (p_x[x] <= 0.0) continue;
        if (dt.at(x, rd_reproduction(code, x, dt)) > gamma) excess += p_x[x];
    }
    return excess;
}

// Codebook-averaged excess bound 2 eps1 + exp(-2^{ell_a} 2^{-I}).
inline double rd_average_bound(const JointDist& j, double eps1, int ell_a) {
    const double i_inf = smooth_i_inf(j, eps1).value_bits;
    return 2.0 * eps1 +
           std::exp(-std::pow(2.0, static_cast<double>(ell_a)) * std::pow(2.0, -i_inf));
}

// Zero-rate branch: when the smoothed max information is negative, a single
// independent draw of Y already meets the quantile with probability 1 - eps.
// Returns the exact probability under p_X x p_Y that the distortion exceeds
// the eps1-quantile.
inline double rd_zero_rate_check(const JointDist& j, const DistortionTable& dt, double eps,
                                 double eps1) {
    if (!(eps1 > 0.0 && eps1 < 1.0) || !(eps > 0.0 && eps < 1.0) || !(2.0 * eps1 < eps))
        throw validation_error("rd zero-rate check requires 0 < 2*eps1 < eps < 1");
    if (!(smooth_i_inf(j, eps1).value_bits < 0.0))
        throw validation_error("rd zero-rate check requires negative smoothed max information");
    const double gamma = max_distortion_quantile(j, dt, eps1);
    const FiniteDist p_x = j.row_marginal();
    const FiniteDist p_y = j.col_marginal();
    double excess = 0.0;
    for (symbol x = 0; x < dt.rows(); ++x)
        for (symbol y = 0; y < dt.cols(); ++y)
            if (dt.at(x, y) > gamma) excess += p_x[x] * p_y[y];
    return excess;
}

struct RDConverseAudit {
    bool pass = false;
    double i_inf_bits = 0.0; // on the induced (source, reproduction) joint
    double margin = 0.0;
};

// Any deterministic encoder/decoder pair induces a reproduction variable
// taking at most 2^{ell_a} values; its smoothed max information against the
// source bounds the rate from below.
inline RDConverseAudit rd_converse_audit(int ell_a, const std::vector<symbol>& reproduction_of_x,
                                         const JointDist& j, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("audit eps must be in (0,1)");
    if (reproduction_of_x.size() != j.rows())
        throw validation_error("reproduction map does not match the source alphabet");
    const FiniteDist p_x = j.row_marginal();
    std::vector<double> induced(j.rows() * j.cols(), 0.0);
    for (symbol x = 0; x < j.rows(); ++x) induced[x * j.cols() + reproduction_of_x[x]] += p_x[x];
    const JointDist joint_ind(std::move(induced), j.rows(), j.cols());

    RDConverseAudit a;
    a.i_inf_bits = smooth_i_inf(joint_ind, eps).value_bits;
    a.margin = ell_a - (a.i_inf_bits + log2_of(eps));
    a.pass = a.margin >= -kDerivedTolerance;
    return a;
}

} // namespace oneshot
