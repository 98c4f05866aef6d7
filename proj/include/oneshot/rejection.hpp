#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/finite_dist.hpp"
#include "oneshot/math.hpp"
#include "oneshot/rng.hpp"
#include "oneshot/sampling.hpp"
#include "oneshot/smooth.hpp"

namespace oneshot {

// Simulates a target law q from iid draws of a base law p_U: draw (U,Z) with
// Z uniform on [0,1) and accept iff Z <= 2^{-D_inf(q||p_U)} q(U)/p_U(U). The
// first accepted index among L trials is the message; its draw has law q
// exactly, conditioned on acceptance.
class RejectionSampler {
  public:
    RejectionSampler(FiniteDist base, FiniteDist target, std::uint64_t trial_budget)
        : base_(std::move(base)), target_(std::move(target)), trials_(trial_budget),
          base_sampler_(base_) {
        require_same_alphabet(base_, target_);
        if (trials_ < 1) throw validation_error("rejection sampler needs at least one trial");
        // max ratio doubles as the support check
        max_ratio_ = detail::max_ratio(target_.masses(), base_.masses());
        dinf_bits_ = log2_of(max_ratio_);
    }

    const FiniteDist& base() const { return base_; }
    const FiniteDist& target() const { return target_; }
    std::uint64_t trial_budget() const { return trials_; }
    double dinf_bits() const { return dinf_bits_; }

    // Per-trial acceptance probability 2^{-D_inf} = 1 / max ratio.
    double acceptance_rate() const { return 1.0 / max_ratio_; }

    double acceptance_prob(symbol u) const {
        if (base_[u] <= 0.0) return 0.0;
        return target_[u] / (base_[u] * max_ratio_);
    }

    struct Trial {
        symbol u;
        bool accepted;
    };

    Trial single_trial(RngStream& rng) const {
        const symbol u = base_sampler_.draw(rng);
        const double z = rng.next_unit();
        return Trial{u, z <= acceptance_prob(u)};
    }

  private:
    FiniteDist base_;
    FiniteDist target_;
    std::uint64_t trials_;
    CdfSampler base_sampler_;
    double max_ratio_ = 1.0;
    double dinf_bits_ = 0.0;
};

struct RejectionDraw {
    symbol value;        // V = U at the first accepted index (U_1 on total rejection)
    std::uint64_t index; // 1-based accepted index, trial_budget()+1 if none accepted
    bool rejected_all;
};

// Run the L-trial accept/reject chain once.
inline RejectionDraw rejection_encode_decode(const RejectionSampler& s, RngStream& rng) {
    symbol first = 0;
    for (std::uint64_t j = 1; j <= s.trial_budget(); ++j) {
        const auto t = s.single_trial(rng);
        if (j == 1) first = t.u;
        if (t.accepted) return RejectionDraw{t.u, j, false};
    }
    return RejectionDraw{first, s.trial_budget() + 1, true};
}

struct RejectionLaw {
    FiniteDist output_law; // exact law of V
    double rejection_prob; // rho = Pr{no trial accepts} = (1 - 2^{-D})^L
    double l1_to_target;   // ||p_V - q||
    double l1_bound;       // 2 exp(-L 2^{-D})
};

// Closed-form output law: p_V = (1-rho) q + rho r with r the law of a
// rejected base draw. When D_inf = 0 the target equals the base and every
// trial accepts.
inline RejectionLaw rejection_exact_law(const RejectionSampler& s) {
    const double accept = s.acceptance_rate();
    const double bound =
        2.0 * std::exp(-static_cast<double>(s.trial_budget()) * accept);
    if (accept >= 1.0) {
        return RejectionLaw{s.target(), 0.0, 0.0, bound};
    }
    const double rho = std::pow(1.0 - accept, static_cast<double>(s.trial_budget()));
    const std::size_t n = s.base().size();
    std::vector<double> rejected(n, 0.0);
    for (symbol u = 0; u < n; ++u)
        rejected[u] = s.base()[u] * (1.0 - s.acceptance_prob(u)) / (1.0 - accept);
    std::vector<double> out(n, 0.0);
    for (symbol u = 0; u < n; ++u) out[u] = (1.0 - rho) * s.target()[u] + rho * rejected[u];
    // rescale away the accumulated rounding; the defect is at ulp scale
    const double total = neumaier_sum(out);
    for (double& v : out) v /= total;
    FiniteDist law(std::move(out));
    double l1 = 0.0;
    for (symbol u = 0; u < n; ++u) l1 += std::abs(law[u] - s.target()[u]);
    return RejectionLaw{std::move(law), rho, l1, bound};
}

} // namespace oneshot
