#pragma once

#include <vector>

#include "oneshot/finite_dist.hpp"
#include "oneshot/rng.hpp"

namespace oneshot {

// Inverse-CDF sampler. Precomputes the cumulative table once; draws are a
// binary search over it, deterministic for a given stream.
class CdfSampler {
  public:
    explicit CdfSampler(const FiniteDist& d) : cdf_(d.size()) {
        double acc = 0.0;
        for (symbol i = 0; i < d.size(); ++i) {
            acc += d[i];
            cdf_[i] = acc;
        }
        cdf_.back() = 1.0;
    }

    symbol draw(RngStream& rng) const {
        const double u = rng.next_unit();
        std::size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cdf_[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

  private:
    std::vector<double> cdf_;
};

inline symbol sample(const FiniteDist& d, RngStream& rng) { return CdfSampler(d).draw(rng); }

} // namespace oneshot
