#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/math.hpp"

namespace oneshot {

using symbol = std::size_t;

// Probability mass function on a dense alphabet 0..n-1. Immutable after
// construction; construction validates nonnegativity and total mass 1 within
// kMassTolerance.
class FiniteDist {
  public:
    explicit FiniteDist(std::vector<double> masses) : masses_(std::move(masses)) {
        if (masses_.empty()) throw validation_error("distribution must have at least one atom");
        for (double m : masses_) {
            if (!(m >= 0.0)) throw validation_error("distribution has a negative or NaN mass");
        }
        const double total = neumaier_sum(masses_);
        if (std::abs(total - 1.0) > kMassTolerance) {
            throw validation_error("distribution masses sum to " + std::to_string(total) +
                                   ", expected 1");
        }
    }

    static FiniteDist uniform(std::size_t n) {
        return FiniteDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    static FiniteDist point_mass(std::size_t n, symbol at) {
        std::vector<double> m(n, 0.0);
        m.at(at) = 1.0;
        return FiniteDist(std::move(m));
    }

    std::size_t size() const { return masses_.size(); }
    double operator[](symbol i) const { return masses_[i]; }
    std::span<const double> masses() const { return masses_; }

    std::size_t support_size() const {
        std::size_t c = 0;
        for (double m : masses_)
            if (m > 0.0) ++c;
        return c;
    }

  private:
    std::vector<double> masses_;
};

inline void require_same_alphabet(const FiniteDist& a, const FiniteDist& b) {
    if (a.size() != b.size())
        throw validation_error("alphabet mismatch: " + std::to_string(a.size()) + " vs " +
                               std::to_string(b.size()));
}

} // namespace oneshot
