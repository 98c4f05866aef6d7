#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/joint_dist.hpp"

namespace oneshot {

// Bounded nonnegative distortion values d(x,y) on a product alphabet,
// row-major like JointDist.
class DistortionTable {
  public:
    DistortionTable(std::vector<double> values, std::size_t rows, std::size_t cols)
        : values_(std::move(values)), rows_(rows), cols_(cols) {
        if (rows_ == 0 || cols_ == 0 || values_.size() != rows_ * cols_)
            throw validation_error("distortion table shape mismatch");
        for (double v : values_) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw validation_error("distortion values must be finite and nonnegative");
        }
    }

    static DistortionTable hamming(std::size_t n) {
        std::vector<double> v(n * n, 1.0);
        for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 0.0;
        return DistortionTable(std::move(v), n, n);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double at(symbol r, symbol c) const { return values_[r * cols_ + c]; }

    double bound() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, v);
        return m;
    }

  private:
    std::vector<double> values_;
    std::size_t rows_;
    std::size_t cols_;
};

inline void require_same_shape(const JointDist& j, const DistortionTable& dt) {
    if (j.rows() != dt.rows() || j.cols() != dt.cols())
        throw validation_error("distortion table does not match joint alphabet");
}

// Max-distortion quantile: the smallest distortion value v whose cumulative
// joint mass Pr{d <= v} is strictly above 1 - eps. Comparisons are exact on
// the stored values; the strict inequality is part of the contract.
inline double max_distortion_quantile(const JointDist& j, const DistortionTable& dt, double eps) {
    require_same_shape(j, dt);
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("quantile eps must be in (0,1)");
    std::vector<std::pair<double, double>> atoms; // (distortion, mass)
    atoms.reserve(j.rows() * j.cols());
    for (symbol r = 0; r < j.rows(); ++r)
        for (symbol c = 0; c < j.cols(); ++c)
            if (j.at(r, c) > 0.0) atoms.emplace_back(dt.at(r, c), j.at(r, c));
    std::sort(atoms.begin(), atoms.end());
    double cum = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        cum += atoms[i].second;
        const bool last_of_value = (i + 1 == atoms.size()) || (atoms[i + 1].first != atoms[i].first);
        if (last_of_value && cum > 1.0 - eps) return atoms[i].first;
    }
    // Unreachable: the full mass 1 is strictly above 1 - eps for eps > 0.
    return atoms.empty() ? 0.0 : atoms.back().first;
}

} // namespace oneshot
