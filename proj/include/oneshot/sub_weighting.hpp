#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"

namespace oneshot {

// A nonnegative function dominated pointwise by a reference pmf with total
// mass at least 1 - epsilon: a member of the ball B^eps(reference). Shape is
// either a vector (cols == 1 semantics not used; is_matrix() distinguishes)
// or a matrix aligned with a JointDist.
class SubWeighting {
  public:
    SubWeighting(std::vector<double> weights, std::vector<double> reference, double epsilon)
        : SubWeighting(std::move(weights), std::move(reference), epsilon, 0, 0, false) {}

    SubWeighting(std::vector<double> weights, std::vector<double> reference, double epsilon,
                 std::size_t rows, std::size_t cols)
        : SubWeighting(std::move(weights), std::move(reference), epsilon, rows, cols, true) {}

    static SubWeighting of(const FiniteDist& ref, std::vector<double> weights, double eps) {
        return SubWeighting(std::move(weights),
                            std::vector<double>(ref.masses().begin(), ref.masses().end()), eps);
    }

    static SubWeighting of(const JointDist& ref, std::vector<double> weights, double eps) {
        return SubWeighting(std::move(weights),
                            std::vector<double>(ref.masses().begin(), ref.masses().end()), eps,
                            ref.rows(), ref.cols());
    }

    double epsilon() const { return epsilon_; }
    bool is_matrix() const { return matrix_; }
    std::size_t size() const { return weights_.size(); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    double at(symbol r, symbol c) const { return weights_[r * cols_ + c]; }
    std::span<const double> weights() const { return weights_; }
    std::span<const double> reference() const { return reference_; }

    double total() const { return neumaier_sum(weights_); }

    std::size_t support_size() const {
        std::size_t n = 0;
        for (double w : weights_)
            if (w > 0.0) ++n;
        return n;
    }

    bool in_support(std::size_t i) const { return weights_[i] > 0.0; }
    bool in_support(symbol r, symbol c) const { return at(r, c) > 0.0; }

  private:
    SubWeighting(std::vector<double> weights, std::vector<double> reference, double epsilon,
                 std::size_t rows, std::size_t cols, bool matrix)
        : weights_(std::move(weights)), reference_(std::move(reference)), epsilon_(epsilon),
          rows_(rows), cols_(cols), matrix_(matrix) {
        if (weights_.size() != reference_.size())
            throw validation_error("sub-weighting shape mismatch with reference");
        if (matrix_ && rows_ * cols_ != weights_.size())
            throw validation_error("sub-weighting matrix shape mismatch");
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (!(weights_[i] >= 0.0))
                throw validation_error("sub-weighting has a negative weight");
            if (weights_[i] > reference_[i] + kMassTolerance)
                throw validation_error("sub-weighting exceeds its reference pointwise");
        }
        if (total() < 1.0 - epsilon_ - kMassTolerance)
            throw validation_error("sub-weighting total " + std::to_string(total()) +
                                   " below 1 - eps = " + std::to_string(1.0 - epsilon_));
    }

    std::vector<double> weights_;
    std::vector<double> reference_;
    double epsilon_;
    std::size_t rows_;
    std::size_t cols_;
    bool matrix_;
};

} // namespace oneshot
