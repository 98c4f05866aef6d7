#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "oneshot/errors.hpp"
#include "oneshot/finite_dist.hpp"
#include "oneshot/math.hpp"

namespace oneshot {

// Joint pmf on a product alphabet, stored row-major. The row variable is the
// "first" coordinate (X in p_XY), the column variable the second.
class JointDist {
  public:
    JointDist(std::vector<double> masses, std::size_t rows, std::size_t cols)
        : masses_(std::move(masses)), rows_(rows), cols_(cols) {
        if (rows_ == 0 || cols_ == 0 || masses_.size() != rows_ * cols_)
            throw validation_error("joint distribution shape mismatch");
        for (double m : masses_) {
            if (!(m >= 0.0)) throw validation_error("joint distribution has a negative or NaN mass");
        }
        const double total = neumaier_sum(masses_);
        if (std::abs(total - 1.0) > kMassTolerance) {
            throw validation_error("joint masses sum to " + std::to_string(total) + ", expected 1");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double at(symbol r, symbol c) const { return masses_[r * cols_ + c]; }
    std::span<const double> masses() const { return masses_; }

    FiniteDist row_marginal() const {
        std::vector<double> m(rows_, 0.0);
        for (symbol r = 0; r < rows_; ++r) {
            std::vector<double> row(masses_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                                    masses_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
            m[r] = neumaier_sum(row);
        }
        return normalize_marginal(std::move(m));
    }

    FiniteDist col_marginal() const {
        std::vector<double> m(cols_, 0.0);
        for (symbol c = 0; c < cols_; ++c) {
            std::vector<double> col(rows_);
            for (symbol r = 0; r < rows_; ++r) col[r] = at(r, c);
            m[c] = neumaier_sum(col);
        }
        return normalize_marginal(std::move(m));
    }

    JointDist transposed() const {
        std::vector<double> t(masses_.size());
        for (symbol r = 0; r < rows_; ++r)
            for (symbol c = 0; c < cols_; ++c) t[c * rows_ + r] = at(r, c);
        return JointDist(std::move(t), cols_, rows_);
    }

    // Independent coupling of two marginals.
    static JointDist product(const FiniteDist& row, const FiniteDist& col) {
        std::vector<double> m(row.size() * col.size());
        for (symbol r = 0; r < row.size(); ++r)
            for (symbol c = 0; c < col.size(); ++c) m[r * col.size() + c] = row[r] * col[c];
        return JointDist(std::move(m), row.size(), col.size());
    }

    std::size_t support_size() const {
        std::size_t n = 0;
        for (double m : masses_)
            if (m > 0.0) ++n;
        return n;
    }

  private:
    // Row/column sums of a validated joint stay within the FiniteDist mass
    // tolerance, so plain construction re-validates them.
    static FiniteDist normalize_marginal(std::vector<double> m) {
        return FiniteDist(std::move(m));
    }

    std::vector<double> masses_;
    std::size_t rows_;
    std::size_t cols_;
};

inline void require_same_alphabet(const JointDist& a, const JointDist& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw validation_error("alphabet mismatch between joint distributions");
}

// Conditional rows q(.|given). Rows whose conditioning symbol has zero
// marginal mass carry no conditional law and are flagged absent.
class Kernel {
  public:
    explicit Kernel(std::vector<std::optional<FiniteDist>> rows) : rows_(std::move(rows)) {
        if (rows_.empty()) throw validation_error("kernel must have at least one row");
        std::size_t width = 0;
        for (const auto& r : rows_) {
            if (!r) continue;
            if (width == 0) width = r->size();
            if (r->size() != width) throw validation_error("kernel rows differ in width");
        }
        if (width == 0) throw validation_error("kernel has no present rows");
        width_ = width;
    }

    std::size_t size() const { return rows_.size(); }
    std::size_t width() const { return width_; }
    bool present(symbol given) const { return rows_[given].has_value(); }
    const FiniteDist& row(symbol given) const {
        if (!rows_[given]) throw validation_error("kernel row is absent (zero-mass conditioning symbol)");
        return *rows_[given];
    }

  private:
    std::vector<std::optional<FiniteDist>> rows_;
    std::size_t width_ = 0;
};

struct Decomposition {
    FiniteDist row_marginal;
    FiniteDist col_marginal;
    Kernel col_given_row;
};

// Split a joint into (row marginal, column marginal, column-given-row
// kernel). Reconstructing masses(r,c) = row_marginal[r] * kernel(r)[c]
// reproduces the input within kMassTolerance.
inline Decomposition marginals_and_conditional(const JointDist& j) {
    FiniteDist rm = j.row_marginal();
    FiniteDist cm = j.col_marginal();
    std::vector<std::optional<FiniteDist>> rows;
    rows.reserve(j.rows());
    for (symbol r = 0; r < j.rows(); ++r) {
        if (rm[r] <= 0.0) {
            rows.emplace_back(std::nullopt);
            continue;
        }
        std::vector<double> cond(j.cols());
        for (symbol c = 0; c < j.cols(); ++c) cond[c] = j.at(r, c) / rm[r];
        // Renormalize away the division rounding so the row passes validation.
        const double total = neumaier_sum(cond);
        for (double& v : cond) v /= total;
        rows.emplace_back(FiniteDist(std::move(cond)));
    }
    return Decomposition{std::move(rm), std::move(cm), Kernel(std::move(rows))};
}

// p_{XY}(x,y) = p_X(x) * k(y|x).
inline JointDist compose(const FiniteDist& row, const Kernel& col_given_row) {
    if (col_given_row.size() != row.size())
        throw validation_error("kernel size does not match marginal alphabet");
    const std::size_t cols = col_given_row.width();
    std::vector<double> m(row.size() * cols, 0.0);
    for (symbol r = 0; r < row.size(); ++r) {
        if (row[r] <= 0.0) continue;
        const FiniteDist& k = col_given_row.row(r);
        for (symbol c = 0; c < cols; ++c) m[r * cols + c] = row[r] * k[c];
    }
    return JointDist(std::move(m), row.size(), cols);
}

} // namespace oneshot
