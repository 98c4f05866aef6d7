#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oneshot/binning.hpp"
#include "oneshot/errors.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/math.hpp"
#include "oneshot/rejection.hpp"
#include "oneshot/rng.hpp"
#include "oneshot/sampling.hpp"
#include "oneshot/side_info.hpp"
#include "oneshot/smooth.hpp"

namespace oneshot {

// p_XU(x,u) = sum_y p_XY(x,y) k(u|y): the row-variable joint induced by a
// channel acting on the column variable.
inline JointDist lift_row_joint(const JointDist& j_xy, const Kernel& u_given_y) {
    if (u_given_y.size() != j_xy.cols())
        throw validation_error("kernel does not match the column alphabet");
    const std::size_t u_size = u_given_y.width();
    std::vector<double> m(j_xy.rows() * u_size, 0.0);
    const FiniteDist p_y = j_xy.col_marginal();
    for (symbol y = 0; y < j_xy.cols(); ++y) {
        if (p_y[y] <= 0.0) continue;
        const FiniteDist& k = u_given_y.row(y);
        for (symbol x = 0; x < j_xy.rows(); ++x) {
            if (j_xy.at(x, y) <= 0.0) continue;
            for (symbol u = 0; u < u_size; ++u) m[x * u_size + u] += j_xy.at(x, y) * k[u];
        }
    }
    return JointDist(std::move(m), j_xy.rows(), u_size);
}

// Source pair (X,Y) plus an auxiliary channel U|Y; X--Y--U holds by
// construction. Caches the derived pair joints the schemes need.
class HelperInstance {
  public:
    HelperInstance(JointDist joint_xy, Kernel u_given_y)
        : joint_xy_(std::move(joint_xy)), u_given_y_(std::move(u_given_y)),
          p_x_(joint_xy_.row_marginal()), p_y_(joint_xy_.col_marginal()),
          joint_uy_(compose(p_y_, u_given_y_).transposed()),
          joint_xu_(lift_row_joint(joint_xy_, u_given_y_)), p_u_(joint_uy_.row_marginal()) {
        for (symbol y = 0; y < joint_xy_.cols(); ++y)
            if (p_y_[y] > 0.0 && !u_given_y_.present(y))
                throw validation_error("auxiliary kernel missing a row with positive marginal");
    }

    const JointDist& joint_xy() const { return joint_xy_; }
    const Kernel& u_given_y() const { return u_given_y_; }
    const FiniteDist& p_x() const { return p_x_; }
    const FiniteDist& p_y() const { return p_y_; }
    const FiniteDist& p_u() const { return p_u_; }
    const JointDist& joint_uy() const { return joint_uy_; } // rows = U, cols = Y
    const JointDist& joint_xu() const { return joint_xu_; } // rows = X, cols = U
    std::size_t u_size() const { return u_given_y_.width(); }

  private:
    JointDist joint_xy_;
    Kernel u_given_y_;
    FiniteDist p_x_;
    FiniteDist p_y_;
    JointDist joint_uy_;
    JointDist joint_xu_;
    FiniteDist p_u_;
};

// ----- covering scheme ------------------------------------------------------

// Membership table of the helper-compatible set: pairs (u,y) whose residual
// conditional mass g(u,y) outside Supp(q) stays below sqrt(eps_a).
class FSet {
  public:
    FSet(std::vector<char> member, std::size_t u_size, std::size_t y_size)
        : member_(std::move(member)), u_size_(u_size), y_size_(y_size) {}

    bool contains(symbol u, symbol y) const { return member_[u * y_size_ + y] != 0; }
    std::size_t u_size() const { return u_size_; }
    std::size_t y_size() const { return y_size_; }

  private:
    std::vector<char> member_;
    std::size_t u_size_;
    std::size_t y_size_;
};

inline FSet build_f_set(const HelperInstance& inst, const SubWeighting& q_xu, double eps_a) {
    if (!(eps_a > 0.0 && eps_a < 1.0)) throw validation_error("eps_a must be in (0,1)");
    if (q_xu.rows() != inst.joint_xy().rows() || q_xu.cols() != inst.u_size())
        throw validation_error("witness shape does not match the instance");
    const std::size_t u_size = inst.u_size();
    const std::size_t y_size = inst.joint_xy().cols();
    const double threshold = std::sqrt(eps_a);
    std::vector<char> member(u_size * y_size, 1);
    for (symbol y = 0; y < y_size; ++y) {
        if (inst.p_y()[y] <= 0.0) continue; // massless column, membership immaterial
        for (symbol u = 0; u < u_size; ++u) {
            double g = 0.0;
            for (symbol x = 0; x < inst.joint_xy().rows(); ++x) {
                if (q_xu.in_support(x, u)) continue;
                g += inst.joint_xy().at(x, y) / inst.p_y()[y];
            }
            member[u * y_size + y] = g <= threshold ? 1 : 0;
        }
    }
    return FSet(std::move(member), u_size, y_size);
}

struct SchemeAParams {
    double eps_a = 0.0;
    double eps_b = 0.0;
    double eps_b_bar = 0.0;

    double eps() const { return eps_a + eps_b; }
};

inline void validate(const SchemeAParams& p) {
    if (!(p.eps_a > 0.0 && p.eps_a < 1.0) || !(p.eps_b > 0.0 && p.eps_b < 1.0) ||
        !(p.eps_b_bar > 0.0 && p.eps_b_bar < 1.0))
        throw validation_error("scheme A epsilons must lie in (0,1)");
    if (!(p.eps() < 1.0)) throw validation_error("scheme A total budget must stay below 1");
    if (!(p.eps_b_bar + 2.0 * std::sqrt(p.eps_a) < p.eps_b))
        throw validation_error("scheme A requires eps_b_bar + 2 sqrt(eps_a) < eps_b");
}

struct SchemeARateBounds {
    int ell_a_min = 0;
    int ell_b_min = 0;
    double i_inf_bits = 0.0; // I_inf^{eps_b_bar}[U;Y]
    bool i_inf_nonneg = true;
};

inline SchemeARateBounds scheme_a_rate_bounds(const HelperInstance& inst, const SchemeAParams& p) {
    validate(p);
    SchemeARateBounds b;
    b.i_inf_bits = smooth_i_inf(inst.joint_uy(), p.eps_b_bar).value_bits;
    b.i_inf_nonneg = b.i_inf_bits >= 0.0;
    b.ell_a_min = detail::ceil_rate(smooth_h0_cond(inst.joint_xu(), p.eps_a).value_bits -
                                    log2_of(p.eps() - p.eps_b));
    const double inner = p.eps_b - p.eps_b_bar - 2.0 * std::sqrt(p.eps_a);
    // inner in (0,1) was checked by validate(); -ln(inner) > 0
    const double ell_b_real = b.i_inf_bits + log2_of(-ln_of(inner));
    b.ell_b_min = b.i_inf_nonneg ? detail::ceil_rate(ell_b_real) : 0;
    return b;
}

struct SchemeACode {
    BinAssignment bins;                   // over X
    std::vector<symbol> codebook;         // 2^{ell_b} iid draws of U
    std::vector<std::uint64_t> b_encoder; // y -> codeword index (smallest compatible, else 0)
    SubWeighting q_xu;                    // smoothing witness at eps_a
    int ell_a = 0;
    int ell_b = 0;
};

inline SchemeACode build_scheme_a(const HelperInstance& inst, int ell_a, int ell_b,
                                  const SchemeAParams& p, RngStream& rng) {
    validate(p);
    if (ell_b < 0 || ell_b > 30) throw validation_error("ell_b must be in [0,30]");
    SmoothResult sm = smooth_h0_cond(inst.joint_xu(), p.eps_a);
    const FSet f = build_f_set(inst, sm.witness, p.eps_a);

    BinAssignment bins = random_bins(inst.joint_xy().rows(), ell_a, rng);
    const std::uint64_t words = std::uint64_t{1} << ell_b;
    const CdfSampler draw_u(inst.p_u());
    std::vector<symbol> codebook(words);
    for (std::uint64_t k = 0; k < words; ++k) codebook[k] = draw_u.draw(rng);

    std::vector<std::uint64_t> b_encoder(inst.joint_xy().cols(), 0);
    for (symbol y = 0; y < inst.joint_xy().cols(); ++y) {
        for (std::uint64_t k = 0; k < words; ++k) {
            if (f.contains(codebook[k], y)) {
                b_encoder[y] = k;
                break;
            }
        }
    }
    return SchemeACode{std::move(bins), std::move(codebook), std::move(b_encoder),
                       std::move(sm.witness), ell_a, ell_b};
}

struct SchemeAErrors {
    ErrorReport report;       // exact total error for this codebook
    double e1 = 0.0;          // no codeword compatible with y
    double e1c_and_e2 = 0.0;  // compatible codeword chosen but (x, u(k)) outside Supp(q)
    double e3 = 0.0;          // impostor in the bin sharing Supp(q) with u(k)
};

inline SchemeAErrors scheme_a_exact_error(const SchemeACode& code, const HelperInstance& inst) {
    const FSet f = build_f_set(inst, code.q_xu, code.q_xu.epsilon());
    const JointDist& j_xy = inst.joint_xy();
    const std::size_t u_size = inst.u_size();

    // e1 is a property of y alone
    std::vector<char> none_compatible(j_xy.cols(), 0);
    for (symbol y = 0; y < j_xy.cols(); ++y) {
        bool any = false;
        for (symbol u : code.codebook) {
            // membership is per codeword value; scan the codebook once per y
            if (f.contains(u, y)) {
                any = true;
                break;
            }
        }
        none_compatible[y] = any ? 0 : 1;
    }

    // candidate counts per (bin, u) for the decoder
    std::unordered_map<std::uint64_t, std::uint32_t> cell;
    for (symbol x = 0; x < j_xy.rows(); ++x)
        for (symbol u = 0; u < u_size; ++u)
            if (code.q_xu.in_support(x, u)) cell[code.bins[x] * u_size + u] += 1;

    SchemeAErrors out;
    double err = 0.0;
    for (symbol x = 0; x < j_xy.rows(); ++x) {
        for (symbol y = 0; y < j_xy.cols(); ++y) {
            const double mass = j_xy.at(x, y);
            if (mass <= 0.0) continue;
            const symbol u = code.codebook[code.b_encoder[y]];
            const bool in_q = code.q_xu.in_support(x, u);
            const auto it = cell.find(code.bins[x] * u_size + u);
            const std::uint32_t n = it == cell.end() ? 0 : it->second;

            if (none_compatible[y]) out.e1 += mass;
            if (!none_compatible[y] && !in_q) out.e1c_and_e2 += mass;
            if (n - (in_q ? 1 : 0) > 0) out.e3 += mass;
            if (!(in_q && n == 1)) err += mass;
        }
    }
    out.report = ErrorReport::exact(err);
    return out;
}

// ----- approximate auxiliary variable for the simulation scheme -------------

struct UPrimeResult {
    Kernel kernel;               // p_{U'|Y=y}
    std::vector<double> alpha;   // per-column deficiency of the witness
    double l1_joint_gap = 0.0;   // ||p_UY - p_U'Y||
    double d_inf_bits = 0.0;     // D_inf(p_{U'Y} || p_U x p_Y)
    double i_inf_eps_bits = 0.0; // I_inf^eps[U;Y] of the original pair
};

// Rescale the smoothing witness of I_inf^eps[U;Y] into a proper channel,
// falling back to the base marginal where the witness lost more than half a
// column. The result stays within 6 eps of the original pair in L1 and its
// max information exceeds the smoothed one by at most one bit. The joint is
// oriented rows = U, cols = Y.
inline UPrimeResult build_u_prime(const JointDist& j_uy, double eps) {
    require_eps_in_unit(eps);
    const FiniteDist p_u = j_uy.row_marginal();
    const FiniteDist p_y = j_uy.col_marginal();
    const std::size_t u_size = j_uy.rows();
    // At eps = 0 the witness is the joint itself, every alpha is exactly zero
    // and the construction reduces to the plain conditional.
    const SmoothResult sm = smooth_i_inf(j_uy, eps);

    std::vector<double> alpha(j_uy.cols(), 0.0);
    std::vector<std::optional<FiniteDist>> rows(j_uy.cols());
    for (symbol y = 0; y < j_uy.cols(); ++y) {
        if (p_y[y] <= 0.0) continue;
        std::vector<double> col(u_size);
        for (symbol u = 0; u < u_size; ++u) col[u] = sm.witness.at(u, y);
        const double kept = neumaier_sum(col) / p_y[y];
        alpha[y] = 1.0 - kept;
        std::vector<double> row(u_size);
        if (alpha[y] <= 0.5) {
            for (symbol u = 0; u < u_size; ++u) row[u] = col[u] / (p_y[y] * (1.0 - alpha[y]));
            const double total = neumaier_sum(row);
            for (double& v : row) v /= total;
        } else {
            for (symbol u = 0; u < u_size; ++u) row[u] = p_u[u];
        }
        rows[y] = FiniteDist(std::move(row));
    }
    Kernel k_prime{std::move(rows)};

    double l1 = 0.0;
    double worst_ratio = 0.0;
    for (symbol y = 0; y < j_uy.cols(); ++y) {
        if (p_y[y] <= 0.0) continue;
        const FiniteDist& row = k_prime.row(y);
        for (symbol u = 0; u < u_size; ++u) {
            l1 += std::abs(j_uy.at(u, y) - p_y[y] * row[u]);
            if (row[u] > 0.0) worst_ratio = std::max(worst_ratio, row[u] / p_u[u]);
        }
    }
    return UPrimeResult{std::move(k_prime), std::move(alpha), l1, log2_of(worst_ratio),
                        sm.value_bits};
}

inline UPrimeResult build_u_prime(const HelperInstance& inst, double eps) {
    return build_u_prime(inst.joint_uy(), eps);
}

// ----- simulation scheme -----------------------------------------------------

inline void validate_scheme_b(double eps_a, double eps_b) {
    if (!(eps_a > 0.0 && eps_a < 1.0) || !(eps_b > 0.0 && eps_b < 1.0))
        throw validation_error("scheme B epsilons must lie in (0,1)");
    if (!(2.0 * eps_a + 4.0 * eps_b < 1.0))
        throw validation_error("scheme B total budget 2 eps_a + 4 eps_b must stay below 1");
}

struct SchemeBRateBounds {
    int ell_a_min = 0;
    int ell_b_min = 0;
    double i_inf_bits = 0.0;
};

inline SchemeBRateBounds scheme_b_rate_bounds(const HelperInstance& inst, double eps_a,
                                              double eps_b) {
    validate_scheme_b(eps_a, eps_b);
    SchemeBRateBounds b;
    b.i_inf_bits = smooth_i_inf(inst.joint_uy(), eps_b).value_bits;
    b.ell_a_min = side_info_rate_bound(inst.joint_xu(), eps_a);
    b.ell_b_min = detail::ceil_rate(std::max(0.0, b.i_inf_bits + 1.0) +
                                    log2_of(ln_of(1.0 / eps_b)));
    return b;
}

// One realized simulation-scheme code: the binning side plus a fixed shared
// randomness realization (the L base/uniform pairs), which makes the whole
// encoder/decoder pair deterministic and exactly evaluable.
struct SchemeBCode {
    SideInfoCode side_info;
    UPrimeResult u_prime;
    std::vector<symbol> shared_u;         // L iid draws of p_U
    std::vector<double> shared_z;         // L iid uniforms
    std::vector<std::uint64_t> b_encoder; // y -> message in [0, L)
    std::vector<symbol> v_of_y;           // decoded auxiliary value per y
    int ell_a = 0;
    int ell_b = 0;
};

inline SchemeBCode build_scheme_b(const HelperInstance& inst, int ell_a, int ell_b, double eps_a,
                                  double eps_b, RngStream& rng) {
    validate_scheme_b(eps_a, eps_b);
    if (ell_b < 0 || ell_b > 30) throw validation_error("ell_b must be in [0,30]");
    SideInfoCode side_info = build_side_info_code(inst.joint_xu(), ell_a, eps_a, rng);
    UPrimeResult u_prime = build_u_prime(inst, eps_b);

    const std::uint64_t trials = std::uint64_t{1} << ell_b;
    const CdfSampler draw_u(inst.p_u());
    std::vector<symbol> shared_u(trials);
    std::vector<double> shared_z(trials);
    for (std::uint64_t j = 0; j < trials; ++j) {
        shared_u[j] = draw_u.draw(rng);
        shared_z[j] = rng.next_unit();
    }

    std::vector<std::uint64_t> b_encoder(inst.joint_xy().cols(), 0);
    std::vector<symbol> v_of_y(inst.joint_xy().cols(), shared_u[0]);
    for (symbol y = 0; y < inst.joint_xy().cols(); ++y) {
        if (inst.p_y()[y] <= 0.0) continue;
        const FiniteDist& target = u_prime.kernel.row(y);
        const double ratio = detail::max_ratio(target.masses(), inst.p_u().masses());
        std::uint64_t message = 0;
        for (std::uint64_t j = 0; j < trials; ++j) {
            const symbol u = shared_u[j];
            const double accept =
                inst.p_u()[u] > 0.0 ? target[u] / (inst.p_u()[u] * ratio) : 0.0;
            if (shared_z[j] <= accept) {
                message = j;
                break;
            }
        }
        b_encoder[y] = message;
        v_of_y[y] = shared_u[message];
    }
    return SchemeBCode{std::move(side_info), std::move(u_prime),  std::move(shared_u),
                       std::move(shared_z),  std::move(b_encoder), std::move(v_of_y),
                       ell_a,                ell_b};
}

// Exact error of the composed deterministic code by enumeration over (x,y).
inline ErrorReport scheme_b_exact_error(const SchemeBCode& code, const HelperInstance& inst) {
    const JointDist& j_xy = inst.joint_xy();
    double err = 0.0;
    for (symbol x = 0; x < j_xy.rows(); ++x) {
        for (symbol y = 0; y < j_xy.cols(); ++y) {
            const double mass = j_xy.at(x, y);
            if (mass <= 0.0) continue;
            const auto decoded =
                side_info_decode(code.side_info, code.side_info.bins[x], code.v_of_y[y]);
            if (!decoded || *decoded != x) err += mass;
        }
    }
    return ErrorReport::exact(err);
}

// Monte-Carlo error with the shared randomness redrawn every trial.
inline ErrorReport scheme_b_empirical_error(const HelperInstance& inst, int ell_a, int ell_b,
                                            double eps_a, double eps_b, std::uint64_t trials,
                                            RngStream& rng) {
    validate_scheme_b(eps_a, eps_b);
    if (trials < 1) throw validation_error("trial count must be positive");
    if (ell_b < 0 || ell_b > 30) throw validation_error("ell_b must be in [0,30]");
    SideInfoCode side = build_side_info_code(inst.joint_xu(), ell_a, eps_a, rng);
    const UPrimeResult u_prime = build_u_prime(inst, eps_b);
    const std::uint64_t budget = std::uint64_t{1} << ell_b;

    // per-y samplers reused across trials
    std::vector<std::optional<RejectionSampler>> samplers(inst.joint_xy().cols());
    for (symbol y = 0; y < inst.joint_xy().cols(); ++y)
        if (inst.p_y()[y] > 0.0)
            samplers[y].emplace(inst.p_u(), u_prime.kernel.row(y), budget);

    const std::size_t cols = inst.joint_xy().cols();
    std::vector<double> flat(inst.joint_xy().masses().begin(), inst.joint_xy().masses().end());
    FiniteDist flattened(std::move(flat));
    const CdfSampler draw_xy(flattened);

    std::uint64_t errors = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const symbol pair = draw_xy.draw(rng);
        const symbol x = pair / cols;
        const symbol y = pair % cols;
        const RejectionDraw v = rejection_encode_decode(*samplers[y], rng);
        const auto decoded = side_info_decode(side, side.bins[x], v.value);
        if (!decoded || *decoded != x) ++errors;
    }
    return ErrorReport::monte_carlo(static_cast<double>(errors) / static_cast<double>(trials),
                                    trials);
}

// ----- converse audit --------------------------------------------------------

struct HelperConverseAudit {
    bool pass = false;
    double eps_hat = 0.0;
    double margin_a = 0.0;
    double margin_b = 0.0;
};

// Audit a realized helper code: with U = e_B(Y) the deterministic message,
// the code's rates must dominate the smoothed conditional entropy of X given
// U and the smoothed max information between U and Y at the code's own error.
inline HelperConverseAudit helper_converse_audit(const HelperInstance& inst, int ell_a, int ell_b,
                                                 const std::vector<std::uint64_t>& b_encoder,
                                                 double eps_hat) {
    if (b_encoder.size() != inst.joint_xy().cols())
        throw validation_error("encoder table does not match the column alphabet");
    HelperConverseAudit a;
    a.eps_hat = eps_hat;
    const double eps_audit = std::min(eps_hat, 1.0 - kMassTolerance);

    const std::size_t messages = std::uint64_t{1} << ell_b;
    const JointDist& j_xy = inst.joint_xy();

    std::vector<double> xu(j_xy.rows() * messages, 0.0);
    for (symbol x = 0; x < j_xy.rows(); ++x)
        for (symbol y = 0; y < j_xy.cols(); ++y) xu[x * messages + b_encoder[y]] += j_xy.at(x, y);
    const JointDist joint_xm(std::move(xu), j_xy.rows(), messages);

    std::vector<double> my(messages * j_xy.cols(), 0.0);
    for (symbol y = 0; y < j_xy.cols(); ++y) my[b_encoder[y] * j_xy.cols() + y] = inst.p_y()[y];
    const JointDist joint_my(std::move(my), messages, j_xy.cols());

    a.margin_a = ell_a - smooth_h0_cond(joint_xm, eps_audit).value_bits;
    if (eps_hat <= 0.0) {
        a.margin_b = std::numeric_limits<double>::infinity();
    } else {
        a.margin_b =
            ell_b - (smooth_i_inf(joint_my, eps_audit).value_bits + log2_of(eps_hat));
    }
    a.pass = a.margin_a >= -kDerivedTolerance && a.margin_b >= -kDerivedTolerance;
    return a;
}

} // namespace oneshot
