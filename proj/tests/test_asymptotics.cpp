#include <doctest.h>

#include <cmath>
#include <vector>

#include "oneshot/asymptotics.hpp"

#include "oracles.hpp"

using namespace oneshot;

namespace {
const FiniteDist kP({0.5, 0.5});
const FiniteDist kQ({0.25, 0.75});
const JointDist kCorrelatedBits({0.45, 0.05, 0.05, 0.45}, 2, 2);
} // namespace

TEST_CASE("product_expand") {
    SUBCASE("n = 1 is the identity") {
        const FiniteDist e = product_expand(kQ, 1);
        CHECK(e.size() == 2);
        CHECK(e[0] == kQ[0]);
    }
    SUBCASE("fair coin cubed is uniform(8)") {
        const FiniteDist e = product_expand(FiniteDist::uniform(2), 3);
        CHECK(e.size() == 8);
        for (symbol i = 0; i < 8; ++i) CHECK(e[i] == doctest::Approx(0.125));
    }
    SUBCASE("hand product for (0.3, 0.7) squared") {
        const FiniteDist e = product_expand(FiniteDist({0.3, 0.7}), 2);
        CHECK(e[0] == doctest::Approx(0.09));
        CHECK(e[1] == doctest::Approx(0.21));
        CHECK(e[2] == doctest::Approx(0.21));
        CHECK(e[3] == doctest::Approx(0.49));
    }
    SUBCASE("joint expansion keeps marginal structure") {
        const JointDist e = product_expand(kCorrelatedBits, 2);
        CHECK(e.rows() == 4);
        CHECK(e.cols() == 4);
        CHECK(e.at(0, 0) == doctest::Approx(0.45 * 0.45));
        CHECK(e.at(1, 0) == doctest::Approx(0.45 * 0.05));
    }
    SUBCASE("atom budget guard") {
        CHECK_THROWS_AS(product_expand(FiniteDist::uniform(2), 30), resource_error);
        CHECK_THROWS_AS(product_expand(kCorrelatedBits, 15), resource_error);
    }
}

TEST_CASE("convergence toward the conditional entropy") {
    const auto seq = convergence_h0_cond(kCorrelatedBits, 0.01, 6);
    const double target = shannon_quantities(kCorrelatedBits).h_row_given_col;
    REQUIRE(seq.size() == 6);
    CHECK(seq[0].reference_bits == doctest::Approx(target));
    // normalized values stay within the alphabet bound and close in on target
    for (const auto& pt : seq) CHECK(pt.value_bits <= 1.0 + 1e-12);
    CHECK(std::abs(seq[5].value_bits - target) < std::abs(seq[0].value_bits - target));
}

TEST_CASE("independent base with eps = 0 hits the support entropy at every n") {
    const JointDist indep = JointDist::product(FiniteDist({0.5, 0.25, 0.25}), kP);
    const auto seq = convergence_h0_cond(indep, 0.0, 4);
    for (const auto& pt : seq)
        CHECK(pt.value_bits == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
}

TEST_CASE("larger eps shrinks the conditional sequence pointwise") {
    const auto tight = convergence_h0_cond(kCorrelatedBits, 0.001, 6);
    const auto loose = convergence_h0_cond(kCorrelatedBits, 0.1, 6);
    for (std::size_t i = 0; i < tight.size(); ++i)
        CHECK(loose[i].value_bits <= tight[i].value_bits + 1e-12);
}

TEST_CASE("convergence toward the divergence") {
    const auto seq = convergence_d_inf(kP, kQ, 0.01, 8);
    const double target = kl_divergence(kP, kQ);
    CHECK(seq[0].reference_bits == doctest::Approx(target));
    CHECK(std::abs(seq[7].value_bits - target) < std::abs(seq[0].value_bits - target));
    SUBCASE("identical pair is identically zero at eps = 0") {
        const auto zero = convergence_d_inf(kP, kP, 0.0, 4);
        for (const auto& pt : zero) CHECK(pt.value_bits == 0.0);
    }
    SUBCASE("identical pair with smoothing scales both atoms: log2(1-eps)/n") {
        const auto seq2 = convergence_d_inf(kP, kP, 0.25, 4);
        for (const auto& pt : seq2)
            CHECK(pt.value_bits == doctest::Approx(std::log2(0.75) / pt.n).epsilon(1e-12));
    }
    SUBCASE("larger eps shrinks every term") {
        const auto lo = convergence_d_inf(kP, kQ, 0.001, 6);
        const auto hi = convergence_d_inf(kP, kQ, 0.2, 6);
        for (std::size_t i = 0; i < lo.size(); ++i)
            CHECK(hi[i].value_bits <= lo[i].value_bits + 1e-12);
    }
}

TEST_CASE("info spectrum quantile") {
    SUBCASE("identical laws give zero at every level") {
        const FiniteDist pn = product_expand(kP, 4);
        for (double alpha : {0.1, 0.5, 0.9})
            CHECK(info_spectrum_quantile(pn, pn, alpha, 4) == 0.0);
    }
    SUBCASE("median concentrates near the divergence") {
        const int n = 16;
        const FiniteDist pn = product_expand(kP, n);
        const FiniteDist qn = product_expand(kQ, n);
        const double v = info_spectrum_quantile(pn, qn, 0.5, n);
        CHECK(std::abs(v - kl_divergence(kP, kQ)) < 0.1);
    }
    SUBCASE("non-increasing in alpha") {
        const int n = 6;
        const FiniteDist pn = product_expand(kP, n);
        const FiniteDist qn = product_expand(kQ, n);
        double prev = std::numeric_limits<double>::infinity();
        for (double alpha : {0.05, 0.2, 0.5, 0.8, 0.95}) {
            const double v = info_spectrum_quantile(pn, qn, alpha, n);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("ratio-capped truncation mass tends to one") {
    // a margin of 0.3 bits over the divergence makes the trend visible at
    // desk-scale n; tighter margins need hundreds of replications
    const double lambda = kl_divergence(kP, kQ) + 0.3;
    double first = 0.0, last = 0.0;
    for (int n : {2, 8, 14, 20}) {
        const FiniteDist pn = product_expand(kP, n);
        const FiniteDist qn = product_expand(kQ, n);
        const AppendixTruncation t = truncated_divergence(pn, qn, lambda, n);
        CHECK(t.value_bits <= lambda + 1e-12);
        if (n == 2) first = t.kept_mass;
        last = t.kept_mass;
    }
    CHECK(last > first);
    CHECK(last > 0.9);
}

TEST_CASE("upper tail mass above the smoothed rate obeys the eps + 2^{-n delta/2} cap") {
    const double delta = 0.1, eps = 0.05;
    for (int n = 1; n <= 10; ++n) {
        const FiniteDist pn = product_expand(kP, n);
        const FiniteDist qn = product_expand(kQ, n);
        const double rate = smooth_d_inf(pn, qn, eps).value_bits / n;
        const double tail = llr_upper_tail_mass(pn, qn, rate + delta, n);
        CHECK(tail <= eps + std::pow(2.0, -n * delta / 2.0) + 1e-12);
    }
}
