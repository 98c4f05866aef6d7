#include <doctest.h>

#include <cmath>
#include <vector>

#include "oneshot/distance.hpp"
#include "oneshot/finite_dist.hpp"
#include "oneshot/joint_dist.hpp"
#include "oneshot/rng.hpp"
#include "oneshot/sampling.hpp"
#include "oneshot/shannon.hpp"
#include "oneshot/sub_weighting.hpp"

#include "oracles.hpp"

using namespace oneshot;

namespace {

JointDist make_joint(std::vector<double> m, std::size_t r, std::size_t c) {
    return JointDist(std::move(m), r, c);
}

} // namespace

TEST_CASE("FiniteDist validates its invariants") {
    CHECK_THROWS_AS(FiniteDist({0.5, 0.4}), validation_error);
    CHECK_THROWS_AS(FiniteDist({0.5, -0.5, 1.0}), validation_error);
    CHECK_THROWS_AS(FiniteDist(std::vector<double>{}), validation_error);
    const FiniteDist u = FiniteDist::uniform(4);
    CHECK(u.support_size() == 4);
    CHECK(u[2] == doctest::Approx(0.25));
}

TEST_CASE("l1 distance basics") {
    const FiniteDist u = FiniteDist::uniform(4);
    CHECK(l1_distance(u, u) == 0.0);
    CHECK(l1_distance(FiniteDist({1.0, 0.0}), FiniteDist({0.0, 1.0})) == 2.0);
    CHECK(l1_distance(FiniteDist({0.7, 0.3}), FiniteDist({0.5, 0.5})) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(l1_distance(u, FiniteDist::uniform(3)), validation_error);
}

TEST_CASE("l1 distance satisfies the triangle inequality on random triples") {
    RngStream rng(2024, 0);
    for (int i = 0; i < 200; ++i) {
        const FiniteDist a = testing::random_full_support_dist(rng, 6);
        const FiniteDist b = testing::random_full_support_dist(rng, 6);
        const FiniteDist c = testing::random_full_support_dist(rng, 6);
        CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
    }
}

TEST_CASE("marginals and conditional kernel") {
    SUBCASE("product joint has constant kernel rows") {
        const FiniteDist p({0.3, 0.7});
        const FiniteDist q({0.2, 0.5, 0.3});
        const JointDist j = JointDist::product(p, q);
        const Decomposition d = marginals_and_conditional(j);
        for (symbol r = 0; r < 2; ++r)
            for (symbol c = 0; c < 3; ++c)
                CHECK(d.col_given_row.row(r)[c] == doctest::Approx(q[c]).epsilon(1e-12));
    }
    SUBCASE("zero row is flagged absent") {
        const JointDist j = make_joint({0.5, 0.5, 0.0, 0.0}, 2, 2);
        const Decomposition d = marginals_and_conditional(j);
        CHECK(d.col_given_row.present(0));
        CHECK_FALSE(d.col_given_row.present(1));
        CHECK_THROWS_AS(d.col_given_row.row(1), validation_error);
    }
    SUBCASE("random joints reconstruct within 1e-12") {
        RngStream rng(7, 0);
        for (int i = 0; i < 100; ++i) {
            const JointDist j = testing::random_joint(rng, 3, 3);
            const Decomposition d = marginals_and_conditional(j);
            for (symbol r = 0; r < j.rows(); ++r) {
                for (symbol c = 0; c < j.cols(); ++c) {
                    const double rebuilt =
                        d.row_marginal[r] <= 0.0 ? 0.0 : d.row_marginal[r] * d.col_given_row.row(r)[c];
                    CHECK(std::abs(rebuilt - j.at(r, c)) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("sampling") {
    RngStream rng(11, 0);
    SUBCASE("point mass always returns its atom") {
        const FiniteDist d = FiniteDist::point_mass(4, 2);
        const CdfSampler s(d);
        for (int i = 0; i < 100; ++i) CHECK(s.draw(rng) == 2);
    }
    SUBCASE("uniform(2) frequencies within 0.01 of one half over 1e5 draws") {
        const CdfSampler s(FiniteDist::uniform(2));
        int ones = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) ones += s.draw(rng) == 1 ? 1 : 0;
        CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 0.01);
    }
    SUBCASE("identical seeds give identical draw sequences") {
        RngStream a(99, 3), b(99, 3);
        const CdfSampler s(FiniteDist({0.2, 0.3, 0.5}));
        for (int i = 0; i < 1000; ++i) CHECK(s.draw(a) == s.draw(b));
    }
}

TEST_CASE("shannon quantities") {
    SUBCASE("independent fair bits") {
        const JointDist j = JointDist::product(FiniteDist::uniform(2), FiniteDist::uniform(2));
        const ShannonSummary s = shannon_quantities(j);
        CHECK(s.h_joint == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(s.mutual_info == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("perfectly correlated fair bits") {
        const JointDist j = make_joint({0.5, 0.0, 0.0, 0.5}, 2, 2);
        const ShannonSummary s = shannon_quantities(j);
        CHECK(s.h_row_given_col == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(s.mutual_info == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("divergence value and support guard") {
        const double d = kl_divergence(FiniteDist({0.5, 0.5}), FiniteDist({0.25, 0.75}));
        CHECK(d == doctest::Approx(0.5 + 0.5 * std::log2(2.0 / 3.0)).epsilon(1e-12));
        CHECK_THROWS_AS(kl_divergence(FiniteDist({0.5, 0.5}), FiniteDist({1.0, 0.0})),
                        support_error);
    }
    SUBCASE("chain rule on random joints") {
        RngStream rng(13, 0);
        for (int i = 0; i < 50; ++i) {
            const JointDist j = testing::random_joint(rng, 4, 4);
            const ShannonSummary s = shannon_quantities(j);
            CHECK(s.h_joint == doctest::Approx(s.h_col + s.h_row_given_col).epsilon(1e-9));
        }
    }
}

TEST_CASE("sub-weighting invariants") {
    const FiniteDist p({0.5, 0.3, 0.2});
    CHECK_THROWS_AS(SubWeighting::of(p, {0.6, 0.3, 0.2}, 0.5), validation_error);
    CHECK_THROWS_AS(SubWeighting::of(p, {0.5, 0.0, 0.0}, 0.1), validation_error);
    const SubWeighting w = SubWeighting::of(p, {0.5, 0.3, 0.0}, 0.2);
    CHECK(w.total() == doctest::Approx(0.8));
    CHECK(w.support_size() == 2);
}
