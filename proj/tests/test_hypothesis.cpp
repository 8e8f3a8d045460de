#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "modnet/ensembles.hpp"
#include "modnet/hypothesis.hpp"

using namespace modnet;

namespace {

Tw1Table tiny_tw1() {
    // coarse synthetic grid, enough to exercise the test plumbing
    return Tw1Table({-4.0, -2.0, -1.27, 0.0, 1.0, 2.0},
                    {0.005, 0.10, 0.50, 0.90, 0.96, 0.995}, {});
}

ConvolutionF uniform_f(std::int64_t n) {
    // 1e5 evenly spaced points on [0, 1]
    std::vector<double> xs(100000);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = static_cast<double>(i + 1) / static_cast<double>(xs.size());
    return ConvolutionF(n, std::move(xs));
}

}  // namespace

TEST_CASE("method names and p-value formatting") {
    CHECK(test_method_name(TestMethod::ModularityI) == "modularity1");
    CHECK(test_method_name(TestMethod::ModularityII) == "modularity2");
    CHECK(test_method_name(TestMethod::LargestEigenvalue) == "eigenvalue");
    CHECK(test_method_name(TestMethod::EntrywiseMaximum) == "maxentry");

    PValue p;
    p.value = 0.0123;
    CHECK(p.to_string() == "0.0123");
    p.value = 1e-4;
    p.is_upper_bound = true;
    CHECK(p.to_string() == "<1e-04");
}

TEST_CASE("modularity test I on synthetic decompositions") {
    ModularityDecomposition md;
    md.n = 100;
    md.l1norm_sq = 60.0;
    md.q = 2.0 * std::sqrt(100.0) * md.l1norm_sq;  // statistic exactly zero

    const auto r = modularity_test_i_from(md, 0.05);
    CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.critical_value == doctest::Approx(1.6448536269514722).epsilon(1e-10));
    CHECK(r.p_value.value == doctest::Approx(0.5));
    CHECK_FALSE(r.reject);

    // exact-size cutoff from the limiting normal law
    const auto rl = modularity_test_i_from(md, 0.05, true);
    CHECK(rl.critical_value == doctest::Approx(normal_limit::quantile(0.95)).epsilon(1e-14));
    CHECK(rl.critical_value == doctest::Approx(0.8452857493).epsilon(1e-9));

    // nudging the statistic above the cutoff flips the decision
    md.q += (r.critical_value + 0.01) * 100.0;
    const auto r2 = modularity_test_i_from(md, 0.05);
    CHECK(r2.reject);
    CHECK(r2.p_value.value < 0.05);

    CHECK_THROWS_AS(modularity_test_i_from(md, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(modularity_test_i_from(md, 1.0), std::invalid_argument);
}

TEST_CASE("modularity test II against an explicit reference law") {
    const auto f = uniform_f(100);
    ModularityDecomposition md;
    md.n = 100;
    md.l1norm_sq = 60.0;

    SUBCASE("critical value and p come from the empirical law") {
        md.q = 2.0 * std::sqrt(100.0) * md.l1norm_sq + 0.5 * 100.0;  // statistic 0.5
        const auto r = modularity_test_ii_from(md, 0.05, f);
        CHECK(r.statistic == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.critical_value == doctest::Approx(f.quantile(0.95)).epsilon(1e-14));
        CHECK(r.p_value.value == doctest::Approx(0.5).epsilon(1e-4));
        CHECK_FALSE(r.reject);
    }
    SUBCASE("p below the sample resolution reports an upper bound") {
        md.q = 2.0 * std::sqrt(100.0) * md.l1norm_sq + 5.0 * 100.0;  // above all samples
        const auto r = modularity_test_ii_from(md, 0.05, f);
        CHECK(r.reject);
        CHECK(r.p_value.is_upper_bound);
        CHECK(r.p_value.value == doctest::Approx(1e-5));
    }
    SUBCASE("dimension mismatch is rejected") {
        md.q = 0.0;
        CHECK_THROWS_AS(modularity_test_ii_from(md, 0.05, uniform_f(50)), std::invalid_argument);
    }
}

TEST_CASE("largest eigenvalue test statistic and decision") {
    const auto tw1 = tiny_tw1();
    ModularityDecomposition md;
    md.n = 64;
    md.lambda1 = 2.0 * std::sqrt(64.0);

    auto r = largest_eigenvalue_test_from(md, 0.05, tw1);
    CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.critical_value == doctest::Approx(tw1.quantile(0.95)).epsilon(1e-14));
    CHECK_FALSE(r.reject);

    md.lambda1 = 2.0 * std::sqrt(64.0) + std::pow(64.0, -1.0 / 6.0);
    r = largest_eigenvalue_test_from(md, 0.05, tw1);
    CHECK(r.statistic == doctest::Approx(1.0).epsilon(1e-12));

    md.lambda1 = 2.0 * std::sqrt(64.0) + 100.0;
    r = largest_eigenvalue_test_from(md, 0.05, tw1);
    CHECK(r.reject);
    CHECK(r.p_value.is_upper_bound);
    CHECK(r.p_value.value == doctest::Approx(1e-4));
}

TEST_CASE("entrywise maximum test") {
    SUBCASE("statistic matches a direct computation") {
        const auto w = sample_goe(20, Seed{401, 0});
        const auto r = entrywise_max_test(w, 0.05);

        // independent recomputation: pairwise sample covariance of rows
        const Eigen::Index n = w.n();
        double tmax = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double mi = 0, mj = 0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    mi += w(i, k);
                    mj += w(j, k);
                }
                mi /= static_cast<double>(n);
                mj /= static_cast<double>(n);
                double sij = 0;
                for (Eigen::Index k = 0; k < n; ++k)
                    sij += (w(i, k) - mi) * (w(j, k) - mj);
                tmax = std::max(tmax, std::abs(sij) / static_cast<double>(n - 1));
            }
        const double nd = static_cast<double>(n);
        const double expected =
            nd * tmax * tmax - 4.0 * std::log(nd) + std::log(std::log(nd));
        CHECK(r.statistic == doctest::Approx(expected).epsilon(1e-12));
        CHECK(r.critical_value == doctest::Approx(gumbel_coherence::quantile(0.95)).epsilon(1e-14));
    }
    SUBCASE("correlation reading is scale invariant, covariance is not") {
        const auto w = sample_goe(15, Seed{402, 0});
        const auto scaled = w.scaled(3.0);
        CHECK(entrywise_max_test(w, 0.05, true).statistic ==
              doctest::Approx(entrywise_max_test(scaled, 0.05, true).statistic).epsilon(1e-12));
        CHECK(entrywise_max_test(w, 0.05).statistic !=
              doctest::Approx(entrywise_max_test(scaled, 0.05).statistic));
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(entrywise_max_test(sample_goe(2, Seed{}), 0.05), std::invalid_argument);
        CHECK_THROWS_AS(entrywise_max_test(SymmetricMatrix(Eigen::MatrixXd::Ones(4, 4)), 0.05),
                        std::invalid_argument);
    }
}

TEST_CASE("off-diagonal renormalization") {
    SUBCASE("hand computation on a 3x3 matrix") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
        m(0, 1) = m(1, 0) = 1.0;
        m(0, 2) = m(2, 0) = 2.0;
        m(1, 2) = m(2, 1) = 3.0;
        m(0, 0) = 7.0;  // diagonal must be ignored and zeroed
        const auto out = renormalize_offdiagonal(SymmetricMatrix(m));
        const double sd = std::sqrt(2.0 / 3.0);
        CHECK(out(0, 1) == doctest::Approx(-1.0 / sd).epsilon(1e-14));
        CHECK(out(0, 2) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(out(1, 2) == doctest::Approx(1.0 / sd).epsilon(1e-14));
        for (Eigen::Index i = 0; i < 3; ++i) CHECK(out(i, i) == 0.0);
    }
    SUBCASE("idempotent once standardized") {
        const auto w = renormalize_offdiagonal(sample_goe(10, Seed{411, 0}));
        const auto again = renormalize_offdiagonal(w);
        for (Eigen::Index i = 0; i < 10; ++i)
            for (Eigen::Index j = 0; j < 10; ++j)
                CHECK(again(i, j) == doctest::Approx(w(i, j)).epsilon(1e-12));
    }
    SUBCASE("degenerate input") {
        CHECK_THROWS_AS(renormalize_offdiagonal(SymmetricMatrix(Eigen::MatrixXd::Ones(3, 3))),
                        std::invalid_argument);
    }
}

TEST_CASE("recursive split recovers a planted balanced partition") {
    const Eigen::Index n = 200;
    auto params = make_balanced_spike(n, Seed{421, 0});
    // well above the detection threshold so the sign pattern is exact
    params.beta = 10.0 * std::sqrt(static_cast<double>(n));
    const auto w = sample_spiked(params, n, Seed{421, 1});

    SplitContext ctx;
    ctx.alpha = 0.05;
    ctx.max_depth = 1;
    ctx.method = TestMethod::ModularityI;
    const auto root = recursive_split(w, ctx);

    REQUIRE(root != nullptr);
    CHECK(root->test.reject);
    REQUIRE(root->positive_child != nullptr);
    REQUIRE(root->negative_child != nullptr);

    // the two children must reproduce the planted halves (up to global sign)
    std::set<Eigen::Index> pos(root->positive_child->members.begin(),
                               root->positive_child->members.end());
    std::set<Eigen::Index> neg(root->negative_child->members.begin(),
                               root->negative_child->members.end());
    std::set<Eigen::Index> first, second;
    for (Eigen::Index i = 0; i < n / 2; ++i) first.insert(i);
    for (Eigen::Index i = n / 2; i < n; ++i) second.insert(i);
    const bool direct = (pos == first && neg == second);
    const bool flipped = (pos == second && neg == first);
    CHECK((direct || flipped));
}

TEST_CASE("recursive split guards") {
    const auto w = sample_goe(10, Seed{431, 0});
    SplitContext ctx;

    ctx.method = TestMethod::LargestEigenvalue;  // no table supplied
    CHECK_THROWS_AS(recursive_split(w, ctx), std::invalid_argument);

    ctx.method = TestMethod::ModularityII;  // no convolution law supplied
    CHECK_THROWS_AS(recursive_split(w, ctx), std::invalid_argument);

    ctx.method = TestMethod::ModularityI;
    CHECK_THROWS_AS(recursive_split(sample_goe(3, Seed{}), ctx), std::invalid_argument);

    // a plain goe draw should essentially never split at alpha = 0.001
    ctx.alpha = 0.001;
    const auto node = recursive_split(w, ctx);
    CHECK(node->positive_child == nullptr);
    CHECK(node->negative_child == nullptr);
}
