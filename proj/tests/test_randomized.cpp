#include <cmath>

#include "doctest.h"
#include "ensbound/error.hpp"
#include "ensbound/randomized.hpp"
#include "ensbound/sparsity.hpp"
#include "ensbound/variance.hpp"
#include "support.hpp"

using namespace ensbound;
using namespace testing_support;

namespace {
// Cluster 0: opposite stumps at 0.25 each (variance 1 at every x > 0); cluster 1:
// two opposite stumps with within-cluster variance 1/4 at x > 0.1.
struct CvFixture {
    ConvexEnsemble f;
    ClusterDecomposition c;
    Dataset data;
};

CvFixture variance_fixture() {
    const double p = (1.0 + std::sqrt(0.75)) / 2.0;
    ConvexEnsemble f({{0.25, Stump{0, 0.0, 1}},
                      {0.25, Stump{0, 0.0, -1}},
                      {0.5 * p, Stump{0, 0.1, 1}},
                      {0.5 * (1.0 - p), Stump{0, 0.1, -1}}});
    const std::vector<std::size_t> a{0, 0, 1, 1};
    auto c = partition_decomposition(f, a);
    return {f, c, one_d({0.5}, {1})};
}

BoundParams params_n(std::size_t n) {
    BoundParams p;
    p.n = n;
    p.delta_grid = {0.5};
    return p;
}

ConvexEnsemble maurey_fixture() {
    std::vector<Term> terms{{0.3, Stump{0, 0.0, 1}}, {0.2, Stump{1, 0.0, -1}}};
    const double thr[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (int k = 0; k < 5; ++k) terms.push_back({0.1, Stump{static_cast<std::size_t>(k % 2), thr[k], k % 2 ? 1 : -1}});
    return normalize(ConvexEnsemble(terms));
}
}  // namespace

TEST_SUITE("randomized") {
    TEST_CASE("sample sizes") {
        CHECK(maurey_size(0.5, 0.1, 100.0) == 231);
        CHECK(std::exp(-231 * 0.01 / (2 * 0.25)) == doctest::Approx(0.0098528).epsilon(1e-5));
        const double gamma = 0.4, delta = 0.2, n = 500.0;
        const double N = 4.0 * gamma / (delta * delta) * std::log(n);
        CHECK(std::exp(-0.25 * N * delta * delta / gamma) == doctest::Approx(1.0 / n).epsilon(1e-12));
        CHECK(bernstein_size(gamma, delta, n) == static_cast<std::size_t>(std::ceil(N)));
    }

    TEST_CASE("maurey sample degenerate cases") {
        const auto f = maurey_fixture();
        const auto data = random_dataset(20, 2, 1);
        const auto full = maurey_sample(f, static_cast<long long>(f.size()), 10, 3);
        CHECK(full.head_only);
        for (std::size_t i = 0; i < data.n(); ++i) {
            CHECK(full(data.row(i)) == doctest::Approx(evaluate_ensemble(f, data.row(i))).epsilon(1e-14));
        }
        const auto atom_tail = normalize(ConvexEnsemble({{0.6, Stump{0, 0.0, 1}}, {0.4, Stump{1, 0.3, -1}}}));
        for (std::uint64_t s = 0; s < 5; ++s) {
            const auto g = maurey_sample(atom_tail, 1, 7, s);
            for (std::size_t i = 0; i < data.n(); ++i) {
                CHECK(g(data.row(i)) == doctest::Approx(evaluate_ensemble(atom_tail, data.row(i))).epsilon(1e-14));
            }
        }
        const auto a = maurey_sample(f, 2, 50, 9);
        const auto b = maurey_sample(f, 2, 50, 9);
        CHECK(a.draws == b.draws);
        for (auto k : a.draws) CHECK(k >= 2);
        CHECK_THROWS_AS(maurey_sample(f, 2, 0, 1), ValidationError);
        CHECK_THROWS_AS(maurey_sample(f, 99, 5, 1), ValidationError);
    }

    TEST_CASE("maurey tail check") {
        const auto f = maurey_fixture();
        CHECK(tail_weight(f, 2) == doctest::Approx(0.5));
        const auto data = random_dataset(100, 2, 7);
        const auto r = check_maurey_tail(f, data, 0.1, 2, params_n(100), 20000, 11);
        CHECK(r.N == 231);
        CHECK(r.pass);
        CHECK(r.unbiased_pass);
        CHECK(r.one_sided.max_frequency <= r.two_sided.max_frequency);
        CHECK(r.two_sided.ceiling == doctest::Approx(std::exp(-231 * 0.01 / 0.5)));
        CHECK(r.target == doctest::Approx(0.01));
        const auto zero = check_maurey_tail(f, data, 0.1, static_cast<long long>(f.size()), params_n(100), 100, 1);
        CHECK(zero.two_sided.max_frequency == 0.0);
        CHECK(zero.pass);
        const auto again = check_maurey_tail(f, data, 0.1, 2, params_n(100), 2000, 11);
        CHECK(to_json(again).dump() == to_json(check_maurey_tail(f, data, 0.1, 2, params_n(100), 2000, 11)).dump());
    }

    TEST_CASE("cluster sampler") {
        const auto fx = variance_fixture();
        // atom clusters reproduce f
        const std::vector<std::size_t> singles{0, 1, 2, 3};
        const auto atoms = partition_decomposition(fx.f, singles);
        const auto g = cluster_sample(atoms, 5, 1);
        CHECK(g(atoms, fx.f, fx.data.row(0)) == doctest::Approx(evaluate_ensemble(fx.f, fx.data.row(0))));
        // m = 1 is the d = 0 Maurey construction: both are unbiased with the same variance
        const auto one = partition_decomposition(fx.f, std::vector<std::size_t>(4, 0));
        const auto s = cluster_sample(one, 3, 2);
        for (const auto& pick : s.picks) CHECK(pick.size() == 1);
        const auto r = check_cluster_variance(one, fx.f, fx.data, 20000, 3);
        CHECK(r.analytic[0] == doctest::Approx(pointwise_variance(fx.f, fx.data.row(0))));
        CHECK(r.pass);
        CHECK_THROWS_AS(check_cluster_variance(one, fx.f, fx.data, 50, 3), ValidationError);
    }

    TEST_CASE("cluster variance Monte Carlo on the 0.3125 fixture") {
        const auto fx = variance_fixture();
        const auto r = check_cluster_variance(fx.c, fx.f, fx.data, 100000, 5);
        CHECK(r.analytic[0] == doctest::Approx(0.3125));
        CHECK(r.pass);
        CHECK(r.max_mean_dev_stderr <= 4.0);
        // atoms: both sides zero
        const auto atoms = partition_decomposition(fx.f, std::vector<std::size_t>{0, 1, 2, 3});
        const auto z = check_cluster_variance(atoms, fx.f, fx.data, 200, 5);
        CHECK(z.monte_carlo[0] == 0.0);
        CHECK(z.analytic[0] == 0.0);
    }

    TEST_CASE("halving a cluster mass follows the alpha-squared law") {
        // cluster 0 alone has variance 1 at x; halving it next to a constant balancer gives 1/4
        const ConvexEnsemble f({{0.25, Stump{0, 0.0, 1}}, {0.25, Stump{0, 0.0, -1}}, {0.5, Stump{0, -5.0, 1}}});
        const auto c = partition_decomposition(f, std::vector<std::size_t>{0, 0, 1});
        const auto data = one_d({0.5, 1.5}, {1, -1});
        const auto r = check_cluster_variance(c, f, data, 50000, 8);
        CHECK(r.analytic[0] == doctest::Approx(0.25));
        CHECK(r.pass);
    }

    TEST_CASE("sigma-hat estimator") {
        const auto fx = variance_fixture();
        const auto atoms = partition_decomposition(fx.f, std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(sigma_hat(atoms, fx.f, fx.data.row(0), 10, 1).value == 0.0);
        for (std::uint64_t s = 0; s < 50; ++s) CHECK(sigma_hat(fx.c, fx.f, fx.data.row(0), 8, s).max_summand <= 2.0);
        const auto r = check_sigma_hat(fx.c, fx.f, fx.data, 20000, 16, 4);
        CHECK(r.pass);
        CHECK(r.max_summand <= 2.0);
        CHECK(r.max_relative_error <= 0.02);
    }

    TEST_CASE("bernstein tails") {
        // one cluster with variance gamma / 2 = 1/4 at every row
        const double p = (1.0 + std::sqrt(0.75)) / 2.0;
        const ConvexEnsemble f({{p, Stump{0, -10.0, 1}}, {1.0 - p, Stump{0, -10.0, -1}}});
        const auto c = partition_decomposition(f, std::vector<std::size_t>{0, 0});
        const auto data = random_dataset(100, 1, 6);
        const auto r = check_bernstein_tails(c, f, data, 0.5, 0.25, params_n(100), 20000, 2);
        CHECK(r.N2 == bernstein_size(0.5, 0.25, 100.0));
        CHECK(r.step2.ceiling == doctest::Approx(0.01).epsilon(0.3));
        CHECK(r.step2.pass);
        CHECK(r.step2.rows_checked == 100);
        CHECK_THROWS_AS(check_bernstein_tails(c, f, data, 0.2, 0.25, params_n(100), 100, 2), ValidationError);
        // zero-variance rows never exceed
        const ConvexEnsemble flat({{1.0, Stump{0, -10.0, 1}}});
        const auto cz = partition_decomposition(flat, std::vector<std::size_t>{0});
        const auto z = check_bernstein_tails(cz, flat, data, 0.5, 0.25, params_n(100), 500, 2);
        CHECK(z.step2.max_frequency == 0.0);
        CHECK(z.step4_low.max_frequency == 0.0);
    }
}
