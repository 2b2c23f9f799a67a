#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "oracles.hpp"
#include "polarshift/stats.hpp"

using namespace polarshift;

namespace {

std::vector<double> distinct_sample(std::size_t n, std::mt19937_64& rng, std::vector<double>& used) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out;
    while (out.size() < n) {
        double v = std::round(u(rng) * 1e6) / 1e6;
        if (std::find(used.begin(), used.end(), v) != used.end())
            continue;
        used.push_back(v);
        out.push_back(v);
    }
    return out;
}

} // namespace

TEST_SUITE("stats") {

TEST_CASE("bootstrap of a constant vector") {
    std::vector<double> c{2.5, 2.5, 2.5};
    auto s = bootstrap_mean(c, 1000, 1);
    CHECK(s.mean_of_means == 2.5);
    CHECK(s.std_of_means == 0.0);
    CHECK(s.raw_std == 0.0);
}

TEST_CASE("bootstrap of [0, 1] matches the enumerated resample distribution") {
    // Resample means: 0 w.p. 1/4, 1/2 w.p. 1/2, 1 w.p. 1/4.
    const double mean = 0.5, sd = std::sqrt(1.0 / 8.0);
    const std::size_t iters = 10000;
    std::vector<double> d{0.0, 1.0};
    auto s = bootstrap_mean(d, iters, 12345);
    CHECK(std::abs(s.mean_of_means - mean) < 3 * sd / std::sqrt(double(iters)));
    // Standard error of a sample std is about sd / sqrt(2 iters) for this
    // light-tailed distribution; allow a little extra.
    CHECK(std::abs(s.std_of_means - sd) < 4 * sd / std::sqrt(2.0 * iters));
}

TEST_CASE("bootstrap is bitwise reproducible and seed sensitive") {
    std::vector<double> d{0.3, -1.2, 4.4, 0.0, 2.2, 1.1};
    auto a = bootstrap_mean(d, 500, 77), b = bootstrap_mean(d, 500, 77), c = bootstrap_mean(d, 500, 78);
    CHECK(a == b);
    CHECK(a.mean_of_means != c.mean_of_means);
}

TEST_CASE("bootstrap subsampling and errors") {
    std::vector<double> d(100);
    std::iota(d.begin(), d.end(), 0.0);
    auto s = bootstrap_mean(d, 200, 1, 0.25);
    CHECK(s.resample_size == 25);
    CHECK(s.sample_size == 100);
    CHECK(s.raw_mean == 49.5);
    CHECK_THROWS_AS(bootstrap_mean(std::vector<double>{}, 10, 1), DataError);
    CHECK_THROWS_AS(bootstrap_mean(d, 0, 1), ConfigError);
    CHECK_THROWS_AS(bootstrap_mean(d, 10, 1, 1.5), ConfigError);
}

TEST_CASE("midranks") {
    std::vector<double> v{3, 1, 2, 2, 5, 2};
    CHECK(midranks(v) == std::vector<double>{5, 1, 3, 3, 6, 3});
    CHECK(midranks(v) == oracle::ranks(v));
}

TEST_CASE("Mann-Whitney worked example") {
    std::vector<double> x{1, 2, 3}, y{4, 5, 6};
    auto r = mann_whitney_u(x, y);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(r.method == TestMethod::mann_whitney_u_exact);
    CHECK(r.n_per_group == std::vector<std::size_t>{3, 3});
}

TEST_CASE("exact p equals full enumeration for every tie-free size up to 8") {
    std::mt19937_64 rng(2024);
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::size_t m = 1; m <= 8; ++m)
            for (int rep = 0; rep < 3; ++rep) {
                std::vector<double> used;
                auto x = distinct_sample(n, rng, used);
                auto y = distinct_sample(m, rng, used);
                if (rep == 1)
                    std::transform(y.begin(), y.end(), y.begin(), [](double v) { return v + 0.3; });
                auto r = mann_whitney_u(x, y);
                CHECK(r.method == TestMethod::mann_whitney_u_exact);
                CHECK(r.p_value == oracle::mwu_permutation_p(x, y));
            }
}

TEST_CASE("small tied samples use the exact conditional distribution") {
    std::vector<double> x{1, 1, 2}, y{1, 2, 2};
    auto r = mann_whitney_u(x, y);
    CHECK(r.method == TestMethod::mann_whitney_u_exact);
    CHECK(r.p_value == oracle::mwu_permutation_p(x, y));
    CHECK(r.p_value == 1.0);

    std::mt19937_64 rng(6);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> a(1 + rng() % 8), b(1 + rng() % 8);
        for (auto& v : a)
            v = double(rng() % 4);
        for (auto& v : b)
            v = double(rng() % 4);
        CHECK(mann_whitney_u(a, b).p_value == oracle::mwu_permutation_p(a, b));
    }
}

TEST_CASE("the two oracles agree") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        std::vector<double> a(3 + rng() % 6), b(3 + rng() % 6);
        for (auto& v : a)
            v = double(rng() % 5);
        for (auto& v : b)
            v = double(rng() % 5);
        CHECK(oracle::mwu_permutation_p(a, b) == doctest::Approx(oracle::mwu_permutation_p_knapsack(a, b)));
    }
}

TEST_CASE("normal approximation on larger tied samples tracks the permutation p") {
    std::mt19937_64 rng(41);
    double worst = 0;
    for (int k = 0; k < 30; ++k) {
        std::vector<double> a(30 + rng() % 11), b(30 + rng() % 11);
        const double shift = double(rng() % 3) * 0.6;
        for (auto& v : a)
            v = double(rng() % 12);
        for (auto& v : b)
            v = std::floor(double(rng() % 12) + shift);
        auto r = mann_whitney_u(a, b);
        CHECK(r.method == TestMethod::mann_whitney_u_normal);
        CHECK(r.tie_correction_applied);
        worst = std::max(worst, std::abs(r.p_value - oracle::mwu_permutation_p_knapsack(a, b)));
    }
    CHECK(worst <= 0.01);
}

TEST_CASE("identical samples give p near 1") {
    std::vector<double> x{0.1, 0.5, 0.9, 1.3, 2.0, 2.2, 3.1, 4.0, 5.5, 6.1};
    auto r = mann_whitney_u(x, x);
    CHECK(r.method == TestMethod::mann_whitney_u_normal);
    CHECK(r.p_value >= 0.99);
}

TEST_CASE("Mann-Whitney is symmetric in its arguments") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 40; ++k) {
        std::vector<double> a(1 + rng() % 20), b(1 + rng() % 20);
        for (auto& v : a)
            v = double(rng() % 7);
        for (auto& v : b)
            v = double(rng() % 9);
        CHECK(mann_whitney_u(a, b).p_value == mann_whitney_u(b, a).p_value);
    }
}

TEST_CASE("Mann-Whitney errors") {
    std::vector<double> empty, one{1.0};
    CHECK_THROWS_AS(mann_whitney_u(empty, one), DataError);
    CHECK_THROWS_AS(mann_whitney_u(one, one, 31), ConfigError);
    std::vector<double> nan{std::nan("")};
    CHECK_THROWS_AS(mann_whitney_u(nan, one), DataError);
}

TEST_CASE("Kruskal-Wallis equals z squared for two tie-free groups") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> used;
        auto a = distinct_sample(2 + rng() % 11, rng, used);
        auto b = distinct_sample(2 + rng() % 11, rng, used);
        auto mw = mann_whitney_u(a, b);
        auto kw = kruskal_wallis({a, b});
        REQUIRE(mw.z);
        CHECK(std::abs(kw.statistic - *mw.z * *mw.z) < 1e-9);
    }
}

TEST_CASE("Kruskal-Wallis identical groups") {
    auto r = kruskal_wallis({{1, 2, 3}, {1, 2, 3}});
    CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.p_value == 1.0);
}

TEST_CASE("Kruskal-Wallis on [1,2,3] vs [4,5,6]") {
    auto r = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
    CHECK(r.statistic == doctest::Approx(27.0 / 7.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(boost::math::gamma_q(0.5, 27.0 / 14.0)).epsilon(1e-12));
    // At three per group the permutation tail is 0.1 while the chi-square
    // tail is about 0.05; the asymptotic test is only checked for agreement
    // on larger groups below.
    CHECK(oracle::kw_permutation_tail({1, 2, 3}, {4, 5, 6}) == doctest::Approx(0.1));
}

TEST_CASE("Kruskal-Wallis chi-square tail converges to the permutation tail") {
    // With two tie-free groups the permutation tail of H is the two-sided
    // rank-sum tail.
    std::mt19937_64 rng(12);
    for (int k = 0; k < 10; ++k) {
        std::vector<double> pool(60);
        std::iota(pool.begin(), pool.end(), 0.0);
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<double> a(pool.begin(), pool.begin() + 30), b(pool.begin() + 30, pool.end());
        if (k % 2)
            std::transform(b.begin(), b.end(), b.begin(), [](double v) { return v + 9.0; });
        CHECK(std::abs(kruskal_wallis({a, b}).p_value - oracle::mwu_permutation_p_knapsack(a, b)) < 0.01);
    }
    std::vector<double> a{0.1, 0.4, 0.5, 0.9, 1.3}, b{0.2, 0.3, 1.1, 1.2, 1.4};
    CHECK(oracle::kw_permutation_tail(a, b) == doctest::Approx(oracle::mwu_permutation_p(a, b)));
}

TEST_CASE("Kruskal-Wallis hand-ranked three groups") {
    // Ranks equal the values: R = 9, 6, 30; H = 12/90 * (27 + 18 + 225) - 30 = 6.
    auto r = kruskal_wallis({{1, 3, 5}, {2, 4}, {6, 7, 8, 9}});
    CHECK(std::abs(r.statistic - 6.0) < 1e-9);
    CHECK(r.p_value == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
    CHECK_FALSE(r.tie_correction_applied);

    // Ties: ranks 1 | 3 3 3 | 5 | 6.5 6.5 | 8; R = 7, 8, 21.
    // H0 = 50/9, correction = 1 - 30/504.
    auto t = kruskal_wallis({{1, 2, 2}, {2, 3}, {4, 4, 5}});
    CHECK(std::abs(t.statistic - (50.0 / 9.0) / (1.0 - 30.0 / 504.0)) < 1e-9);
    CHECK(t.tie_correction_applied);
}

TEST_CASE("Kruskal-Wallis errors") {
    CHECK_THROWS_AS(kruskal_wallis({{1, 2}}), DataError);
    CHECK_THROWS_AS(kruskal_wallis({{1, 2}, {}}), DataError);
}

TEST_CASE("group comparison flags significance at alpha") {
    std::vector<double> lo(40), hi(40);
    for (int i = 0; i < 40; ++i) {
        lo[i] = i * 0.01;
        hi[i] = 1.0 + i * 0.01;
    }
    StatsConfig cfg;
    cfg.bootstrap_iterations = 500;
    auto c = compare_groups("lo", lo, "hi", hi, cfg, 3);
    CHECK(c.significant);
    CHECK(c.a.mean_of_means < c.b.mean_of_means);
    auto same = compare_groups("a", lo, "b", lo, cfg, 3);
    CHECK_FALSE(same.significant);
    CHECK(same.mwu.p_value >= 0.99);
}

TEST_CASE("delta matrix") {
    std::vector<ShiftRecord> shifts{{UserId{"a"}, "dem", "dem", false},
                                    {UserId{"b"}, "dem", "rep", true},
                                    {UserId{"c"}, "rep", "rep", false},
                                    {UserId{"d"}, "rep", "dem", true},
                                    {UserId{"e"}, "rep", "rep", false}};
    std::map<UserId, double> s1{{UserId{"a"}, 0.2}, {UserId{"b"}, 0.1}, {UserId{"c"}, -0.3}, {UserId{"d"}, 0.5}};
    std::map<UserId, double> s2{{UserId{"a"}, 0.2}, {UserId{"b"}, 0.0}, {UserId{"c"}, -0.3}, {UserId{"d"}, 0.4},
                                {UserId{"e"}, 0.1}};
    StatsConfig cfg;
    cfg.bootstrap_iterations = 200;
    auto m = delta_sentiment_matrix(shifts, s1, s2, cfg, 9);
    CHECK(m.labels == std::vector<std::string>{"dem", "rep"});
    CHECK(m.missing_sentiment == 1);
    REQUIRE(m.cell("dem", "rep"));
    CHECK(m.cell("dem", "rep")->mean_of_means == doctest::Approx(-0.1));
    CHECK(m.cell("rep", "dem")->mean_of_means == doctest::Approx(-0.1));
    CHECK(m.cell("dem", "dem")->mean_of_means == 0.0);
    CHECK(m.cell("rep", "rep")->mean_of_means == 0.0);

    std::vector<ShiftRecord> stayers{{UserId{"a"}, "dem", "dem", false}, {UserId{"c"}, "rep", "rep", false}};
    auto sparse = delta_sentiment_matrix(stayers, s1, s2, cfg, 9);
    CHECK_FALSE(sparse.cell("dem", "rep"));
}

}
