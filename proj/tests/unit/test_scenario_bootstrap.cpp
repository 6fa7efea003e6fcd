#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "nathedge/bootstrap.hpp"
#include "nathedge/scenario.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nathedge;

namespace {

ScenarioSet constant_scenario(double q, std::size_t n, IntRange ages, int h) {
    return ScenarioSet(GeneratorKind::LeeCarter, 1, 2018, ages, h, n,
                       std::vector<double>(n * static_cast<std::size_t>(ages.size()) *
                                               static_cast<std::size_t>(h),
                                           q));
}

MortalityTable us_male() {
    return load_rates(oracle::source_path("data/hmd/USA.Mx_1x1.txt"), Sex::Male, {40, 99},
                      {1970, 2018});
}

}  // namespace

TEST(Survival, ZeroMortalitySurvivesForever) {
    const auto sc = constant_scenario(0.0, 2, {40, 60}, 10);
    for (double s : survival_curve(sc, 1, 45, 10)) EXPECT_EQ(s, 1.0);
}

TEST(Survival, HalfMortality) {
    const auto sc = constant_scenario(0.5, 1, {40, 60}, 10);
    const auto s = survival_curve(sc, 0, 40, 3);
    EXPECT_EQ(s[0], 1.0);
    EXPECT_EQ(s[1], 0.5);
    EXPECT_EQ(s[2], 0.25);
    EXPECT_EQ(s[3], 0.125);
}

TEST(Survival, MatchesNaiveOracleExactly) {
    const auto sc = oracle::random_scenario(7, {40, 70}, 25, 0.2, 99);
    for (std::size_t n = 0; n < 7; ++n) {
        for (int x : {40, 44, 46}) {
            const auto s = survival_curve(sc, n, x, 25);
            for (int t = 0; t <= 25; ++t) EXPECT_EQ(s[static_cast<std::size_t>(t)], oracle::survival(sc, n, x, t));
        }
    }
}

TEST(Survival, NonIncreasing) {
    const auto sc = oracle::random_scenario(3, {40, 80}, 40, 0.3, 5);
    const auto s = survival_curve(sc, 2, 41, 40);
    for (std::size_t t = 1; t < s.size(); ++t) EXPECT_LE(s[t], s[t - 1]);
}

TEST(Survival, CoverageErrors) {
    const auto sc = constant_scenario(0.01, 1, {40, 60}, 10);
    EXPECT_EQ(code_of([&] { survival_curve(sc, 0, 40, 11); }), Errc::HorizonExceeded);
    EXPECT_EQ(code_of([&] { survival_curve(sc, 0, 55, 10); }), Errc::AgeOutOfRange);
    EXPECT_EQ(code_of([&] { survival_curve(sc, 0, 39, 1); }), Errc::AgeOutOfRange);
    EXPECT_NO_THROW(survival_curve(sc, 0, 51, 10));  // last age used is 60
}

TEST(Scenario, RejectsBadProbabilities) {
    EXPECT_EQ(code_of([] { constant_scenario(1.0, 1, {40, 41}, 2); }), Errc::NegativeRate);
    EXPECT_EQ(code_of([] { constant_scenario(-0.1, 1, {40, 41}, 2); }), Errc::NegativeRate);
}

TEST(Scenario, CsvRoundTrip) {
    const auto sc = oracle::random_scenario(3, {40, 43}, 5, 0.2, 17);
    std::stringstream buf;
    write_scenarios_csv(buf, sc);
    const auto back = read_scenarios_csv(buf);
    EXPECT_EQ(back.values(), sc.values());
    EXPECT_EQ(back.generator(), sc.generator());
    EXPECT_EQ(back.seed(), sc.seed());
    EXPECT_EQ(back.horizon(), 5);
    EXPECT_EQ(back.base_year(), 2018);
}

TEST(Scenario, MortalityShift) {
    const auto sc = oracle::random_scenario(2, {40, 45}, 4, 0.2, 3);
    const auto up = shift_mortality(sc, 1e-3);
    for (std::size_t k = 0; k < sc.values().size(); ++k) {
        const double m = -std::log1p(-sc.values()[k]);
        EXPECT_NEAR(up.values()[k], 1.0 - std::exp(-(m + 1e-3)), 1e-15);
    }
    const auto zero = constant_scenario(0.0, 1, {40, 41}, 2);
    EXPECT_EQ(code_of([&] { shift_mortality(zero, -1e-4); }), Errc::NegativeRate);
}

TEST(Bootstrap, ReductionMatrixShape) {
    const auto t = us_male();
    const auto r = reduction_matrix(t);
    EXPECT_EQ(r.n_cols(), 48u);
    EXPECT_EQ(r.n_ages(), 60u);
    EXPECT_EQ(bootstrap_block_count(t), 47u);
    EXPECT_DOUBLE_EQ(r.at(10, 5), t.rate(50, 1976) / t.rate(50, 1975));
}

TEST(Bootstrap, UnitReductionKeepsFinalYear) {
    std::vector<double> m;
    for (int a = 0; a < 4; ++a) {
        for (int y = 0; y < 5; ++y) m.push_back(0.01 * (a + 1));
    }
    const MortalityTable t({60, 63}, {2014, 2018}, m);
    const auto sc = simulate_bootstrap(t, 3, 5, 1);
    EXPECT_EQ(sc.horizon(), 6);
    for (std::size_t n = 0; n < 5; ++n) {
        for (int s = 1; s <= 6; ++s) EXPECT_NEAR(sc.q(n, 62, s), -std::expm1(-0.03), 1e-16);
    }
}

TEST(Bootstrap, ConstantReductionCompounds) {
    std::vector<double> m;
    for (int y = 0; y < 5; ++y) m.push_back(0.02 * std::pow(0.9, y));
    const MortalityTable t({70, 70}, {2014, 2018}, m);
    const auto sc = simulate_bootstrap(t, 2, 3, 9);
    const double m_last = m.back();
    for (int s = 1; s <= 4; ++s) {
        EXPECT_NEAR(sc.q(1, 70, s), 1.0 - std::exp(-m_last * std::pow(0.9, s)), 1e-15);
    }
}

TEST(Bootstrap, SeedDeterminismAndThreads) {
    const auto t = us_male();
    const auto a = simulate_bootstrap(t, 35, 200, 77, 1);
    const auto b = simulate_bootstrap(t, 35, 200, 77, 6);
    const auto c = simulate_bootstrap(t, 35, 200, 78, 1);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_NE(a.values(), c.values());
    EXPECT_EQ(a.horizon(), 70);
    EXPECT_EQ(a.base_year(), 2018);
}

TEST(Bootstrap, BlocksAreContiguousPairs) {
    // Rebuild one path from its recorded draws and the raw table.
    const auto t = us_male();
    const auto sc = simulate_bootstrap(t, 10, 4, 5);
    const auto draws = bootstrap_block_draws(47, 10, 5, 2);
    for (int x : {40, 65, 99}) {
        double m = t.rate(x, 2018);
        int s = 1;
        for (std::size_t k : draws) {
            for (std::size_t c = k; c <= k + 1; ++c, ++s) {
                const int y = 1970 + static_cast<int>(c);
                m *= t.rate(x, y + 1) / t.rate(x, y);
                EXPECT_NEAR(sc.q(2, x, s), -std::expm1(-m), 1e-15);
            }
        }
    }
}

TEST(Bootstrap, DrawsAreRoughlyUniform) {
    std::vector<int> hits(47, 0);
    const int paths = 4000, blocks = 35;
    for (std::size_t n = 0; n < static_cast<std::size_t>(paths); ++n) {
        for (std::size_t d : bootstrap_block_draws(47, blocks, 123, n)) {
            ASSERT_LT(d, 47u);
            ++hits[d];
        }
    }
    const double expected = double(paths) * blocks / 47.0;
    double chi2 = 0.0;
    for (int h : hits) chi2 += (h - expected) * (h - expected) / expected;
    // 46 degrees of freedom; 99.9% point is about 81.4.
    EXPECT_LT(chi2, 81.4);
}

TEST(Bootstrap, MarginalMeanOfFirstStep) {
    // E[r at step 1] is the mean of reduction columns 0..46 (the first in each block).
    const auto t = us_male();
    const auto red = reduction_matrix(t);
    const std::size_t N = 20000;
    const auto sc = simulate_bootstrap(t, 1, N, 31, 8);
    const std::size_t a = 25;  // age 65
    double expect = 0.0;
    for (std::size_t c = 0; c < 47; ++c) expect += red.at(a, c) / 47.0;
    double mean = 0.0, sq = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        const double r = -std::log1p(-sc.q(n, 65, 1)) / t.rate(65, 2018);
        mean += r;
        sq += r * r;
    }
    mean /= N;
    const double se = std::sqrt(sq / N - mean * mean) / std::sqrt(double(N));
    EXPECT_NEAR(mean, expect, 3.0 * se);
}

TEST(Bootstrap, TooFewYears) {
    const MortalityTable t({40, 41}, {2017, 2018}, {0.01, 0.01, 0.02, 0.02});
    EXPECT_EQ(code_of([&] { simulate_bootstrap(t, 2, 3, 1); }), Errc::TooFewYears);
}
