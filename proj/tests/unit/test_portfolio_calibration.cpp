#include <gtest/gtest.h>

#include <cmath>

#include "nathedge/calibration.hpp"
#include "nathedge/mortality_models.hpp"
#include "nathedge/portfolio.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nathedge;

namespace {

ScenarioSet flat(double q, std::size_t n, IntRange ages, int h) {
    return ScenarioSet(GeneratorKind::Bootstrap, 1, 2018, ages, h, n,
                       std::vector<double>(n * static_cast<std::size_t>(ages.size()) *
                                               static_cast<std::size_t>(h),
                                           q));
}

const LCParams& us_lc() {
    static const LCParams p = fit_lee_carter(load_rates(
        oracle::source_path("data/hmd/USA.Mx_1x1.txt"), Sex::Male, {40, 99}, {1970, 2018}));
    return p;
}

}  // namespace

TEST(Portfolio, TrivialAnnuityAndInsurance) {
    // No mortality, no discounting: annuity pays t units, insurance pays nothing.
    const auto sc = flat(0.0, 3, {40, 80}, 30);
    const auto a = Portfolio::annuity({{50, 1.0, 5, 10, 2.0}});
    const auto i = Portfolio::insurance({{50, 1.0, 10, 100.0}});
    EXPECT_DOUBLE_EQ(annuity_pv(sc, a, 0.0).mean, 20.0);
    EXPECT_DOUBLE_EQ(insurance_pv(sc, i, 0.0).mean, 0.0);

    // Certain death in year one.
    const auto dead = flat(0.999999, 1, {40, 80}, 30);
    EXPECT_NEAR(insurance_pv(dead, i, 0.0).mean, 100.0, 1e-9);
    const auto immediate = Portfolio::annuity({{50, 1.0, 0, 3, 1.0}});
    EXPECT_NEAR(annuity_pv(dead, immediate, 0.0).mean, 1.0, 1e-5);
}

TEST(Portfolio, InsuranceTelescopesToDeathProbability) {
    const auto sc = oracle::random_scenario(5, {40, 70}, 25, 0.1, 8);
    const auto i = Portfolio::insurance({{45, 1.0, 20, 1.0}});
    const auto pv = insurance_pv(sc, i, 0.0);
    for (std::size_t n = 0; n < 5; ++n) {
        EXPECT_NEAR(pv.values[n], 1.0 - oracle::survival(sc, n, 45, 20), 1e-14);
    }
}

TEST(Portfolio, MatchesOraclePerPath) {
    const auto sc = oracle::random_scenario(6, {40, 90}, 45, 0.08, 12);
    const double delta = force_of_interest(0.04);
    const std::vector<AnnuityProduct> ap = {{40, 0.3, 25, 20, 10.0}, {45, 0.7, 20, 15, 10.0}};
    const std::vector<InsuranceProduct> ip = {{40, 0.6, 45, 250.0}, {50, 0.4, 30, 100.0}};
    const auto a = annuity_pv(sc, Portfolio::annuity(ap), delta, 3);
    const auto i = insurance_pv(sc, Portfolio::insurance(ip), delta, 2);
    for (std::size_t n = 0; n < 6; ++n) {
        double ea = 0.0, ei = 0.0;
        for (const auto& p : ap) ea += p.weight * oracle::annuity_pv(sc, n, p, delta);
        for (const auto& p : ip) ei += p.weight * oracle::insurance_pv(sc, n, p, delta);
        EXPECT_NEAR(a.values[n], ea, 1e-12 * ea);
        EXPECT_NEAR(i.values[n], ei, 1e-12 * ei);
    }
}

TEST(Portfolio, LinearInPaymentAndMonotoneInRate) {
    const auto sc = oracle::random_scenario(4, {40, 90}, 40, 0.05, 3);
    const auto a = Portfolio::annuity({{50, 1.0, 10, 20, 1.0}});
    const double d = force_of_interest(0.03);
    const auto base = annuity_pv(sc, a, d);
    const auto big = annuity_pv(sc, a.scaled(7.5), d);
    for (std::size_t n = 0; n < 4; ++n) EXPECT_NEAR(big.values[n], 7.5 * base.values[n], 1e-12);
    EXPECT_GT(base.mean, annuity_pv(sc, a, force_of_interest(0.05)).mean);
    // Higher mortality lowers the annuity and raises a whole-horizon insurance.
    const auto lo = flat(0.01, 1, {40, 90}, 40), hi = flat(0.03, 1, {40, 90}, 40);
    EXPECT_GT(annuity_pv(lo, a, d).mean, annuity_pv(hi, a, d).mean);
    const auto i = Portfolio::insurance({{50, 1.0, 40, 1.0}});
    EXPECT_LT(insurance_pv(lo, i, d).mean, insurance_pv(hi, i, d).mean);
}

TEST(Portfolio, InvalidDefinitions) {
    EXPECT_EQ(code_of([] { Portfolio::annuity({{50, 0.5, 0, 1, 1.0}}); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { Portfolio::annuity({}); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { Portfolio::insurance({{50, 1.0, 0, 1.0}}); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { Portfolio::insurance({{50, 1.2, 3, 1.0}, {51, -0.2, 3, 1.0}}); }),
              Errc::ConfigError);
    const auto sc = flat(0.01, 1, {40, 60}, 10);
    EXPECT_EQ(code_of([&] { annuity_pv(sc, Portfolio::annuity({{50, 1.0, 5, 10, 1.0}}), 0.0); }),
              Errc::CoverageError);
}

TEST(Portfolio, HorizonAndAges) {
    const auto a = Portfolio::annuity({{45, 0.5, 20, 20, 1.0}, {60, 0.5, 5, 35, 1.0}});
    EXPECT_EQ(a.required_horizon(), 39);
    EXPECT_EQ(a.highest_age(), 60 + 38);
    EXPECT_EQ(a.lowest_age(), 45);
    const auto i = Portfolio::insurance({{40, 1.0, 60, 1.0}});
    EXPECT_EQ(i.required_horizon(), 60);
    EXPECT_EQ(i.highest_age(), 99);
}

TEST(HedgeVm, HandComputedCases) {
    EXPECT_DOUBLE_EQ(hedge_ratio_vm(PVSample({1, 2, 3}), PVSample({3, 2, 1})), 1.0);
    EXPECT_DOUBLE_EQ(hedge_ratio_vm(PVSample({1, 2, 3}), PVSample({2, 4, 6})), -0.5);
    EXPECT_NEAR(hedge_ratio_vm(PVSample({1, 2, 1, 2}), PVSample({0, 0, 1, 1})), 0.0, 1e-15);
    EXPECT_EQ(code_of([] { hedge_ratio_vm(PVSample({1, 2, 3}), PVSample({5, 5, 5})); }),
              Errc::ZeroVarianceInstrument);
    EXPECT_EQ(code_of([] { hedge_ratio_vm(PVSample({1, 2}), PVSample({5, 6, 7})); }),
              Errc::EmptySample);
}

TEST(HedgeVm, InvariancesAndGridSearch) {
    const auto sc = oracle::random_scenario(400, {40, 99}, 60, 0.12, 44);
    const double d = force_of_interest(0.04);
    const auto a = annuity_pv(sc, Portfolio::annuity({{45, 1.0, 20, 20, 20.0}}), d);
    const auto i = insurance_pv(sc, Portfolio::insurance({{50, 1.0, 30, 250.0}}), d);
    const double h = hedge_ratio_vm(a, i);
    // Translating either sample leaves h alone; scaling I by c divides it.
    std::vector<double> at = a.values, is = i.values;
    for (auto& v : at) v += 1000.0;
    for (auto& v : is) v *= 4.0;
    EXPECT_NEAR(hedge_ratio_vm(PVSample(at), i), h, 1e-9 * std::abs(h));
    EXPECT_NEAR(hedge_ratio_vm(a, PVSample(is)), h / 4.0, 1e-9 * std::abs(h));
    // Brute-force search over h agrees to the grid resolution.
    const double g = oracle::grid_search_vm(a.values, i.values, h - 1.0, h + 1.0, 1e-4);
    EXPECT_NEAR(g, h, 1e-4);
    // And it is a minimum of the hedged variance.
    auto var_at = [&](double hh) {
        std::vector<double> p(a.size());
        for (std::size_t n = 0; n < p.size(); ++n) p[n] = a.values[n] + hh * i.values[n];
        return oracle::variance(p);
    };
    EXPECT_LT(var_at(h), var_at(h + 0.01));
    EXPECT_LT(var_at(h), var_at(h - 0.01));
    EXPECT_LT(var_at(h), var_at(0.0));
}

TEST(HedgedPosition, Components) {
    HedgedPosition pos(PVSample({1, 2, 3}), PVSample({10, 20, 60}), 0.5);
    EXPECT_EQ(pos.calibrated().values, (std::vector<double>{5, 10, 30}));
    EXPECT_EQ(pos.combined().values, (std::vector<double>{6, 12, 33}));
    EXPECT_DOUBLE_EQ(pos.combined().mean, 17.0);
    const auto adj = pos.combined_adjusted();
    EXPECT_DOUBLE_EQ(adj[0] + adj[1] + adj[2], 0.0);
    EXPECT_EQ(pos.annuity_adjusted(), (std::vector<double>{-1, 0, 1}));
}

TEST(HedgeDm, IdenticalInstrumentGivesMinusOne) {
    const auto sc = flat(0.02, 4, {40, 99}, 60);
    const auto a = Portfolio::annuity({{45, 1.0, 20, 20, 1.0}});
    const auto r = hedge_ratio_dm(a, a, sc, force_of_interest(0.04));
    EXPECT_NEAR(r.hedge_ratio, -1.0, 1e-12);
    EXPECT_LT(r.annuity_duration, 0.0);
}

TEST(HedgeDm, SignsAndStepHalving) {
    const auto k = simulate_lc_kappa(us_lc(), 60, 300, 9, 4);
    const auto sc = lc_scenarios(us_lc(), k, {40, 99}, 4);
    const double d = force_of_interest(0.04);
    const auto a = Portfolio::annuity({{45, 1.0, 20, 20, 20.0}});
    const auto i = Portfolio::insurance({{40, 1.0, 30, 250.0}});
    const auto r1 = hedge_ratio_dm(a, i, sc, d, 1e-4, 4);
    const auto r2 = hedge_ratio_dm(a, i, sc, d, 5e-5, 4);
    EXPECT_LT(r1.annuity_duration, 0.0);
    EXPECT_GT(r1.insurance_duration, 0.0);
    EXPECT_GT(r1.hedge_ratio, 0.0);
    EXPECT_LT(std::abs(r2.hedge_ratio - r1.hedge_ratio), 0.005 * std::abs(r1.hedge_ratio));
    EXPECT_EQ(code_of([&] { hedge_ratio_dm(a, i, sc, d, 0.0); }), Errc::ConfigError);
}

TEST(HedgeDn, DeltasAgainstFiniteDifferences) {
    const auto k = simulate_lc_kappa(us_lc(), 40, 2000, 13, 8);
    const auto dx = longevity_deltas(us_lc(), k, 50, 30, 8);
    EXPECT_EQ(dx[0], 0.0);
    const double h = 1e-4;
    for (int t : {1, 10, 30}) {
        EXPECT_LT(dx[static_cast<std::size_t>(t)], 0.0);
        const double fd = (oracle::mc_survival_lc(us_lc(), k, 50, t, h) -
                           oracle::mc_survival_lc(us_lc(), k, 50, t, -h)) /
                          (2 * h);
        EXPECT_NEAR(dx[static_cast<std::size_t>(t)], fd, 1e-6 * std::max(1.0, std::abs(fd)))
            << "t=" << t;
    }
    // Identical results regardless of the thread count.
    EXPECT_EQ(longevity_deltas(us_lc(), k, 50, 30, 1), dx);
}

TEST(HedgeDn, IdenticalInstrumentAndScaling) {
    const auto k = simulate_lc_kappa(us_lc(), 60, 500, 21, 4);
    const double d = force_of_interest(0.04);
    const auto a = Portfolio::annuity({{45, 1.0, 20, 20, 20.0}});
    const auto i = Portfolio::insurance({{40, 1.0, 30, 250.0}});
    EXPECT_NEAR(hedge_ratio_dn(us_lc(), k, a, a, d, 4).hedge_ratio, -1.0, 1e-12);
    const auto r = hedge_ratio_dn(us_lc(), k, a, i, d, 4);
    EXPECT_GT(r.hedge_ratio, 0.0);
    EXPECT_LT(r.annuity_delta, 0.0);
    EXPECT_GT(r.insurance_delta, 0.0);
    const auto r3 = hedge_ratio_dn(us_lc(), k, a.scaled(3.0), i.scaled(3.0), d, 4);
    EXPECT_NEAR(r3.hedge_ratio, r.hedge_ratio, 1e-12 * r.hedge_ratio);
    const auto r_half = hedge_ratio_dn(us_lc(), k, a, i.scaled(0.5), d, 4);
    EXPECT_NEAR(r_half.hedge_ratio, 2.0 * r.hedge_ratio, 1e-12 * r.hedge_ratio);
}

TEST(HedgeDn, Errors) {
    const auto k = simulate_lc_kappa(us_lc(), 10, 20, 1, 1);
    EXPECT_EQ(code_of([&] { longevity_deltas(us_lc(), k, 50, 11); }), Errc::HorizonExceeded);
    EXPECT_EQ(code_of([&] { longevity_deltas(us_lc(), k, 35, 5); }), Errc::AgeOutOfRange);
}

TEST(CalibrationMethod, Parse) {
    EXPECT_EQ(parse_calibration_method("vm"), CalibrationMethod::VarianceMinimising);
    EXPECT_EQ(parse_calibration_method("dm"), CalibrationMethod::DurationMatching);
    EXPECT_EQ(parse_calibration_method("dn"), CalibrationMethod::DeltaNeutral);
    EXPECT_EQ(parse_calibration_method("none"), CalibrationMethod::None);
    EXPECT_EQ(code_of([] { parse_calibration_method("xx"); }), Errc::ConfigError);
}
