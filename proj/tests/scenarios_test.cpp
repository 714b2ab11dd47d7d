#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "squidqed/scenarios.hpp"

using namespace squidqed;

namespace {

std::vector<double> grid(double t0, double t1, double dt) {
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    for (std::size_t i = 0; i <= n; ++i) t.push_back(t0 + dt * static_cast<double>(i));
    return t;
}

template <class F>
std::vector<double> sample(const std::vector<double>& t, F f) {
    std::vector<double> y;
    for (double x : t) y.push_back(f(x));
    return y;
}

const ScenarioResult& pair_run() {
    static const ScenarioResult r = [] {
        const auto s = pair_generation_defaults();
        return run_pair_generation(s.params, s.options);
    }();
    return r;
}

const ScenarioResult& transfer_run() {
    static const ScenarioResult r = [] {
        const auto s = transfer_defaults();
        return run_entanglement_transfer(s.params, s.options);
    }();
    return r;
}

}  // namespace

TEST(FindCrossings, LinearRamps) {
    const auto t = grid(0.0, 1.0, 0.01);
    const auto x = find_crossings(t, sample(t, [](double s) { return s; }),
                                  sample(t, [](double s) { return 1.0 - s; }));
    ASSERT_EQ(x.size(), 1u);
    EXPECT_NEAR(x[0], 0.5, 1e-6);
}

TEST(FindCrossings, IdenticalSeriesHaveNone) {
    const auto t = grid(0.0, 5.0, 0.1);
    const auto y = sample(t, [](double s) { return std::sin(s); });
    EXPECT_TRUE(find_crossings(t, y, y).empty());
}

TEST(FindCrossings, TangentialContactIsNotACrossing) {
    const auto t = grid(-1.0, 1.0, 0.1);
    const auto x = find_crossings(t, sample(t, [](double s) { return s * s; }),
                                  std::vector<double>(t.size(), 0.0));
    EXPECT_TRUE(x.empty());
}

TEST(FindCrossings, SineRoots) {
    const auto t = grid(0.0, 7.0, 0.01);
    const auto x = find_crossings(t, sample(t, [](double s) { return std::sin(s); }),
                                  std::vector<double>(t.size(), 0.0));
    // t = 0 is a sample where sin vanishes without a sign change before it
    ASSERT_EQ(x.size(), 2u);
    EXPECT_NEAR(x[0], std::numbers::pi, 1e-5);
    EXPECT_NEAR(x[1], 2.0 * std::numbers::pi, 1e-5);
}

TEST(FindCrossings, LengthMismatchIsArgumentError) {
    EXPECT_THROW(find_crossings({0.0, 1.0}, {0.0}, {1.0, 2.0}), argument_error);
}

TEST(FindPeaks, ConstantSeriesHasNone) {
    const auto t = grid(0.0, 3.0, 0.1);
    EXPECT_TRUE(find_peaks(t, std::vector<double>(t.size(), 0.7)).empty());
}

TEST(FindPeaks, TriangularPulse) {
    const auto t = grid(0.0, 4.0, 0.1);
    const auto p = find_peaks(t, sample(t, [](double s) { return std::max(0.0, 0.8 - 0.8 * std::abs(s - 2.0)); }));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_NEAR(p[0].time, 2.0, 0.1);
    EXPECT_NEAR(p[0].value, 0.8, 0.05);
}

TEST(FindPeaks, SineSquared) {
    const auto t = grid(0.0, 3.0, 0.01);
    const auto p = find_peaks(t, sample(t, [](double s) { return std::sin(s) * std::sin(s); }));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_NEAR(p[0].time, std::numbers::pi / 2.0, 1e-4);
    EXPECT_NEAR(p[0].value, 1.0, 1e-4);
}

TEST(FindPeaks, SmallRipplesBelowProminenceIgnored) {
    const auto t = grid(0.0, 10.0, 0.01);
    const auto y = sample(t, [](double s) { return 0.01 * std::sin(20.0 * s); });
    EXPECT_TRUE(find_peaks(t, y, 0.05).empty());
}

TEST(PairGeneration, StagesInOrderAndPairGenerated) {
    const auto& r = pair_run().report;
    ASSERT_TRUE(r.t12 && r.t23 && r.t34);
    EXPECT_LT(*r.t12, *r.t23);
    EXPECT_LT(*r.t23, *r.t34);
    EXPECT_GE(r.final_populations[3], 0.95);
    EXPECT_TRUE(r.complete);
}

TEST(PairGeneration, EntanglementPeaksAtCrossings) {
    const auto& r = pair_run().report;
    ASSERT_TRUE(r.ef1_peak && r.ef2_peak && r.ef3_peak);
    EXPECT_NEAR(r.ef1_peak->time, *r.t12, 5.0);
    EXPECT_NEAR(r.ef2_peak->time, *r.t23, 5.0);
    EXPECT_NEAR(r.ef3_peak->time, *r.t34, 5.0);
    EXPECT_LE(r.ef1_peak->time, r.ef2_peak->time);
    EXPECT_LE(r.ef2_peak->time, r.ef3_peak->time);
}

TEST(PairGeneration, PopulationsSumToOneAndStayInRange) {
    const auto& res = pair_run();
    EXPECT_LE(res.report.max_population_sum_error, 1e-8);
    for (const auto& row : res.rows)
        for (double p : row.P) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0 + 1e-12);
        }
}

TEST(PairGeneration, ConcurrenceEqualsCoherence) {
    EXPECT_LE(pair_run().report.max_concurrence_coherence_gap, 1e-10);
}

TEST(PairGeneration, FinerToleranceAgrees) {
    auto s = pair_generation_defaults();
    s.options.integrator.ode.rel_tol = 1e-13;
    s.options.integrator.ode.abs_tol = 1e-15;
    const auto fine = run_pair_generation(s.params, s.options).report;
    const auto& base = pair_run().report;
    EXPECT_NEAR(fine.final_populations[3], base.final_populations[3], 1e-6);
    EXPECT_NEAR(*fine.t34, *base.t34, 1e-3);
}

TEST(PairGeneration, NoPhotonCouplingIsIncomplete) {
    auto s = pair_generation_defaults();
    s.params.Omega_a = 0.0;
    s.params.Omega_b = 0.0;
    s.options.t_end = 300.0;
    try {
        run_pair_generation(s.params, s.options);
        FAIL() << "expected scenario_incomplete_error";
    } catch (const scenario_incomplete_error& e) {
        const auto& r = e.partial().report;
        EXPECT_FALSE(r.complete);
        EXPECT_FALSE(r.t12 || r.t23 || r.t34);
        EXPECT_EQ(r.failed_stages.front(), "stage 1: no P1/P2 crossing");
        EXPECT_EQ(e.kind(), "scenario_incomplete");
    }
}

TEST(PairGeneration, RequiresEqualChirpRates) {
    auto s = pair_generation_defaults();
    s.params.v2 = 2.0 * s.params.v1;
    EXPECT_THROW(run_pair_generation(s.params, s.options), argument_error);
}

TEST(Transfer, InitialEntanglementInSquid) {
    const auto& r = transfer_run().report;
    EXPECT_NEAR(r.initial_eof_squid, 1.0, 1e-9);
    EXPECT_NEAR(r.initial_cl1_squid, 1.0, 1e-12);
    EXPECT_NEAR(r.initial_eof_ab, 0.0, 1e-12);
    EXPECT_NEAR(r.initial_cl1_ab, 0.0, 1e-12);
}

TEST(Transfer, EntanglementEndsInModes) {
    const auto& r = transfer_run().report;
    EXPECT_GE(r.final_eof_ab, 0.95);
    EXPECT_LE(r.final_eof_squid, 0.05);
    ASSERT_TRUE(r.target_fidelity);
    EXPECT_GE(*r.target_fidelity, 0.95);
}

TEST(Transfer, CoherenceFollowsConcurrence) {
    const auto& res = transfer_run();
    for (const auto& row : res.rows) {
        ASSERT_LE(std::abs(row.C_ab - row.Cl1_ab), 1e-10) << row.t;
        ASSERT_LE(std::abs(row.C_squid - row.Cl1_squid), 1e-10) << row.t;
    }
}

TEST(Transfer, SingleEofCrossingAboveThreshold) {
    EXPECT_EQ(transfer_run().report.eof_crossings.size(), 1u);
}

TEST(Transfer, FinerToleranceAgrees) {
    auto s = transfer_defaults();
    s.options.integrator.ode.rel_tol = 1e-13;
    s.options.integrator.ode.abs_tol = 1e-15;
    const auto fine = run_entanglement_transfer(s.params, s.options).report;
    const auto& base = transfer_run().report;
    EXPECT_NEAR(fine.final_eof_ab, base.final_eof_ab, 1e-6);
    EXPECT_NEAR(*fine.target_fidelity, *base.target_fidelity, 1e-6);
}

TEST(Transfer, RequiresHalfRateRelation) {
    auto s = transfer_defaults();
    s.params.v1 = s.params.v2;
    EXPECT_THROW(run_entanglement_transfer(s.params, s.options), argument_error);
}

TEST(Custom, RunsWithoutStageChecks) {
    auto s = pair_generation_defaults();
    s.options.t_end = 50.0;
    const auto res = run_custom(s.params, s.options, squid_bell_state());
    EXPECT_TRUE(res.report.complete);
    EXPECT_EQ(res.rows.size(), res.trajectory.size());
}
