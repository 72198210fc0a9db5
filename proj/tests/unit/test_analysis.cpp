#include "vardislab/analysis/capacity.hpp"
#include "vardislab/analysis/metrics.hpp"
#include "vardislab/analysis/rsm.hpp"
#include "vardislab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace vardislab;
using namespace vardislab::analysis;
using sim::Sample;

namespace {

std::vector<Sample> seq_samples(std::initializer_list<std::uint32_t> seqnos) {
    std::vector<Sample> out;
    double t = 10.0;
    for (auto s : seqnos) {
        out.push_back({1, 0, 1, s, t, t + 0.1});
        t += 1.0;
    }
    return out;
}

}  // namespace

TEST(Metrics, LossFreeGapIsOne) {
    const auto s = seq_samples({1, 2, 3, 4});
    const auto m = compute_metrics(s, 0, 1, 4, 0.0);
    EXPECT_DOUBLE_EQ(m.mean_gap, 1.0);
    EXPECT_EQ(m.received, 4U);
    EXPECT_DOUBLE_EQ(m.pct_received, 100.0);
}

TEST(Metrics, AlternateLossGapIsTwo) {
    const auto s = seq_samples({1, 3, 5});
    const auto m = compute_metrics(s, 0, 1, 6, 0.0);
    EXPECT_DOUBLE_EQ(m.mean_gap, 2.0);
    EXPECT_DOUBLE_EQ(m.pct_received, 50.0);
}

TEST(Metrics, MeanDelay) {
    std::vector<Sample> s{{1, 0, 1, 1, 0.0, 0.25}, {1, 0, 1, 2, 5.0, 5.35}};
    EXPECT_NEAR(compute_metrics(s, 0, 1, 2, 0.0).mean_delay_s, 0.3, 1e-12);
}

TEST(Metrics, FiltersPairAndInitialValue) {
    std::vector<Sample> s{{1, 0, 1, 0, 0.0, 0.1},
                          {1, 0, 1, 1, 1.0, 1.2},
                          {2, 0, 1, 2, 2.0, 2.1},
                          {1, 3, 4, 2, 2.0, 2.1},
                          {1, 0, 1, 2, 2.0, 2.4}};
    const auto m = compute_metrics(s, 0, 1, 2, 0.0);
    EXPECT_EQ(m.received, 2U);
    EXPECT_NEAR(m.mean_delay_s, 0.3, 1e-12);
}

TEST(Metrics, WindowStartExcludesOldUpdatesFromPercent) {
    const auto s = seq_samples({1, 2, 3, 4});  // generated at 10, 11, 12, 13
    EXPECT_DOUBLE_EQ(percent_received(s, 0, 1, 2, 11.5), 100.0);
    EXPECT_DOUBLE_EQ(percent_received(s, 0, 1, 4, 11.5), 50.0);
    EXPECT_DOUBLE_EQ(percent_received({}, 0, 1, 4, 0.0), 0.0);
}

TEST(Metrics, TooFewSamples) {
    const auto s = seq_samples({1});
    try {
        (void)compute_metrics(s, 0, 1, 1, 0.0);
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_EQ(e.code(), AnalysisErrc::NoSamples);
    }
}

TEST(Metrics, GapTracksIssuedOverReceivedUnderIidLoss) {
    RandomStream rng(3);
    std::vector<Sample> s;
    const std::uint32_t issued = 50000;
    for (std::uint32_t n = 1; n <= issued; ++n) {
        if (rng.bernoulli(0.7)) s.push_back({1, 0, 1, n, double(n), double(n) + 0.1});
    }
    const auto m = compute_metrics(s, 0, 1, issued, 0.0);
    EXPECT_NEAR(m.mean_gap, double(issued) / double(s.size()), 0.01);
    EXPECT_NEAR(m.mean_gap, 100.0 / m.pct_received, 0.01);
}

TEST(Summarize, StudentT) {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = summarize(v);
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    // t(0.975, 3) = 3.182446305; sd = 1.290994449.
    EXPECT_NEAR(e.half_width, 3.182446305 * 1.290994449 / 2.0, 1e-8);
    EXPECT_EQ(e.n, 4U);
    const std::vector<double> one{7.0};
    EXPECT_DOUBLE_EQ(summarize(one).half_width, 0.0);
    EXPECT_THROW((void)summarize(std::span<const double>{}), AnalysisError);
}

TEST(Summarize, PairMetrics) {
    std::vector<PairMetrics> reps{{10, 0.2, 1.0, 100.0}, {10, 0.4, 2.0, 50.0}};
    const auto s = summarize(reps);
    EXPECT_DOUBLE_EQ(s.delay_s.mean, 0.3);
    EXPECT_DOUBLE_EQ(s.gap.mean, 1.5);
    EXPECT_DOUBLE_EQ(s.pct_received.mean, 75.0);
    EXPECT_EQ(s.receptions, 20U);
    EXPECT_EQ(s.replications, 2U);
}

TEST(GapModel, Examples) {
    EXPECT_NEAR(expected_gap_model(0.2, 2, 17), 1.92, 0.005);
    EXPECT_DOUBLE_EQ(expected_gap_model(0.0, 1, 10), 1.0);
    EXPECT_DOUBLE_EQ(expected_gap_model(0.5, 1, 2), 2.0);
    EXPECT_NEAR(expected_gap_model(0.2, 2, 10), 1.0 / std::pow(0.96, 9), 1e-12);
    EXPECT_NEAR(expected_gap_model(0.2, 2, 10), 1.434, 0.05 * 1.434);
}

TEST(GapModel, Monotone) {
    for (double p = 0.0; p < 0.9; p += 0.05) {
        for (unsigned r = 1; r <= 4; ++r) {
            for (std::size_t k = 2; k <= 20; ++k) {
                const double g = expected_gap_model(p, r, k);
                EXPECT_GE(expected_gap_model(p + 0.05, r, k), g);
                EXPECT_GE(expected_gap_model(p, r, k + 1), g);
                EXPECT_LE(expected_gap_model(p, r + 1, k), g);
            }
        }
    }
}

TEST(Rsm, SingleFactorLinear) {
    const std::vector<double> y{1.0, 5.0};  // x=-1 -> 1, x=+1 -> 5
    const auto m = rsm_fit(1, y);
    EXPECT_DOUBLE_EQ(m.intercept, 3.0);
    EXPECT_DOUBLE_EQ(m.linear(0), 2.0);
    EXPECT_DOUBLE_EQ(m.r2_pct, 100.0);
    EXPECT_DOUBLE_EQ(m.terms[0].contribution_pct, 100.0);
}

TEST(Rsm, HandComputedTwoFactor) {
    const std::map<std::vector<int>, double> y{
        {{-1, -1}, 1.0}, {{-1, 1}, 2.0}, {{1, -1}, 3.0}, {{1, 1}, 4.0}};
    const auto m = rsm_fit(2, y);
    EXPECT_DOUBLE_EQ(m.intercept, 2.5);
    EXPECT_DOUBLE_EQ(m.linear(0), 1.0);
    EXPECT_DOUBLE_EQ(m.linear(1), 0.5);
    EXPECT_DOUBLE_EQ(m.interaction(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(m.sst, 5.0);
    EXPECT_DOUBLE_EQ(m.terms[0].contribution_pct, 80.0);
    EXPECT_DOUBLE_EQ(m.terms[1].contribution_pct, 20.0);
    EXPECT_DOUBLE_EQ(m.r2_pct, 100.0);
    EXPECT_DOUBLE_EQ(m.min_response, 1.0);
    EXPECT_DOUBLE_EQ(m.max_response, 4.0);
}

TEST(Rsm, ConstantResponse) {
    const std::vector<double> y(8, 3.0);
    const auto m = rsm_fit(3, y);
    EXPECT_DOUBLE_EQ(m.sst, 0.0);
    EXPECT_DOUBLE_EQ(m.r2_pct, 100.0);
    for (const auto& t : m.terms) EXPECT_DOUBLE_EQ(t.contribution_pct, 0.0);
}

TEST(Rsm, RecoversSecondOrderModels) {
    RandomStream rng(77);
    for (std::size_t k = 1; k <= 5; ++k) {
        const std::size_t cells = std::size_t{1} << k;
        const double a0 = rng.uniform(-5, 5);
        std::vector<double> lin(k);
        std::vector<std::vector<double>> pair(k, std::vector<double>(k, 0.0));
        for (auto& a : lin) a = rng.uniform(-3, 3);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) pair[i][j] = rng.uniform(-2, 2);
        }
        std::vector<double> y(cells);
        for (std::size_t m = 0; m < cells; ++m) {
            auto x = [m](std::size_t i) { return (m >> i & 1U) ? 1.0 : -1.0; };
            double v = a0;
            for (std::size_t i = 0; i < k; ++i) v += lin[i] * x(i);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = i + 1; j < k; ++j) v += pair[i][j] * x(i) * x(j);
            }
            y[m] = v;
        }
        const auto fit = rsm_fit(k, y);
        EXPECT_NEAR(fit.intercept, a0, 1e-9);
        double sq = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_NEAR(fit.linear(i), lin[i], 1e-9);
            sq += lin[i] * lin[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                EXPECT_NEAR(fit.interaction(i, j), pair[i][j], 1e-9);
                sq += pair[i][j] * pair[i][j];
            }
        }
        EXPECT_NEAR(fit.r2_pct, 100.0, 1e-9);
        EXPECT_NEAR(fit.sse, 0.0, 1e-9);
        EXPECT_NEAR(fit.sst, double(cells) * sq, 1e-9 * std::max(1.0, fit.sst));
        double total = 0.0;
        for (const auto& t : fit.terms) total += t.contribution_pct;
        EXPECT_NEAR(total, 100.0, 1e-9);
    }
}

TEST(Rsm, ThirdOrderTermLandsInSse) {
    std::vector<double> y(8);
    for (std::size_t m = 0; m < 8; ++m) {
        y[m] = ((m & 1) ? 1.0 : -1.0) * ((m & 2) ? 1.0 : -1.0) * ((m & 4) ? 1.0 : -1.0);
    }
    const auto fit = rsm_fit(3, y);
    EXPECT_NEAR(fit.sse, 8.0, 1e-12);
    EXPECT_NEAR(fit.r2_pct, 0.0, 1e-12);
}

TEST(Rsm, IncompleteDesign) {
    const std::map<std::vector<int>, double> y{{{-1, -1}, 1.0}, {{1, 1}, 2.0}};
    try {
        (void)rsm_fit(2, y);
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_EQ(e.code(), AnalysisErrc::IncompleteDesign);
    }
    const std::vector<double> short_y{1.0, 2.0, 3.0};
    EXPECT_THROW((void)rsm_fit(2, short_y), AnalysisError);
}

TEST(Capacity, ConstantMetricPicksFirstPoint) {
    const auto grid = default_lambda_grid();
    const auto r = capacity_search([](double) { return Estimate{0.1, 0.0, 4}; },
                                   CapacityKind::Delay, grid);
    ASSERT_TRUE(r.lambda_s);
    EXPECT_DOUBLE_EQ(*r.lambda_s, 0.15);
    EXPECT_EQ(r.points.size(), 1U);
}

TEST(Capacity, FirstPointBeyondCrossing) {
    const auto grid = default_lambda_grid();
    // Delay falls as the period grows, crossing 0.25 s at lambda = 0.31.
    const auto r = capacity_search(
        [](double l) { return Estimate{0.25 * 0.31 / l, 0.0, 4}; }, CapacityKind::Delay, grid);
    ASSERT_TRUE(r.lambda_s);
    EXPECT_NEAR(*r.lambda_s, 0.325, 1e-12);
}

TEST(Capacity, UsesUpperConfidenceBound) {
    const std::vector<double> grid{0.5, 1.0};
    const auto r = capacity_search(
        [](double l) { return l < 0.75 ? Estimate{1.4, 0.2, 4} : Estimate{1.4, 0.05, 4}; },
        CapacityKind::Reliability, grid);
    ASSERT_TRUE(r.lambda_s);
    EXPECT_DOUBLE_EQ(*r.lambda_s, 1.0);
}

TEST(Capacity, Infeasible) {
    const auto grid = default_lambda_grid();
    auto never = [](double) { return Estimate{9.0, 0.0, 4}; };
    const auto r = capacity_search(never, CapacityKind::Reliability, grid);
    EXPECT_FALSE(r.lambda_s);
    EXPECT_EQ(r.points.size(), grid.size());
    try {
        (void)capacity_or_throw(never, CapacityKind::Reliability, grid);
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_EQ(e.code(), AnalysisErrc::Infeasible);
    }
}

TEST(Capacity, DefaultGrid) {
    const auto g = default_lambda_grid();
    ASSERT_EQ(g.size(), 19U);
    EXPECT_DOUBLE_EQ(g.front(), 0.15);
    EXPECT_NEAR(g[14], 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(g.back(), 2.0);
    const std::vector<double> bad{1.0, 0.5};
    EXPECT_THROW((void)capacity_search([](double) { return Estimate{}; }, CapacityKind::Delay, bad),
                 AnalysisError);
}
