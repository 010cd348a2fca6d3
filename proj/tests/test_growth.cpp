#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "kbound/error.hpp"
#include "kbound/growth.hpp"
#include "kbound/loop_select.hpp"
#include "kbound/parallel.hpp"
#include "kbound/rng.hpp"
#include "kbound/scenarios.hpp"

using namespace kbound;

namespace {

FermiStrip hole_strip() { return build_fermi_strip(two_hole_domain(), single_hole_loop(), 0.5); }

}  // namespace

TEST(Growth, StrategyNames) {
    for (auto s : kAllStrategies) EXPECT_EQ(parse_strategy(to_string(s)), s);
    EXPECT_FALSE(parse_strategy("diagonal").has_value());
}

TEST(Growth, OnLoopPlacement) {
    const auto strip = hole_strip();
    const auto S = place_punctures(Strategy::on_loop_equispaced, 12, strip, 1);
    ASSERT_EQ(S.size(), 12u);
    for (std::size_t j = 0; j < 12; ++j) {
        // circle of radius 2.5 based at angle 0: the j-th point sits at angle 2 pi j / 12
        const double th = 2.0 * M_PI * j / 12.0;
        EXPECT_NEAR(S[j].x, -3.0 + 2.5 * std::cos(th), 1e-9);
        EXPECT_NEAR(S[j].y, 2.5 * std::sin(th), 1e-9);
    }
}

TEST(Growth, PlacementsStayInStrip) {
    const auto strip = hole_strip();
    for (auto st : kAllStrategies) {
        for (std::size_t s : {1u, 17u, 100u}) {
            const auto S = place_punctures(st, s, strip, 4);
            ASSERT_EQ(S.size(), s);
            std::set<std::pair<double, double>> seen;
            for (const auto& p : S.points()) {
                const auto c = strip.locate(p);
                ASSERT_TRUE(c.has_value()) << to_string(st);
                EXPECT_LE(std::abs(c->u), 0.5 * (1.0 + 1e-9));
                seen.insert({p.x, p.y});
            }
            EXPECT_EQ(seen.size(), s);
        }
    }
}

TEST(Growth, GridPlacementFillsRectangle) {
    const auto strip = hole_strip();
    const auto S = place_punctures(Strategy::grid_adversarial, 9, strip, 1);
    // 3 x 3 cell-centered grid in (tau, u)
    std::set<long> us;
    for (const auto& p : S.points()) us.insert(std::lround(strip.locate(p)->u * 1e6));
    EXPECT_EQ(us, (std::set<long>{-333333, 0, 333333}));
}

TEST(Growth, SeededPlacementIsReproducible) {
    const auto strip = hole_strip();
    const auto a = place_punctures(Strategy::clustered, 40, strip, 7);
    const auto b = place_punctures(Strategy::clustered, 40, strip, 7);
    const auto c = place_punctures(Strategy::clustered, 40, strip, 8);
    EXPECT_EQ(a.points(), b.points());
    EXPECT_NE(a.points(), c.points());
}

TEST(Growth, BudgetOnPunctureCount) {
    const auto strip = hole_strip();
    try {
        place_punctures(Strategy::on_strip_random, 11, strip, 1, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::budget);
    }
}

TEST(Growth, ReferenceCurves) {
    const auto r1 = reference_curves(1);
    EXPECT_NEAR(r1.upper, std::sqrt(2.0 * std::log(3.0)), 1e-15);
    EXPECT_NEAR(r1.upper, 1.482, 1e-3);
    EXPECT_NEAR(r1.lower, 1.0 / std::log(3.0), 1e-15);
    EXPECT_NEAR(r1.lower, 0.910, 1e-3);
    EXPECT_NEAR(reference_curves(10000).upper, 303.5, 0.1);
}

TEST(Growth, FitRecoversPowerLaw) {
    std::vector<double> x, y;
    for (int k = 1; k <= 12; ++k) {
        x.push_back(std::pow(2.0, k));
        y.push_back(3.0 * std::pow(x.back(), 0.75));
    }
    const auto f = fit_loglog(x, y);
    EXPECT_NEAR(f.slope, 0.75, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    const std::vector<double> few{1, 2, 4, 8};
    EXPECT_THROW(fit_loglog(few, few), Error);
    const std::vector<double> narrow{10, 20, 30, 40, 50, 60};
    EXPECT_THROW(fit_loglog(narrow, narrow), Error);
}

TEST(Growth, EstimateChain) {
    const auto strip = hole_strip();
    for (auto st : kAllStrategies) {
        const auto r = estimate_L_upper(strip, 64, st, 5);
        EXPECT_EQ(r.p_used, p_schedule(64));
        EXPECT_LE(r.upper_estimate, r.holder_bound);
        EXPECT_LE(r.g_at_u0, 1.05 * r.M_threshold);
        EXPECT_GT(r.upper_estimate, 0.0);
    }
}

TEST(Growth, RunGrowthIsSortedAndThreadIndependent) {
    const std::size_t s[] = {32, 2, 8};
    const std::uint64_t seeds[] = {2, 1};
    const Strategy st[] = {Strategy::grid_adversarial, Strategy::on_loop_equispaced};
    set_worker_threads(1);
    const auto a = run_growth(two_hole_domain(), single_hole_loop(), st, s, seeds);
    set_worker_threads(3);
    const auto b = run_growth(two_hole_domain(), single_hole_loop(), st, s, seeds);
    set_worker_threads(1);
    ASSERT_EQ(a.size(), 12u);
    for (std::size_t i = 1; i < a.size(); ++i) {
        const auto& p = a[i - 1];
        const auto& q = a[i];
        EXPECT_TRUE(std::tie(p.strategy, p.s, p.seed) < std::tie(q.strategy, q.s, q.seed));
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].upper_estimate, b[i].upper_estimate);
        EXPECT_EQ(a[i].holder_bound, b[i].holder_bound);
        EXPECT_EQ(a[i].u0, b[i].u0);
    }
}

TEST(Rng, UniformAndNormalMoments) {
    Rng rng(123);
    double m = 0.0, v = 0.0, nm = 0.0, nv = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        m += u;
        v += u * u;
        const double z = rng.normal();
        nm += z;
        nv += z * z;
    }
    EXPECT_NEAR(m / n, 0.5, 5e-3);
    EXPECT_NEAR(v / n - 0.25, 1.0 / 12.0, 5e-3);
    EXPECT_NEAR(nm / n, 0.0, 1e-2);
    EXPECT_NEAR(nv / n, 1.0, 1e-2);
}
