#include <gtest/gtest.h>

#include <cmath>

#include "kbound/density.hpp"
#include "kbound/error.hpp"
#include "kbound/growth.hpp"
#include "kbound/parallel.hpp"
#include "kbound/rng.hpp"
#include "kbound/scenarios.hpp"
#include "kbound/strip_analysis.hpp"

using namespace kbound;

namespace {

FermiStrip hole_strip(double delta = 0.5) { return build_fermi_strip(two_hole_domain(), single_hole_loop(), delta); }

// int_a^b x^-p (x + 1) dx
double shifted_power(double a, double b, double p) {
    auto F = [p](double x) {
        const double lin = p == 2.0 ? std::log(x) : std::pow(x, 2.0 - p) / (2.0 - p);
        const double cst = p == 1.0 ? std::log(x) : std::pow(x, 1.0 - p) / (1.0 - p);
        return lin + cst;
    };
    return F(b) - F(a);
}

}  // namespace

TEST(Strip, AreaOfCircleStrip) {
    const auto strip = hole_strip(0.5);
    EXPECT_NEAR(strip.area(), 2.0 * 0.5 * 5.0 * M_PI, 1e-12);
}

TEST(Strip, LemmaConstantsForCircleStrip) {
    const auto strip = hole_strip(0.5);
    const auto lc = lemma_constants(two_hole_domain(), strip);
    const double area = 5.0 * M_PI;
    EXPECT_NEAR(lc.D, 1.0, 1e-9);
    EXPECT_NEAR(lc.area, area, 1e-12);
    EXPECT_NEAR(lc.M, 2.0, 1e-9);
    // c3 = max(8 pi max(1, D), 2 max(2/D, 4/D^2) Area), A = max(2 c3, max(1, M^2) Area)
    EXPECT_NEAR(lc.c3, 8.0 * area, 1e-8);
    EXPECT_NEAR(lc.A, 16.0 * area, 1e-8);
    EXPECT_DOUBLE_EQ(lemma_constant_A(two_hole_domain(), strip), lc.A);
    const auto lf = lemma_constants_from(0.5, 2.0, 3.0);
    EXPECT_NEAR(lf.c3, std::max(8.0 * M_PI, 2.0 * 16.0 * 2.0), 1e-12);
    EXPECT_NEAR(lf.A, std::max(2.0 * lf.c3, 9.0 * 2.0), 1e-12);
}

TEST(Strip, BoundaryOnlyIntegralMatchesRadialFormula) {
    // empty S: density 2 / (rho - 1) with rho the distance to the hole center,
    // rho in [2, 3]; the other boundary components are never closer
    const auto strip = hole_strip(0.5);
    const double ps[] = {1.0, 1.3, 1.5, 1.9};
    const auto lp = lp_strip_integrals(strip, PunctureSet{}, ps);
    for (std::size_t k = 0; k < 4; ++k) {
        const double p = ps[k];
        const double oracle = 2.0 * M_PI * std::pow(2.0, p) * shifted_power(1.0, 2.0, p);
        EXPECT_NEAR(lp[k].total / oracle, 1.0, 1e-8) << "p = " << p;
        EXPECT_TRUE(lp[k].per_cell.empty());
    }
}

TEST(Strip, PolygonPowerIntegral) {
    const Vec2 P{0.3, -0.2};
    const std::vector<Vec2> square{{P.x - 1, P.y - 1}, {P.x + 1, P.y - 1}, {P.x + 1, P.y + 1}, {P.x - 1, P.y + 1}};
    // 8-point Gauss in the fan angle: wide fans (pi/2 here) are accurate to ~1e-8
    EXPECT_NEAR(polygon_power_integral(P, square, 0.0), 4.0, 1e-7);
    // int over [-1,1]^2 of 1/r is 8 asinh(1)
    EXPECT_NEAR(polygon_power_integral(P, square, 1.0), 8.0 * std::asinh(1.0), 1e-7);
    // regular 4096-gon approximates the disk: 2 pi r^(2-p) / (2-p)
    std::vector<Vec2> ngon;
    const int n = 4096;
    for (int k = 0; k < n; ++k) ngon.push_back(P + Vec2{std::cos(2 * M_PI * k / n), std::sin(2 * M_PI * k / n)});
    for (double p : {1.0, 1.5, 1.9}) {
        EXPECT_NEAR(polygon_power_integral(P, ngon, p), 2.0 * M_PI / (2.0 - p), 1e-5);
    }
    // apex outside: the fan cancels to the integral over the polygon itself
    const std::vector<Vec2> far{{2, 2}, {3, 2}, {3, 3}, {2, 3}};
    const Vec2 O{0.0, 0.0};
    double mc = 0.0;
    const int m = 400;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) mc += 1.0 / norm(Vec2{2 + (i + 0.5) / m, 2 + (j + 0.5) / m});
    }
    EXPECT_NEAR(polygon_power_integral(O, far, 1.0), mc / (m * m), 1e-6);
}

TEST(Strip, LayerCakeClosedForms) {
    const Vec2 c{1.0, 2.0};
    for (double p : {0.5, 1.0, 1.5, 1.9}) {
        const double disk = 2.0 * M_PI * std::pow(0.7, 2.0 - p) / (2.0 - p);
        EXPECT_NEAR(layer_cake_oracle(c, disk_region(c, 0.7), p) / disk, 1.0, 1e-6);
        const double ann = 2.0 * M_PI * (std::pow(1.0, 2.0 - p) - std::pow(0.4, 2.0 - p)) / (2.0 - p);
        EXPECT_NEAR(layer_cake_oracle(c, annulus_region(c, 0.4, 1.0), p) / ann, 1.0, 2e-3);
    }
    EXPECT_THROW(layer_cake_oracle(c, disk_region(c, 1.0), 2.0), Error);
}

TEST(Strip, CellQuadratureMatchesLayerCake) {
    const CircleDomain dom({{0.0, 0.0}, 10.0});
    const auto loop = make_series_loop(circle_coefficients({0.0, 0.0}, 1.0), 0.0);
    const auto strip = build_fermi_strip(dom, loop, 0.1, 128, 17);
    const auto S = place_punctures(Strategy::on_strip_random, 4, strip, 9);
    const double ps[] = {1.2, 1.8};
    const auto lp = lp_strip_integrals(strip, S, ps);
    for (std::size_t j = 0; j < S.size(); ++j) {
        const auto region = voronoi_cell_region(strip, S, j);
        for (std::size_t k = 0; k < 2; ++k) {
            const double oracle = std::pow(2.0, ps[k]) * layer_cake_oracle(S[j], region, ps[k]);
            EXPECT_NEAR(lp[k].per_cell[j] / oracle, 1.0, 0.02);
        }
    }
}

TEST(Strip, VoronoiAreasMatchMonteCarlo) {
    const auto strip = hole_strip(0.5);
    const auto S = place_punctures(Strategy::on_strip_random, 6, strip, 4);
    const auto cells = voronoi_assign(strip, S);
    const auto areas = voronoi_cell_areas(strip, cells, S.size());
    ASSERT_EQ(areas.size(), S.size() + 1);
    double sum = 0.0;
    for (double a : areas) sum += a;
    EXPECT_NEAR(sum, strip.area(), 1e-9 * strip.area());

    // uniform samples in the annulus 2 < rho < 3 around the hole
    Rng rng(17);
    std::vector<double> hits(S.size(), 0.0);
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double rho = std::sqrt(rng.uniform(4.0, 9.0));
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        const Vec2 z{-3.0 + rho * std::cos(th), rho * std::sin(th)};
        std::size_t best = 0;
        for (std::size_t j = 1; j < S.size(); ++j) {
            if (distance(z, S[j]) < distance(z, S[best])) best = j;
        }
        hits[best] += 1.0;
    }
    for (std::size_t j = 0; j < S.size(); ++j) {
        const double frac = hits[j] / n;
        const double sigma = std::sqrt(frac * (1.0 - frac) / n);
        // node-lattice areas carry a grid error on top of the sampling error
        EXPECT_NEAR(areas[j] / strip.area(), frac, 5.0 * sigma + 2e-3);
    }
}

TEST(Strip, VoronoiTiesBreakToLowerIndex) {
    const auto strip = hole_strip(0.5);
    // mirror images across the x-axis, which holds the tau = 0 row of nodes
    const PunctureSet S({{-0.5, -0.3}, {-0.5, 0.3}});
    const auto cells = voronoi_assign(strip, S);
    for (int j = 0; j < strip.n_u(); ++j) {
        ASSERT_EQ(strip.position(0, j).y, 0.0);
        EXPECT_EQ(cells.at(0, j), 0u);
    }
    EXPECT_GE(cells.tie_breaks, static_cast<std::size_t>(strip.n_u()));
}

TEST(Strip, LemmaBoundHolds) {
    const auto strip = hole_strip(0.5);
    const double ps[] = {1.0, 1.5, 1.9, 1.99};
    for (auto st : kAllStrategies) {
        for (std::size_t s : {1u, 7u, 40u}) {
            const auto S = place_punctures(st, s, strip, 2);
            for (const auto& r : lp_bound_reports(two_hole_domain(), strip, S, ps)) {
                EXPECT_TRUE(r.satisfied);
                EXPECT_LE(r.integral, r.certified_bound);
                EXPECT_NEAR(r.certified_bound, r.constant_A * (s + 1.0) / (2.0 - r.p), 1e-9 * r.certified_bound);
            }
        }
    }
}

TEST(Strip, PerCellContributionsSumToTotal) {
    const auto strip = hole_strip(0.5);
    const auto S = place_punctures(Strategy::clustered, 25, strip, 8);
    const double ps[] = {1.5};
    const auto lp = lp_strip_integrals(strip, S, ps);
    double sum = 0.0;
    for (double c : lp[0].per_cell) sum += c;
    EXPECT_NEAR(sum, lp[0].total, 1e-9 * lp[0].total);
}

TEST(Strip, DeterministicAcrossThreads) {
    const auto strip = hole_strip(0.5);
    const auto S = place_punctures(Strategy::on_strip_random, 30, strip, 6);
    const double ps[] = {1.3, 1.9};
    set_worker_threads(1);
    const auto a = lp_strip_integrals(strip, S, ps);
    set_worker_threads(4);
    const auto b = lp_strip_integrals(strip, S, ps);
    set_worker_threads(1);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(a[k].total, b[k].total);
        EXPECT_EQ(a[k].per_cell, b[k].per_cell);
    }
}

TEST(Strip, RejectsBadExponent) {
    const auto strip = hole_strip(0.5);
    EXPECT_THROW(lp_strip_integral(strip, PunctureSet{}, 2.0), Error);
    EXPECT_THROW(lp_strip_integral(strip, PunctureSet{}, 0.5), Error);
}
