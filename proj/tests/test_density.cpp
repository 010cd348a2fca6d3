#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "kbound/density.hpp"
#include "kbound/error.hpp"
#include "kbound/rng.hpp"
#include "kbound/scenarios.hpp"

using namespace kbound;

namespace {

using cplx = std::complex<double>;

// closed forms for curvature -1
double disk_oracle(double R, double r) { return 2.0 * R / (R * R - r * r); }
double punctured_oracle(double R, double r) { return 1.0 / (r * std::log(R / r)); }
double annulus_oracle(double a, double r) {
    const double L = std::log(1.0 / a);
    return M_PI / (L * r * std::sin(M_PI * std::log(r / a) / L));
}

}  // namespace

TEST(Density, ReferenceClosedForms) {
    for (double r : {0.0, 0.1, 0.5, 0.9, 0.999}) {
        EXPECT_NEAR(reference_density(ReferenceModel::disk(1.0), {r, 0.0}), disk_oracle(1.0, r), 1e-12 * disk_oracle(1.0, r));
        EXPECT_NEAR(reference_density(ReferenceModel::disk(3.0), {0.0, r}), disk_oracle(3.0, r), 1e-12);
    }
    for (double r : {1e-8, 0.01, 0.3, 0.7, 0.99}) {
        const Vec2 z{r * std::cos(1.0), r * std::sin(1.0)};
        EXPECT_NEAR(reference_density(ReferenceModel::punctured_disk(1.0), z) / punctured_oracle(1.0, r), 1.0, 1e-12);
        EXPECT_NEAR(reference_density(ReferenceModel::punctured_disk(2.0), 2.0 * z) / punctured_oracle(2.0, 2.0 * r), 1.0,
                    1e-12);
    }
    for (double r : {0.21, 0.3, 0.5, 0.8, 0.99}) {
        const Vec2 z{0.0, -r};
        EXPECT_NEAR(reference_density(ReferenceModel::annulus(0.2), z) / annulus_oracle(0.2, r), 1.0, 1e-12);
    }
}

TEST(Density, DiskCenterIsExact) {
    const auto m = ReferenceModel::disk(1.0);
    EXPECT_NEAR(upper_density(m.domain(), {}, {0.0, 0.0}), reference_density(m, {0.0, 0.0}), 1e-12);
    EXPECT_NEAR(lower_density(m.domain(), {}, {0.0, 0.0}), 2.0, 1e-12);
}

TEST(Density, UpperIsTwoOverDistance) {
    const auto dom = two_hole_domain();
    const PunctureSet S({{0.0, 4.0}, {1.0, -1.0}});
    // nearest: puncture (1,-1) at distance 0.5
    EXPECT_NEAR(upper_density(dom, S, {1.0, -0.5}), 4.0, 1e-14);
    // nearest: hole at (3, 0), gap 0.2
    EXPECT_NEAR(upper_density(dom, S, {1.8, 0.0}), 10.0, 1e-12);
    EXPECT_THROW(upper_density(dom, S, {0.0, 4.0}), Error);
    EXPECT_THROW(upper_density(dom, S, {3.0, 0.5}), Error);
    EXPECT_THROW(upper_density(dom, S, {20.0, 0.0}), Error);
}

TEST(Density, PuncturedDiskPullback) {
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        const cplx a(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
        const cplx z(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
        const cplx w = (z - a) / (1.0 - std::conj(a) * z);
        const double dw = (1.0 - std::norm(a)) / std::norm(1.0 - std::conj(a) * z);
        const double oracle = dw / (std::abs(w) * std::log(1.0 / std::abs(w)));
        EXPECT_NEAR(punctured_unit_disk_density({a.real(), a.imag()}, {z.real(), z.imag()}) / oracle, 1.0, 1e-11);
    }
}

TEST(Density, BracketsOnReferenceModels) {
    const ReferenceModel models[] = {ReferenceModel::disk(1.0), ReferenceModel::punctured_disk(1.0),
                                     ReferenceModel::annulus(0.2), ReferenceModel::disk(4.0)};
    for (const auto& m : models) {
        const auto dom = m.domain();
        const auto S = m.punctures();
        Rng rng(11);
        int tested = 0;
        while (tested < 2000) {
            const Vec2 z{rng.uniform(-m.R, m.R), rng.uniform(-m.R, m.R)};
            if (!m.contains(z)) continue;
            const double ref = reference_density(m, z);
            const auto br = density_bracket(dom, S, z);
            EXPECT_LE(br.lower, ref * (1.0 + 1e-12));
            EXPECT_LE(ref, br.upper * (1.0 + 1e-12));
            ++tested;
        }
    }
}

TEST(Density, LowerIsExactOnPuncturedDisk) {
    const auto m = ReferenceModel::punctured_disk(1.0);
    for (double r : {0.01, 0.2, 0.6}) {
        EXPECT_NEAR(lower_density(m.domain(), m.punctures(), {r, 0.0}) / punctured_oracle(1.0, r), 1.0, 1e-12);
    }
}

TEST(Density, MonotoneUnderAddedPunctures) {
    const auto dom = two_hole_domain();
    Rng rng(3);
    auto point = [&] {
        for (;;) {
            const Vec2 z{rng.uniform(-10, 10), rng.uniform(-10, 10)};
            if (dom.dist_to_boundary(z) > 1e-3) return z;
        }
    };
    PunctureSet S;
    for (int step = 0; step < 6; ++step) {
        const PunctureSet bigger = S.with(point());
        for (int k = 0; k < 200; ++k) {
            const Vec2 z = point();
            const auto a = density_bracket(dom, S, z);
            const auto b = density_bracket(dom, bigger, z);
            EXPECT_LE(a.upper, b.upper);
            EXPECT_LE(a.lower, b.lower);
        }
        S = bigger;
    }
}

TEST(Density, BlowUpNearPuncture) {
    const auto dom = two_hole_domain();
    const Vec2 p{0.5, 6.0};
    const PunctureSet S({p});
    double prev = 0.0;
    for (int k = 3; k <= 12; ++k) {
        const double d = std::pow(10.0, -k);
        const Vec2 z{p.x, p.y + d};
        const double r = distance(z, p);
        EXPECT_NEAR(upper_density(dom, S, z) * r, 2.0, 1e-12);
        const double c = lower_density(dom, S, z) * r * std::log(1.0 / r);
        EXPECT_GT(c, 0.5);
        if (k > 3) {
            EXPECT_NEAR(c, prev, 0.1);
        }
        prev = c;
    }
}

TEST(Density, LocalDensityAgreesWithUpper) {
    const auto dom = two_hole_domain();
    const PunctureSet S({{0.0, 4.0}, {1.0, -1.0}, {-5.0, 2.0}});
    const std::vector<std::size_t> all{0, 1, 2};
    for (const Vec2 z : {Vec2{0.5, 3.0}, Vec2{6.0, 6.0}, Vec2{-4.5, 1.7}}) {
        EXPECT_DOUBLE_EQ(local_density(dom, S, all, z).upper(), upper_density(dom, S, z));
    }
}
