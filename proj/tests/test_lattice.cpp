#include <gtest/gtest.h>

#include <cmath>

#include "kbound/error.hpp"
#include "kbound/lattice.hpp"
#include "kbound/verify.hpp"

using namespace kbound;

namespace {

std::uint64_t brute_circle(double H) {
    const long B = static_cast<long>(H) + 1;
    std::uint64_t n = 0;
    for (long a = -B; a <= B; ++a) {
        for (long b = -B; b <= B; ++b) n += static_cast<double>(a * a + b * b) <= H * H;
    }
    return n;
}

}  // namespace

TEST(Lattice, GaussCircleCounts) {
    const auto L = TorusLattice::standard(2);
    EXPECT_EQ(count_displacement(L, 0.0), 1u);
    EXPECT_EQ(count_displacement(L, 1.0), 5u);
    EXPECT_EQ(count_displacement(L, 2.0), 13u);
    EXPECT_EQ(count_displacement(L, 10.0), 317u);
    for (double H : {3.0, 7.0, 25.0, 60.0, 4.3}) EXPECT_EQ(count_displacement(L, H), brute_circle(H));
    EXPECT_EQ(count_displacement(L, 1.5), 9u);
}

TEST(Lattice, Rank4Counts) {
    // r_4(n) summed: |{x in Z^4 : |x|^2 <= 1}| = 9, <= 2 adds 24 more
    const auto L = TorusLattice::standard(4);
    EXPECT_EQ(count_displacement(L, 1.0), 9u);
    EXPECT_EQ(count_displacement(L, std::sqrt(2.0)), 33u);
}

TEST(Lattice, EffectiveGram) {
    const TorusLattice L(2, {2.0, 0.0, 0.0, 1.0}, {1, 1, 0, 1});
    // M^T G M with M = [[1,1],[0,1]]
    const std::vector<double> q{2.0, 2.0, 2.0, 3.0};
    EXPECT_EQ(L.effective_gram(), q);
    EXPECT_NEAR(L.effective_determinant(), 2.0, 1e-12);
    EXPECT_NEAR(L.smallest_eigenvalue(), (5.0 - std::sqrt(17.0)) / 2.0, 1e-12);
    std::uint64_t brute = 0;
    for (long a = -20; a <= 20; ++a) {
        for (long b = -20; b <= 20; ++b) brute += 2 * a * a + 4 * a * b + 3 * b * b <= 36;
    }
    EXPECT_EQ(count_displacement(L, 6.0), brute);
}

TEST(Lattice, Validation) {
    EXPECT_THROW(TorusLattice(2, {1, 0.5, 0.4, 1}, {1, 0, 0, 1}), Error);
    EXPECT_THROW(TorusLattice(2, {1, 2, 2, 1}, {1, 0, 0, 1}), Error);
    EXPECT_THROW(TorusLattice(2, {1, 0, 0, 1}, {2, 0, 0, 1}), Error);
    EXPECT_THROW(TorusLattice(3, std::vector<double>(9, 0.0), std::vector<std::int64_t>(9, 0)), Error);
    EXPECT_NO_THROW(TorusLattice(2, {1, 0, 0, 1}, {0, 1, 1, 0}));
}

TEST(Lattice, IntegerDeterminant) {
    EXPECT_EQ(integer_determinant(2, {2, 1, 1, 1}), 1);
    EXPECT_EQ(integer_determinant(3, {2, 1, 0, 1, 1, 0, 0, 0, 1}), 1);
    EXPECT_EQ(integer_determinant(3, {2, 0, 1, 1, 3, 2, 1, 1, 1}), 0);
    EXPECT_EQ(integer_determinant(3, {0, 1, 0, 1, 0, 0, 0, 0, 1}), -1);
    EXPECT_EQ(integer_determinant(2, {4, 6, 2, 3}), 0);
}

TEST(Lattice, Volumes) {
    EXPECT_NEAR(unit_ball_volume(2), M_PI, 1e-14);
    EXPECT_NEAR(unit_ball_volume(4), M_PI * M_PI / 2.0, 1e-14);
    EXPECT_NEAR(unit_ball_volume(6), std::pow(M_PI, 3) / 6.0, 1e-13);
    EXPECT_NEAR(ellipsoid_volume(TorusLattice(2, {4, 0, 0, 1}, {1, 0, 0, 1})), M_PI / 2.0, 1e-14);
    const auto L = TorusLattice::standard(2);
    EXPECT_NEAR(lattice_count_bound(L, 3.0), 1.5 * M_PI * 16.0, 1e-12);
}

TEST(Lattice, BoundAndMonotone) {
    const TorusLattice lats[] = {TorusLattice::standard(2), TorusLattice(2, {3, 1, 1, 1}, {0, 1, 1, 0}),
                                 TorusLattice::standard(4)};
    for (const auto& L : lats) {
        std::uint64_t prev = 0;
        for (double H = 0.0; H <= (L.rank() == 4 ? 12.0 : 80.0); H += 0.75) {
            const auto N = count_displacement(L, H);
            EXPECT_LE(static_cast<double>(N), lattice_count_bound(L, H));
            EXPECT_GE(N, prev);
            prev = N;
        }
    }
}

TEST(Lattice, SignedPermutationInvariance) {
    const std::vector<std::int64_t> ms[] = {{0, -1, 1, 0}, {-1, 0, 0, -1}, {0, 1, 1, 0}};
    for (double H : {2.0, 5.5, 17.0}) {
        const auto base = count_displacement(TorusLattice::standard(2), H);
        for (const auto& m : ms) EXPECT_EQ(count_displacement(TorusLattice(2, {1, 0, 0, 1}, m), H), base);
    }
}

TEST(Lattice, Budget) {
    try {
        count_displacement(TorusLattice::standard(2), 1e5, 1000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::budget);
    }
}

TEST(Lattice, Schedules) {
    EXPECT_EQ(to_string(Schedule::linear), "linear");
    EXPECT_EQ(parse_schedule("sublinear"), Schedule::sublinear);
    EXPECT_FALSE(parse_schedule("cubic").has_value());
    EXPECT_NEAR(h_schedule(9, Schedule::linear, 2.0, 1.0), 21.0, 1e-12);
    EXPECT_NEAR(h_schedule(9, Schedule::sublinear, 2.0, 0.0), 2.0 * std::sqrt(10.0 * std::log(11.0)), 1e-12);
    const double c = matched_sublinear_constant(250.0 / 4097.0, 4096);
    EXPECT_NEAR(h_schedule(4096, Schedule::sublinear, c, 0.0), 250.0, 1e-9);
}

TEST(Lattice, HalvingProducts) {
    const TorusLattice gens[] = {TorusLattice::standard(2), TorusLattice::standard(2)};
    const std::size_t s[] = {9};
    const auto rows = halving_experiment(gens, s, {1.0, 1.0, 0.0});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].H_linear, 10.0, 1e-12);
    EXPECT_EQ(rows[0].N_linear, 317u * 317u);
    EXPECT_EQ(rows[0].s, 9u);
    const auto Hs = std::sqrt(10.0 * std::log(11.0));
    EXPECT_NEAR(rows[0].H_sublinear, Hs, 1e-12);
    EXPECT_EQ(rows[0].N_sublinear, brute_circle(Hs) * brute_circle(Hs));
}
