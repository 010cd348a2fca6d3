#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>

#include "kbound/csv.hpp"
#include "kbound/error.hpp"
#include "kbound/parallel.hpp"
#include "kbound/quadrature.hpp"
#include "kbound/rng.hpp"

using namespace kbound;

TEST(Csv, NumberFormat) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1.5), "1.5");
    EXPECT_EQ(format_number(-2.0), "-2");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(2.0 / 3.0 * 1e7), "6666666.66667");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
    EXPECT_EQ(format_number(std::int64_t{-42}), "-42");
    EXPECT_EQ(format_number(std::uint64_t{18446744073709551615ULL}), "18446744073709551615");
}

TEST(Csv, TableLayout) {
    CsvTable t({"a", "b"});
    t.comment("first");
    t.add_row({"1", "x,y"});
    t.add_row({"2", "say \"hi\""});
    EXPECT_EQ(t.str(), "# first\na,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    EXPECT_EQ(t.str().find('\r'), std::string::npos);
    EXPECT_THROW(t.add_row({"1"}), Error);
}

TEST(Parallel, CoversEveryIndexOnce) {
    for (int threads : {1, 3, 8}) {
        set_worker_threads(threads);
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
    set_worker_threads(1);
}

TEST(Parallel, NestedCallsRunSerially) {
    set_worker_threads(4);
    std::vector<int> out(64, 0);
    parallel_for(8, [&](std::size_t i) { parallel_for(8, [&](std::size_t j) { out[i * 8 + j] = static_cast<int>(i + j); }); });
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(out[i * 8 + j], static_cast<int>(i + j));
    }
    set_worker_threads(1);
}

TEST(Parallel, PairwiseSum) {
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (i + 1.0);
    const double ref = std::accumulate(v.begin(), v.end(), 0.0);
    EXPECT_NEAR(pairwise_sum(v), ref, 1e-13);
    EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
    // 1 + many tiny terms: pairwise keeps them, naive left-to-right loses them
    std::vector<double> w(1 << 16, 1e-16);
    w[0] = 1.0;
    EXPECT_NEAR(pairwise_sum(w), 1.0 + 65535e-16, 1e-15);
}

TEST(Quadrature, GaussLegendreExactness) {
    for (int n : {2, 4, 8, 16}) {
        const auto& r = gauss_legendre(n);
        ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
        for (int k = 0; k < 2 * n; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
            EXPECT_NEAR(s, exact, 1e-14) << n << " " << k;
        }
    }
}

TEST(Rng, SeedMixing) {
    EXPECT_NE(mix_seed(1), mix_seed(2));
    EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
    Rng a(9), b(9);
    for (int k = 0; k < 10; ++k) EXPECT_EQ(a.uniform(), b.uniform());
}
