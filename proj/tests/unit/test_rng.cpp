#include <gtest/gtest.h>

#include <set>

#include "aqe/rng.hpp"

using namespace aqe;

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
    EXPECT_EQ(a.counter(), 100u);
}

TEST(Rng, DifferentSeedsDiffer) {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += a.next() == b.next();
    EXPECT_EQ(same, 0);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
    Rng r(7);
    std::set<uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const uint64_t x = r.below(10);
        ASSERT_LT(x, 10u);
        seen.insert(x);
    }
    EXPECT_EQ(seen.size(), 10u);
}

TEST(Rng, BelowIsRoughlyUniform) {
    Rng r(99);
    std::vector<int> hist(4, 0);
    const int n = 40000;
    for (int i = 0; i < n; ++i) ++hist[r.below(4)];
    for (int h : hist) EXPECT_NEAR(h, n / 4, 500);
}

TEST(Rng, Uniform01InUnitInterval) {
    Rng r(3);
    double sum = 0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(Rng, DeriveSeedSeparatesLabelsAndIndices) {
    EXPECT_EQ(derive_seed(5, "clause", 1), derive_seed(5, "clause", 1));
    EXPECT_NE(derive_seed(5, "clause", 1), derive_seed(5, "clause", 2));
    EXPECT_NE(derive_seed(5, "clause", 1), derive_seed(5, "repeat", 1));
    EXPECT_NE(derive_seed(5, "clause", 1), derive_seed(6, "clause", 1));
}
