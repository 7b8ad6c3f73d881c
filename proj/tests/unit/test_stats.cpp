#include <gtest/gtest.h>

#include <cmath>

#include "aqe/stats.hpp"

using namespace aqe::stats;

namespace {

// Direct summation with exact binomial coefficients (small n only).
double tail_direct(int n, double p, int x) {
    double total = 0;
    for (int i = x; i <= n; ++i) {
        double c = 1;
        for (int j = 1; j <= i; ++j) c = c * (n - i + j) / j;
        total += c * std::pow(p, i) * std::pow(1 - p, n - i);
    }
    return total;
}

}  // namespace

TEST(Stats, TailMatchesDirectSum) {
    for (int n : {1, 5, 20, 60})
        for (double p : {0.1, 2.0 / 3.0, 0.9})
            for (int x = 0; x <= n; x += std::max(1, n / 7))
                EXPECT_NEAR(binomial_tail_ge(n, p, x), tail_direct(n, p, x), 1e-9) << n << " " << p << " " << x;
}

TEST(Stats, TailEdges) {
    EXPECT_DOUBLE_EQ(binomial_tail_ge(10, 0.5, 0), 1.0);
    EXPECT_DOUBLE_EQ(binomial_tail_ge(10, 0.5, 11), 0.0);
    EXPECT_NEAR(binomial_tail_ge(10, 0.5, 10), std::pow(0.5, 10), 1e-15);
}

TEST(Stats, BinomialTestThreshold) {
    // 30/30 at p0 = 2/3: (2/3)^30 ~ 5.2e-6.
    EXPECT_TRUE(binomial_test_pass(30, 30));
    // 20/30 is exactly what p0 = 2/3 predicts.
    EXPECT_FALSE(binomial_test_pass(20, 30));
    // 30/30 at p0 = 0.9 has tail 0.9^30 ~ 0.042 > 0.01.
    EXPECT_FALSE(binomial_test_pass(30, 30, 0.9));
    EXPECT_TRUE(binomial_test_pass(300, 300, 0.9));
    EXPECT_FALSE(binomial_test_pass(0, 0));
}

TEST(Stats, MajorityError) {
    EXPECT_NEAR(majority_error(1, 1.0 / 3), 1.0 / 3, 1e-12);
    // 3 reps: err when >= 2 wrong: 3 p^2 (1-p) + p^3 = 7/27.
    EXPECT_NEAR(majority_error(3, 1.0 / 3), 7.0 / 27, 1e-12);
}
