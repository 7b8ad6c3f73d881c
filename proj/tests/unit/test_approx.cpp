#include <gtest/gtest.h>

#include <cmath>

#include "aqe/approx.hpp"
#include "aqe/errors.hpp"
#include "aqe/exact.hpp"
#include "aqe/generators.hpp"

using namespace aqe;

TEST(Approx, SampleSizesFrozen) {
    // ceil(c^2/lambda^2 * ln(20c)); c = 4, lambda = 0.1: 1600 * ln 80 = 7011.2.
    EXPECT_EQ(frequency_sample_size(4, 0.1), 7012u);
    EXPECT_EQ(frequency_sample_size(3, 0.1), 3685u);
    for (uint64_t c : {1u, 2u, 7u})
        for (double l : {0.05, 0.2})
            EXPECT_EQ(frequency_sample_size(c, l),
                      static_cast<uint64_t>(std::ceil(double(c * c) / (l * l) * std::log(20.0 * c))));
    // ceil(s^2 ln(20c) / (2 lambda^2)); s = 3, c = 1, lambda = 0.1: 450 ln 20.
    EXPECT_EQ(count_sample_size(3, 1, 0.1), 1349u);
}

TEST(Approx, DistributionBasics) {
    auto reg = std::make_shared<TypeRegistry>();
    Database db = gen::random_mixed(30, 3, 20, 8, 2);
    LocalTypeCache cache(db, 1, reg);
    DistributionVector ex = exact_distribution(cache, 1);
    EXPECT_NEAR(ex.total(), 1.0, 1e-12);
    // k = 1: the exact distribution is the census over n.
    for (const auto& [t, c] : type_census(db, 1, *reg)) EXPECT_NEAR(ex.entries.at(t), c / 30.0, 1e-12);
    EXPECT_EQ(estimate_frequencies(cache, 1, 1, 0, true).entries, ex.entries);
    EXPECT_DOUBLE_EQ(ex.l1_distance(ex), 0.0);
    DistributionVector other;
    other.entries[kNoType - 1] = 1.0;
    EXPECT_NEAR(ex.l1_distance(other), 2.0, 1e-12);
    EXPECT_THROW(estimate_frequencies(cache, 1, 0, 0), Error);
}

TEST(Approx, EstimateWithinLambda) {
    auto reg = std::make_shared<TypeRegistry>();
    Database db = gen::random_graph(300, 3, 350, 4);
    LocalTypeCache cache(db, 1, reg);
    DistributionVector ex = exact_distribution(cache, 1);
    const uint64_t s = frequency_sample_size(ex.entries.size(), 0.1);
    int within = 0;
    for (uint64_t seed = 0; seed < 20; ++seed)
        within += estimate_frequencies(cache, 1, s, seed).l1_distance(ex) <= 0.1;
    EXPECT_GE(within, 18);
}

TEST(Approx, MembershipMatchesEvaluationOnExactBranch) {
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = gen::two_clause_query(reg);
    gen::Copies g = gen::n1_with_n2_copies(2, 7);
    MembershipIndex idx = membership_preprocess(g.db, q, 0.1, make_testers(q, TesterKind::Sampling), 1);
    ASSERT_TRUE(idx.types.exact_branch);
    ExactEvaluator ev(g.db, q);
    for (Element a = 1; a <= g.db.n(); ++a)
        for (Element b = 1; b <= g.db.n(); ++b) {
            Element t[2] = {a, b};
            EXPECT_EQ(membership_answer(idx, g.db, t), ev.eval(t));
        }
    Element one[1] = {1};
    EXPECT_THROW(membership_answer(idx, g.db, one), ArityMismatch);
}

TEST(Approx, CountInsideInterval) {
    auto reg = std::make_shared<TypeRegistry>();
    Database n1 = gen::pattern_graph(1);
    gen::Copies g = gen::disjoint_copies({&n1}, {200}, 0, 3, 3);
    QueryNF q = gen::local_query(g.db.schema_ptr(), reg, 2, 2, 3, {gen::pattern_type(1, *reg)});
    int inside = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        CountEstimate e = approx_count(g.db, q, 0.1, 0.1, make_testers(q, TesterKind::Exact), seed);
        EXPECT_EQ(e.c, 1);
        EXPECT_EQ(e.s_eff, 3u);
        EXPECT_DOUBLE_EQ(e.half_width, 0.1 * 1600);
        inside += std::abs(e.estimate - 200.0) <= e.half_width;
    }
    EXPECT_GE(inside, 18);
    EXPECT_THROW(approx_count(g.db, q, 0.1, 0.0, make_testers(q, TesterKind::Exact), 0), Error);
}

TEST(Approx, EmptyTypeSetCountsZero) {
    auto reg = std::make_shared<TypeRegistry>();
    Database n1 = gen::pattern_graph(1);
    gen::Copies g = gen::disjoint_copies({&n1}, {20}, 0, 3, 3);
    QueryNF q = gen::local_query(g.db.schema_ptr(), reg, 2, 2, 3, {gen::pattern_type(3, *reg)});
    CountEstimate e = approx_count(g.db, q, 0.1, 0.1, make_testers(q, TesterKind::Exact), 0);
    EXPECT_TRUE(e.types.members.empty());
    EXPECT_DOUBLE_EQ(e.estimate, 0.0);
}
