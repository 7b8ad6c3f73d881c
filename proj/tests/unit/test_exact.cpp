#include <gtest/gtest.h>

#include <set>

#include "aqe/errors.hpp"
#include "aqe/exact.hpp"
#include "aqe/generators.hpp"
#include "aqe/rng.hpp"

using namespace aqe;

TEST(Exact, TwoClauseQueryOnN1HasOneAnswer) {
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = gen::two_clause_query(reg);
    Database n1 = gen::pattern_graph(1);
    AnswerSet as = answer_set(n1, q);
    ASSERT_EQ(as.tuples.size(), 1u);
    EXPECT_EQ(as.tuples[0], (std::vector<Element>{1, 4}));
    EXPECT_EQ(count_type(n1, gen::pattern_type(4, *reg), 2, *reg), 1u);
}

TEST(Exact, SecondClauseNeedsNoT4Anywhere) {
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = gen::two_clause_query(reg);
    Database n1 = gen::pattern_graph(1), n2 = gen::pattern_graph(2);
    gen::Copies only2 = gen::disjoint_copies({&n2}, {2}, 0, 0, 3);
    EXPECT_EQ(answer_set(only2.db, q).tuples.size(), 2u);
    gen::Copies mixed = gen::disjoint_copies({&n1, &n2}, {1, 2}, 0, 0, 3);
    // The N1 copy brings a t4 vertex, so only its own pair answers.
    AnswerSet as = answer_set(mixed.db, q);
    ASSERT_EQ(as.tuples.size(), 1u);
    EXPECT_EQ(as.tuples[0], (std::vector<Element>{mixed.maps[0][0], mixed.maps[0][3]}));
    ExactEvaluator ev(mixed.db, q);
    EXPECT_TRUE(ev.clause_satisfiable(q.clauses[0]));
    EXPECT_FALSE(ev.clause_satisfiable(q.clauses[1]));
}

TEST(Exact, LocalMemberAgreesWithEvaluation) {
    for (uint64_t seed = 1; seed <= 4; ++seed) {
        Database db = gen::random_graph(60, 3, 80, seed);
        auto reg = std::make_shared<TypeRegistry>();
        // A query made of the types of a few sampled pairs.
        Rng rng(seed);
        std::vector<TypeId> types;
        for (int i = 0; i < 4; ++i) {
            Element t[2] = {Element(1 + rng.below(60)), Element(1 + rng.below(60))};
            types.push_back(tuple_type_direct(db, t, 1, *reg));
        }
        QueryNF q = gen::local_query(db.schema_ptr(), reg, 2, 1, 3, types);
        ExactEvaluator ev(db, q);
        for (Element a = 1; a <= 60; ++a)
            for (Element b = 1; b <= 60; b += 7) {
                Element t[2] = {a, b};
                EXPECT_EQ(local_member(db, t, q), ev.eval(t));
                EXPECT_EQ(eval_query(db, t, q), ev.eval(t));
            }
    }
}

TEST(Exact, EvaluatorErrors) {
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = gen::two_clause_query(reg);
    Database n1 = gen::pattern_graph(1);
    Element one[1] = {1};
    EXPECT_THROW(eval_query(n1, one, q), ArityMismatch);
    Element two[2] = {1, 4};
    EXPECT_THROW(local_member(n1, two, q), NotLocal);
    Database big = gen::random_graph(5000, 3, 100, 1);
    EXPECT_THROW(answer_set(big, q, 1000), BudgetExceeded);
    QueryNF empty = q;
    empty.clauses.clear();
    EXPECT_FALSE(eval_query(n1, two, empty));
}

TEST(Exact, CensusSumsToN) {
    Database db = gen::random_mixed(50, 3, 40, 15, 3);
    TypeRegistry reg;
    for (int r = 0; r <= 2; ++r) {
        uint64_t total = 0;
        for (const auto& [t, c] : type_census(db, r, reg)) {
            total += c;
            EXPECT_EQ(count_type(db, t, r, reg), c);
        }
        EXPECT_EQ(total, 50u);
    }
}

TEST(Exact, ThresholdZeroSentenceIsTrue) {
    TypeRegistry reg;
    Database n1 = gen::pattern_graph(1);
    const TypeId t4 = gen::pattern_type(4, reg);
    EXPECT_TRUE(eval_hanf(n1, HanfSentence{false, 0, t4, 2}, reg));
    EXPECT_TRUE(eval_hanf(n1, HanfSentence{false, 1, t4, 2}, reg));
    EXPECT_FALSE(eval_hanf(n1, HanfSentence{false, 2, t4, 2}, reg));
    EXPECT_FALSE(eval_hanf(n1, HanfSentence{true, 1, t4, 2}, reg));
}

TEST(Exact, ExistsTupleOfType) {
    TypeRegistry reg;
    Database n1 = gen::pattern_graph(1);
    gen::Copies two = gen::disjoint_copies({&n1}, {2}, 0, 5, 3);
    EXPECT_TRUE(exists_tuple_of_type(two.db, gen::pattern_type(1, reg), 2, reg));
    EXPECT_FALSE(exists_tuple_of_type(two.db, gen::pattern_type(3, reg), 2, reg));
    // A two-component type (centre, centre) across copies.
    Element cc[2] = {two.maps[0][0], two.maps[1][0]};
    const TypeId split = tuple_type_direct(two.db, cc, 2, reg);
    EXPECT_EQ(reg.info(split).component_count, 2);
    EXPECT_TRUE(exists_tuple_of_type(two.db, split, 2, reg));
    EXPECT_FALSE(exists_tuple_of_type(n1, split, 2, reg));
}

TEST(Exact, ExistsTupleMatchesBruteForce) {
    for (uint64_t seed = 1; seed <= 4; ++seed) {
        Database db = seed % 2 ? gen::random_mixed(14, 3, 8, 4, seed) : gen::random_graph(14, 2, 10, seed);
        Database other = seed % 2 ? gen::random_mixed(14, 3, 8, 4, seed + 50) : gen::random_graph(14, 2, 10, seed + 50);
        for (int r = 0; r <= 1; ++r) {
            TypeRegistry reg;
            std::set<TypeId> present, probe;
            for (Element a = 1; a <= 14; ++a)
                for (Element b = 1; b <= 14; ++b) {
                    Element t[2] = {a, b};
                    present.insert(tuple_type_direct(db, t, r, reg));
                    probe.insert(tuple_type_direct(other, t, r, reg));
                }
            probe.insert(present.begin(), present.end());
            for (TypeId t : probe) EXPECT_EQ(exists_tuple_of_type(db, t, r, reg), present.count(t) > 0);
        }
    }
}

TEST(Exact, ClosenessOnSmallInstance) {
    // One N1 copy and one N2 copy: the N2 centre pair has type t2 but the N1
    // copy contributes a t4 vertex. Deleting one edge of the N1 copy removes it.
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = gen::two_clause_query(reg);
    gen::Copies g = gen::n1_with_n2_copies(1, 0);
    const uint32_t n = g.db.n();
    ASSERT_EQ(n, 16u);
    Element n2pair[2] = {g.maps[1][0], g.maps[1][3]};
    Element n1pair[2] = {g.maps[0][0], g.maps[0][3]};
    EXPECT_FALSE(eval_query(g.db, n2pair, q));
    EXPECT_TRUE(closeness_check(g.db, n1pair, q, 1e-9, 3));
    // Budget floor(eps*d*n) = 0: nothing to spend.
    EXPECT_FALSE(closeness_check(g.db, n2pair, q, 1e-9, 3));
    // Budget 1 is enough.
    ClosenessStats st;
    EXPECT_TRUE(closeness_check(g.db, n2pair, q, 1.5 / (3.0 * n), 3, 50'000'000, &st));
    EXPECT_EQ(st.budget, 1);
    // A pair of leaves is not close within one edit.
    Element leaves[2] = {g.maps[1][4], g.maps[1][6]};
    EXPECT_FALSE(closeness_check(g.db, leaves, q, 1.5 / (3.0 * n), 3));
    // The leaves pair matches no clause, so even a large budget answers at once.
    EXPECT_FALSE(closeness_check(g.db, leaves, q, 0.5, 3));
    EXPECT_THROW(closeness_check(g.db, n2pair, q, 0.5, 3), BudgetExceeded);
}
