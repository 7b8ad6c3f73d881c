#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "aqe/database.hpp"
#include "aqe/errors.hpp"
#include "aqe/generators.hpp"

using namespace aqe;

namespace {

const char* kMixed = "relation E 2 symmetric\nrelation R 3\n";

// Reference BFS over an explicit adjacency set.
std::vector<Element> ball_reference(const Database& db, Element a, int r) {
    std::vector<std::set<Element>> adj(db.n() + 1);
    for (int rel = 0; rel < db.schema().size(); ++rel)
        for (size_t t = 0; t < db.tuple_count(rel); ++t) {
            auto tu = db.tuple(rel, t);
            for (Element x : tu)
                for (Element y : tu)
                    if (x != y) adj[x].insert(y);
        }
    std::vector<int> dist(db.n() + 1, -1);
    std::vector<Element> q{a};
    dist[a] = 0;
    for (size_t i = 0; i < q.size(); ++i)
        for (Element y : adj[q[i]])
            if (dist[y] < 0 && dist[q[i]] < r) dist[y] = dist[q[i]] + 1, q.push_back(y);
    std::sort(q.begin(), q.end());
    return q;
}

}  // namespace

TEST(Schema, ParseAndPrint) {
    Schema s = Schema::parse("# comment\nrelation E 2 symmetric\nrelation R 3\n");
    ASSERT_EQ(s.size(), 2);
    EXPECT_TRUE(s.relation(0).symmetric);
    EXPECT_EQ(s.relation(1).arity, 3);
    EXPECT_EQ(s.index_of("R"), 1);
    EXPECT_EQ(s.index_of("X"), -1);
    EXPECT_EQ(s.norm(), 5);
    EXPECT_EQ(Schema::parse(s.to_text()), s);
    EXPECT_TRUE(Schema::graph().is_single_symmetric_binary());
}

TEST(Schema, RejectsMalformed) {
    EXPECT_THROW(Schema::parse("relation E\n"), ParseError);
    EXPECT_THROW(Schema::parse("relation E 0\n"), ParseError);
    EXPECT_THROW(Schema::parse("relation E 2\nrelation E 3\n"), ParseError);
    EXPECT_THROW(Schema::parse("relation R 3 symmetric\n"), ParseError);
}

TEST(Database, LoadNormalisesSymmetricEdges) {
    Database db = load_database("relation E 2 symmetric\n", "domain 4\nE 2 1\nE 1 2\nE 3 4\n", 2);
    EXPECT_EQ(db.n(), 4u);
    EXPECT_EQ(db.tuple_count(0), 2u);
    const Element e12[2] = {1, 2};
    EXPECT_TRUE(db.contains(0, e12));
    EXPECT_EQ(db.degree(1), 1);
    EXPECT_EQ(db.max_degree(), 1);
}

TEST(Database, LoadErrors) {
    const char* g = "relation E 2 symmetric\n";
    EXPECT_THROW(load_database(g, "E 1 2\n", 2), ParseError);
    EXPECT_THROW(load_database(g, "domain 3\nE 1\n", 2), ArityMismatch);
    EXPECT_THROW(load_database(g, "domain 3\nE 1 4\n", 2), ElementOutOfRange);
    EXPECT_THROW(load_database(g, "domain 3\nF 1 2\n", 2), ParseError);
    EXPECT_THROW(load_database(g, "domain 3\nE 1 1\n", 2), ParseError);
    EXPECT_THROW(load_database(g, "domain 4\nE 1 2\nE 1 3\nE 1 4\n", 2), DegreeExceeded);
    try {
        load_database(g, "domain 4\nE 1 2\nE 1 3\nE 1 4\n", 2);
    } catch (const DegreeExceeded& e) {
        EXPECT_EQ(e.element(), 1);
        EXPECT_EQ(e.degree(), 3);
    }
}

TEST(Database, DegreeCountsTuplesNotNeighbours) {
    // Two R tuples on element 1 give degree 2 even with repeated elements.
    Database db = load_database(kMixed, "domain 3\nR 1 1 2\nR 1 2 3\n", 2);
    EXPECT_EQ(db.degree(1), 2);
    EXPECT_EQ(db.degree(3), 1);
    EXPECT_THROW(load_database(kMixed, "domain 3\nR 1 1 2\nR 1 2 3\nE 1 3\n", 2), DegreeExceeded);
}

TEST(Database, OracleQueryOrderAndBounds) {
    Database db = load_database(kMixed, "domain 5\nR 1 5 2\nR 1 2 3\nE 1 4\n", 3);
    auto t1 = db.oracle_query(1, 1, 1), t2 = db.oracle_query(1, 1, 2);
    ASSERT_TRUE(t1 && t2);
    // Lexicographic order inside the relation.
    EXPECT_EQ(std::vector<Element>(t1->begin(), t1->end()), (std::vector<Element>{1, 2, 3}));
    EXPECT_EQ(std::vector<Element>(t2->begin(), t2->end()), (std::vector<Element>{1, 5, 2}));
    EXPECT_FALSE(db.oracle_query(1, 1, 3));
    EXPECT_TRUE(db.oracle_query(0, 4, 1));
    EXPECT_THROW(db.oracle_query(0, 0, 1), IndexOutOfRange);
    EXPECT_THROW(db.oracle_query(0, 6, 1), IndexOutOfRange);
    EXPECT_THROW(db.oracle_query(0, 1, 4), IndexOutOfRange);
    reset_oracle_calls();
    db.oracle_query(0, 1, 1);
    EXPECT_EQ(oracle_calls(), 1u);
}

TEST(Database, TextRoundTrip) {
    Database db = gen::random_mixed(30, 3, 30, 10, 5);
    Database back = load_database(db.schema_ptr(), db.to_text(), 3);
    ASSERT_EQ(back.n(), db.n());
    for (int r = 0; r < db.schema().size(); ++r) {
        ASSERT_EQ(back.tuple_count(r), db.tuple_count(r));
        for (size_t t = 0; t < db.tuple_count(r); ++t) EXPECT_TRUE(back.contains(r, db.tuple(r, t)));
    }
}

TEST(Database, BallsAndDistancesMatchReference) {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        Database db = gen::random_mixed(40, 3, 40, 12, seed);
        for (Element a = 1; a <= db.n(); a += 3)
            for (int r = 0; r <= 3; ++r) {
                Element c[1] = {a};
                EXPECT_EQ(gaifman_ball(db, c, r), ball_reference(db, a, r));
            }
        for (Element a = 1; a <= 10; ++a)
            for (Element b = 1; b <= 10; ++b) {
                int ref = -1;
                for (int r = 0; r <= 4 && ref < 0; ++r) {
                    auto B = ball_reference(db, a, r);
                    if (std::binary_search(B.begin(), B.end(), b)) ref = r;
                }
                EXPECT_EQ(gaifman_distance(db, a, b, 4), ref);
            }
    }
}

TEST(Database, GaifmanDegreeBound) {
    Database g = gen::random_graph(50, 3, 100, 1);
    EXPECT_EQ(g.gaifman_degree_bound(), 3);
    Database m = gen::random_mixed(50, 3, 20, 20, 1);
    EXPECT_EQ(m.gaifman_degree_bound(), 6);
    for (Element a = 1; a <= m.n(); ++a) {
        Element c[1] = {a};
        EXPECT_LE(static_cast<int>(gaifman_ball(m, c, 1).size()) - 1, 6);
    }
}
