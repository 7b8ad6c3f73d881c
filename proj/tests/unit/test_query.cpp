#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "aqe/errors.hpp"
#include "aqe/exact.hpp"
#include "aqe/generators.hpp"
#include "aqe/query.hpp"

using namespace aqe;

namespace {

SchemaPtr graph() { return std::make_shared<const Schema>(Schema::graph()); }

const char* kPath3 = R"(QUERY k=2 r=1 d=3
CLAUSE
SPHERE
DOMAIN 3
CENTRES 1 3
E 1 2
E 2 3
END
)";

}  // namespace

TEST(Query, ParsesAndPrintsRoundTrip) {
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = gen::two_clause_query(reg);
    QueryNF back = parse_query(print_query(q), q.schema, reg);
    EXPECT_TRUE(same_query(q, back));
    EXPECT_EQ(back.k, 2);
    EXPECT_EQ(back.r, 2);
    EXPECT_EQ(back.d, 3);
    ASSERT_EQ(back.clauses.size(), 2u);
    EXPECT_TRUE(back.clauses[0].sentences.empty());
    ASSERT_EQ(back.clauses[1].sentences.size(), 1u);
    EXPECT_TRUE(back.clauses[1].sentences[0].negated);
    EXPECT_FALSE(is_local(back));
    EXPECT_EQ(compute_conn(back), 1);
}

TEST(Query, SampleQueryFileMatchesGenerator) {
    std::ifstream in(std::string(AQE_DATA_DIR) + "/two_clause.query");
    ASSERT_TRUE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    auto reg = std::make_shared<TypeRegistry>();
    EXPECT_TRUE(same_query(parse_query(ss.str(), graph(), reg), gen::two_clause_query(reg)));
}

TEST(Query, DisconnectedSphereRaisesConn) {
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = parse_query("QUERY k=2 r=0 d=3\nCLAUSE\nSPHERE\nDOMAIN 2\nCENTRES 1 2\nEND\n", graph(), reg);
    EXPECT_EQ(compute_conn(q), 2);
    EXPECT_TRUE(is_local(q));
    QueryNF p = parse_query(kPath3, graph(), reg);
    EXPECT_EQ(compute_conn(p), 1);
}

TEST(Query, ExactCountExpandsToTwoSentences) {
    auto reg = std::make_shared<TypeRegistry>();
    QueryNF q = parse_query(
        "QUERY k=1 r=1 d=2\nCLAUSE\nSPHERE\nDOMAIN 1\nCENTRES 1\nHANF + = 2\nDOMAIN 1\nCENTRES 1\nEND\n", graph(), reg);
    ASSERT_EQ(q.clauses[0].sentences.size(), 2u);
    Database db = load_database(graph(), "domain 3\nE 1 2\n", 2);
    // One isolated element: count is 1, so "= 2" fails.
    const Element a[1] = {3};
    EXPECT_FALSE(eval_query(db, a, q));
    Database db2 = load_database(graph(), "domain 4\nE 1 2\n", 2);
    EXPECT_TRUE(eval_query(db2, a, q));
}

TEST(Query, DuplicateClausesMerge) {
    auto reg = std::make_shared<TypeRegistry>();
    std::string body = std::string(kPath3).substr(std::string("QUERY k=2 r=1 d=3\n").size());
    body = body.substr(0, body.size() - 4);  // drop END
    QueryNF q = parse_query("QUERY k=2 r=1 d=3\n" + body + body + "END\n", graph(), reg);
    EXPECT_EQ(q.clauses.size(), 1u);
}

TEST(Query, Errors) {
    auto reg = std::make_shared<TypeRegistry>();
    auto s = graph();
    EXPECT_THROW(parse_query("", s, reg), ParseError);
    EXPECT_THROW(parse_query("QUERY k=2 r=1\nEND\n", s, reg), ParseError);
    EXPECT_THROW(parse_query("QUERY k=1 r=1 d=3\nCLAUSE\nSPHERE\nDOMAIN 2\nCENTRES 1\nE 1 2\n", s, reg), ParseError);
    // Centre count differs from k.
    EXPECT_THROW(parse_query("QUERY k=2 r=1 d=3\nCLAUSE\nSPHERE\nDOMAIN 2\nCENTRES 1\nE 1 2\nEND\n", s, reg),
                 CentreCountMismatch);
    // Element 3 is two steps from the only centre.
    EXPECT_THROW(
        parse_query("QUERY k=1 r=1 d=3\nCLAUSE\nSPHERE\nDOMAIN 3\nCENTRES 1\nE 1 2\nE 2 3\nEND\n", s, reg),
        RadiusMismatch);
    // Degree bound of the query applies to the spheres.
    EXPECT_THROW(parse_query("QUERY k=1 r=1 d=2\nCLAUSE\nSPHERE\nDOMAIN 4\nCENTRES 1\nE 1 2\nE 1 3\nE 1 4\nEND\n",
                             s, reg),
                 DegreeExceeded);
    EXPECT_THROW(parse_query("QUERY k=1 r=0 d=3\nCLAUSE\nSPHERE\nDOMAIN 1\nCENTRES 1\nHANF - >= 1 r=2\nDOMAIN "
                             "1\nCENTRES 1\nEND\n",
                             s, reg),
                 RadiusMismatch);
    EXPECT_THROW(parse_query("QUERY k=1 r=0 d=3\nCLAUSE\nSPHERE\nDOMAIN 1\nCENTRES 1\nHANF + >= 1\nDOMAIN "
                             "2\nCENTRES 1 2\nEND\n",
                             s, reg),
                 CentreCountMismatch);
}

TEST(Query, NeighbourhoodBlockRoundTrip) {
    auto s = graph();
    Neighbourhood nb = parse_neighbourhood("DOMAIN 3\nCENTRES 2\nE 1 2\nE 2 3\n", s, 1, 3);
    EXPECT_EQ(nb.size(), 3u);
    Neighbourhood back = parse_neighbourhood(print_neighbourhood(nb), s, 1, 3);
    TypeRegistry reg;
    EXPECT_EQ(canonicalize(nb, reg), canonicalize(back, reg));
}
