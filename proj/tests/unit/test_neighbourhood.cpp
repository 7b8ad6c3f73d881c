#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "aqe/errors.hpp"
#include "aqe/exact.hpp"
#include "aqe/generators.hpp"
#include "aqe/neighbourhood.hpp"
#include "aqe/rng.hpp"

using namespace aqe;

namespace {

using TupleSet = std::set<std::pair<int, std::vector<Element>>>;

TupleSet tuples_of(const Fragment& f, const std::vector<Element>& map) {
    TupleSet out;
    for (size_t t = 0; t < f.tuple_count(); ++t) {
        std::vector<Element> u;
        for (Element e : f.tuple(t)) u.push_back(map[e]);
        if (f.schema->relation(f.rel[t]).symmetric && u[0] > u[1]) std::swap(u[0], u[1]);
        out.insert({f.rel[t], u});
    }
    return out;
}

// Brute-force isomorphism test that respects the centre order. Only for
// neighbourhoods with at most 9 elements.
bool isomorphic(const Neighbourhood& a, const Neighbourhood& b) {
    if (a.fragment.m != b.fragment.m || a.centres.size() != b.centres.size() ||
        a.fragment.tuple_count() != b.fragment.tuple_count())
        return false;
    const uint32_t m = a.fragment.m;
    std::vector<Element> id(m + 1);
    std::iota(id.begin(), id.end(), 0);
    const TupleSet tb = tuples_of(b.fragment, id);
    std::vector<Element> perm(m);
    std::iota(perm.begin(), perm.end(), 1);
    do {
        std::vector<Element> map(m + 1, 0);
        for (uint32_t v = 1; v <= m; ++v) map[v] = perm[v - 1];
        bool centres_ok = true;
        for (size_t i = 0; i < a.centres.size(); ++i) centres_ok = centres_ok && map[a.centres[i]] == b.centres[i];
        if (centres_ok && tuples_of(a.fragment, map) == tb) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// Components of N_r(t) computed from the extracted fragment with a plain
// flood fill.
std::vector<int> reference_groups(const Database& db, std::span<const Element> t, int r) {
    Neighbourhood nb = extract_neighbourhood(db, t, r);
    const uint32_t m = nb.fragment.m;
    std::vector<std::vector<Element>> adj(m + 1);
    for (size_t u = 0; u < nb.fragment.tuple_count(); ++u) {
        auto tu = nb.fragment.tuple(u);
        for (Element x : tu)
            for (Element y : tu) adj[x].push_back(y);
    }
    std::vector<int> comp(m + 1, -1);
    std::vector<int> group(t.size());
    int next = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        const Element c = nb.centres[i];
        if (comp[c] < 0) {
            std::vector<Element> stack{c};
            comp[c] = next;
            while (!stack.empty()) {
                Element x = stack.back();
                stack.pop_back();
                for (Element y : adj[x])
                    if (comp[y] < 0) comp[y] = next, stack.push_back(y);
            }
            ++next;
        }
        group[i] = comp[c];
    }
    return group;
}

}  // namespace

TEST(Neighbourhood, ExtractN1) {
    Database n1 = gen::pattern_graph(1);
    Element t[2] = {1, 4};
    Neighbourhood nb = extract_neighbourhood(n1, t, 2);
    EXPECT_EQ(nb.size(), 8u);
    EXPECT_EQ(nb.fragment.tuple_count(), 7u);
    Element leaf[1] = {5};
    EXPECT_EQ(extract_neighbourhood(n1, leaf, 2).size(), 4u);  // 5, 2, 6, 1
}

TEST(Neighbourhood, PatternTypesAreDistinctAndConnected) {
    TypeRegistry reg;
    std::set<TypeId> ids;
    for (int w = 1; w <= 4; ++w) {
        const TypeId t = gen::pattern_type(w, reg);
        ids.insert(t);
        EXPECT_TRUE(reg.info(t).connected());
        EXPECT_EQ(reg.info(t).k, w == 4 ? 1 : 2);
        EXPECT_EQ(reg.info(t).cardinality, 8u);
    }
    EXPECT_EQ(ids.size(), 4u);
}

TEST(Neighbourhood, CanonicalFormAgreesWithBruteForceIsomorphism) {
    // Small neighbourhoods from random graphs and mixed structures; equal ids
    // exactly when a centre-respecting isomorphism exists.
    TypeRegistry reg;
    std::vector<std::pair<Neighbourhood, TypeId>> seen;
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        Database g = seed % 2 ? gen::random_graph(14, 3, 18, seed) : gen::random_mixed(14, 2, 8, 4, seed);
        for (Element a = 1; a <= g.n(); ++a)
            for (Element b : {a, Element(1 + a % g.n())}) {
                Element t[2] = {a, b};
                Neighbourhood nb = extract_neighbourhood(g, t, 1);
                if (nb.size() > 8) continue;
                seen.push_back({nb, canonicalize(nb, reg)});
            }
    }
    ASSERT_GT(seen.size(), 50u);
    int compared = 0;
    for (size_t i = 0; i < seen.size(); i += 3)
        for (size_t j = i + 1; j < seen.size() && j < i + 40; ++j) {
            if (seen[i].first.fragment.schema != seen[j].first.fragment.schema) continue;
            EXPECT_EQ(seen[i].second == seen[j].second, isomorphic(seen[i].first, seen[j].first)) << i << " " << j;
            ++compared;
        }
    EXPECT_GT(compared, 100);
}

TEST(Neighbourhood, TypesInvariantUnderRelabelling) {
    for (uint64_t seed = 1; seed <= 4; ++seed) {
        Database n1 = gen::pattern_graph(1), n2 = gen::pattern_graph(2);
        gen::Copies plain = gen::disjoint_copies({&n1, &n2}, {3, 3}, 2, 0, 3);
        gen::Copies shuffled = gen::disjoint_copies({&n1, &n2}, {3, 3}, 2, seed, 3);
        TypeRegistry reg;
        for (size_t c = 0; c < plain.maps.size(); ++c)
            for (int v = 0; v < 8; ++v) {
                Element x[2] = {plain.maps[c][0], plain.maps[c][v]};
                Element y[2] = {shuffled.maps[c][0], shuffled.maps[c][v]};
                EXPECT_EQ(tuple_type_direct(plain.db, x, 2, reg), tuple_type_direct(shuffled.db, y, 2, reg));
            }
    }
}

TEST(Neighbourhood, EmbeddingIsAnIsomorphism) {
    TypeRegistry reg;
    Database g = gen::random_mixed(30, 3, 25, 8, 11);
    for (Element a = 1; a <= g.n(); a += 2) {
        Element t[2] = {a, Element(1 + (a * 7) % g.n())};
        Neighbourhood nb = extract_neighbourhood(g, t, 1);
        const TypeId id = canonicalize(nb, reg);
        auto emb = embedding_into_representative(nb, id, reg);
        const Neighbourhood& rep = reg.info(id).representative;
        std::vector<Element> map(nb.size() + 1, 0);
        for (uint32_t v = 1; v <= nb.size(); ++v) map[v] = emb[v - 1];
        std::vector<Element> idmap(rep.size() + 1);
        std::iota(idmap.begin(), idmap.end(), 0);
        EXPECT_EQ(tuples_of(nb.fragment, map), tuples_of(rep.fragment, idmap));
        for (size_t i = 0; i < nb.centres.size(); ++i) EXPECT_EQ(map[nb.centres[i]], rep.centres[i]);
        EXPECT_EQ(representative_element(reg.info(id), emb[0]), emb[0]);
    }
    Element t[1] = {1};
    Neighbourhood other = extract_neighbourhood(g, t, 1);
    Element u[2] = {1, 2};
    EXPECT_THROW(embedding_into_representative(other, canonicalize(extract_neighbourhood(g, u, 1), reg), reg),
                 TypeMismatch);
}

TEST(Neighbourhood, WideTupleOutsideBothBallsDoesNotConnect) {
    Schema s({Relation{"R", 3, false}});
    auto schema = std::make_shared<const Schema>(s);
    Database db = load_database(schema, "domain 4\nR 1 2 3\nR 1 1 4\n", 3);
    std::vector<int> g;
    Element ab[2] = {1, 2};
    // r = 0: the only tuple through 1 and 2 also contains 3.
    EXPECT_EQ(centre_groups(db, ab, 0, g), 2);
    EXPECT_EQ(gaifman_distance(db, 1, 2, 5), 1);
    // r = 1: element 3 is inside the balls, so the tuple is induced.
    EXPECT_EQ(centre_groups(db, ab, 1, g), 1);
    Element a3[3] = {1, 2, 3};
    EXPECT_EQ(centre_groups(db, a3, 0, g), 1);
    TypeRegistry reg;
    EXPECT_EQ(reg.info(tuple_type_direct(db, ab, 0, reg)).component_count, 2);
}

TEST(Neighbourhood, CentreGroupsMatchInducedComponents) {
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        Database db = seed % 2 ? gen::random_mixed(30, 3, 15, 12, seed) : gen::random_graph(30, 3, 30, seed);
        Rng rng(seed);
        for (int rep = 0; rep < 150; ++rep) {
            const int k = 2 + static_cast<int>(rng.below(2));
            const int r = static_cast<int>(rng.below(3));
            std::vector<Element> t(k);
            for (auto& e : t) e = static_cast<Element>(1 + rng.below(db.n()));
            std::vector<int> g;
            centre_groups(db, t, r, g);
            EXPECT_EQ(g, reference_groups(db, t, r));
        }
    }
}

TEST(LocalTypeCache, FastRouteMatchesDirectRoute) {
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        Database db = seed % 2 ? gen::random_mixed(40, 3, 20, 14, seed) : gen::random_graph(40, 3, 45, seed);
        for (int r = 0; r <= 2; ++r) {
            auto reg = std::make_shared<TypeRegistry>();
            LocalTypeCache cache(db, r, reg);
            Rng rng(seed * 31 + r);
            for (int rep = 0; rep < 200; ++rep) {
                const int k = 1 + static_cast<int>(rng.below(3));
                std::vector<Element> t(k);
                for (auto& e : t) e = static_cast<Element>(1 + rng.below(db.n()));
                if (rep % 5 == 0 && k >= 2) t[1] = t[0];
                EXPECT_EQ(cache.tuple_type(t), tuple_type_direct(db, t, r, *reg));
            }
        }
    }
}

TEST(LocalTypeCache, OnlyRadiusRAndRPlusOneBalls) {
    Database g = gen::pattern_graph(1);
    LocalTypeCache cache(g, 1, std::make_shared<TypeRegistry>());
    EXPECT_EQ(cache.ball(1, 1).size(), 4u);
    EXPECT_EQ(cache.ball(1, 2).size(), 8u);
    EXPECT_THROW(cache.ball(1, 3), Error);
}

TEST(TypeRegistry, UnknownIdThrows) {
    TypeRegistry reg;
    EXPECT_THROW(reg.info(5), IndexOutOfRange);
    EXPECT_EQ(reg.find({1, 2, 3}), kNoType);
}

TEST(Neighbourhood, SharedRegistryKeepsSchemasApart) {
    // An isolated vertex looks the same under any schema, but its type must not
    // be shared: composed types read relations from the representative.
    TypeRegistry reg;
    Database g = gen::random_graph(3, 2, 0, 1);
    Database m = gen::random_mixed(3, 2, 0, 0, 1);
    Element one[1] = {1};
    const TypeId tg = canonicalize(extract_neighbourhood(g, one, 1), reg);
    const TypeId tm = canonicalize(extract_neighbourhood(m, one, 1), reg);
    EXPECT_NE(tg, tm);
    EXPECT_EQ(reg.info(tm).representative.fragment.schema->size(), 2);
}
