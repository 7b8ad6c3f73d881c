#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "aqe/enumerate.hpp"
#include "aqe/errors.hpp"
#include "aqe/exact.hpp"
#include "aqe/generators.hpp"
#include "aqe/splits.hpp"

using namespace aqe;

namespace {

Database test_db(uint64_t seed) {
    switch (seed % 3) {
        case 0: return gen::random_graph(24, 3, 30, seed);
        case 1: return gen::random_mixed(20, 3, 10, 7, seed);
        default: {
            Database n1 = gen::pattern_graph(1), n2 = gen::pattern_graph(2);
            return gen::disjoint_copies({&n1, &n2}, {2, 1}, 0, seed, 3).db;
        }
    }
}

}  // namespace

TEST(Splits, AnchorRadius) {
    EXPECT_EQ(anchor_radius(2, 2), 12);
    EXPECT_EQ(anchor_radius(1, 3), 9);
    EXPECT_EQ(anchor_radius(0, 1), 0);
    EXPECT_EQ(anchor_radius(0, 3), 2);  // (2r+1)(k-1)+r wins at r = 0
}

TEST(Splits, FoundFromRoundTrip) {
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        Database db = test_db(seed);
        TypeRegistry reg;
        Rng rng(seed);
        for (int rep = 0; rep < 60; ++rep) {
            const int k = 1 + static_cast<int>(rng.below(3));
            const int r = static_cast<int>(rng.below(2));
            std::vector<Element> b(k);
            for (auto& e : b) e = static_cast<Element>(1 + rng.below(db.n()));
            RSplit C = unique_split_of(db, b, r, reg);
            std::vector<Element> a;
            for (const auto& g : C.groups) {
                a.push_back(b[g.coords[0]]);
                EXPECT_TRUE(binding_is_r_good(reg.info(g.anchor), g.binding, r));
            }
            auto found = found_from(db, a, C, reg);
            ASSERT_TRUE(found);
            EXPECT_EQ(*found, b);
            // Leaders listed out of order do not reproduce b unless they coincide.
            if (a.size() == 2 && a[0] != a[1]) {
                std::swap(a[0], a[1]);
                auto other = found_from(db, a, C, reg);
                if (other) EXPECT_EQ(unique_split_of(db, *other, r, reg), C);
            }
            // Too few leaders.
            a.pop_back();
            EXPECT_FALSE(found_from(db, a, C, reg));
        }
    }
}

TEST(Splits, SplitIsInvariantUnderRelabelling) {
    Database n1 = gen::pattern_graph(1), n2 = gen::pattern_graph(2);
    gen::Copies p = gen::disjoint_copies({&n1, &n2}, {2, 2}, 0, 0, 3);
    gen::Copies s = gen::disjoint_copies({&n1, &n2}, {2, 2}, 0, 17, 3);
    TypeRegistry reg;
    for (int v = 0; v < 8; ++v)
        for (int w = 0; w < 8; ++w) {
            Element x[3] = {p.maps[0][v], p.maps[0][w], p.maps[3][v]};
            Element y[3] = {s.maps[0][v], s.maps[0][w], s.maps[3][v]};
            RSplit a = unique_split_of(p.db, x, 1, reg), b = unique_split_of(s.db, y, 1, reg);
            EXPECT_EQ(a.groups.size(), b.groups.size());
            for (size_t i = 0; i < a.groups.size() && i < b.groups.size(); ++i) {
                EXPECT_EQ(a.groups[i].coords, b.groups[i].coords);
                EXPECT_EQ(a.groups[i].anchor, b.groups[i].anchor);
            }
        }
}

TEST(Splits, APrioriBoundFrozen) {
    TypeRegistry reg;
    const TypeId t1 = gen::pattern_type(1, reg), t2 = gen::pattern_type(2, reg);
    // Centres at distance 1, degree 3: three choices for the second centre.
    EXPECT_EQ(a_priori_s_eff({t1}, reg, 3, 2), 3u);
    EXPECT_EQ(a_priori_s_eff({t1, t2}, reg, 3, 2), 6u);
}

TEST(Splits, EngineMatchesBruteForce) {
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        Database db = test_db(seed);
        for (int k = 1; k <= 2; ++k)
            for (int r = 0; r <= 1; ++r) {
                auto reg = std::make_shared<TypeRegistry>();
                IndexSpace all = IndexSpace::tuples(db.n(), k);
                std::vector<TypeId> direct(all.size()), T;
                std::vector<Element> b(k);
                for (uint64_t x = 0; x < all.size(); ++x) {
                    all.decode(x, b.data());
                    direct[x] = tuple_type_direct(db, b, r, *reg);
                    if (x % 3 == 0) T.push_back(direct[x]);
                }
                std::sort(T.begin(), T.end());
                T.erase(std::unique(T.begin(), T.end()), T.end());
                LocalTypeCache cache(db, r, reg);
                SplitEngine eng(cache, T, k);
                std::vector<int> hits(all.size(), 0);
                IndexSpace leaders = IndexSpace::prefix_union(db.n(), k);
                std::vector<Element> a(k), out;
                for (uint64_t x = 0; x < leaders.size(); ++x) {
                    const int len = leaders.decode(x, a.data());
                    out.clear();
                    const size_t got = eng.candidates(std::span<const Element>(a.data(), len), out);
                    EXPECT_LE(got, eng.s_eff());
                    EXPECT_EQ(got > 0, eng.has_candidate(std::span<const Element>(a.data(), len)));
                    for (size_t j = 0; j < out.size(); j += k) ++hits[all.encode(std::span<const Element>(&out[j], k))];
                }
                for (uint64_t x = 0; x < all.size(); ++x)
                    EXPECT_EQ(hits[x], std::binary_search(T.begin(), T.end(), direct[x]) ? 1 : 0);
            }
    }
}

TEST(Splits, EngineRejectsWrongArity) {
    auto reg = std::make_shared<TypeRegistry>();
    Database n1 = gen::pattern_graph(1);
    LocalTypeCache cache(n1, 2, reg);
    const TypeId t1 = gen::pattern_type(1, *reg);
    EXPECT_THROW(SplitEngine(cache, {t1}, 3), CentreCountMismatch);
    SplitEngine eng(cache, {t1}, 2);
    EXPECT_EQ(eng.conn(), 1);
    auto found = candidate_found_tuples(cache, std::vector<Element>{1}, {t1}, 2);
    ASSERT_EQ(found.size(), 1u);
    EXPECT_EQ(found[0], (std::vector<Element>{1, 4}));
}
