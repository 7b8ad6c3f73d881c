#include "aqe/generators.hpp"

#include <algorithm>
#include <set>

#include "aqe/errors.hpp"
#include "aqe/rng.hpp"

namespace aqe::gen {

namespace {

SchemaPtr graph_schema() {
    static const SchemaPtr s = std::make_shared<const Schema>(Schema::graph());
    return s;
}

}  // namespace

SchemaPtr mixed_schema() {
    static const SchemaPtr s =
        std::make_shared<const Schema>(Schema({Relation{"E", 2, true}, Relation{"R", 3, false}}));
    return s;
}

Database pattern_graph(int which, int d) {
    if (which < 1 || which > 4) throw Error("pattern graph index must be 1..4");
    Database db(graph_schema(), 8, d);
    for (auto [u, v] : {std::pair{1, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}, {3, 7}, {3, 8}})
        db.add_tuple(0, {Element(u), Element(v)});
    if (which == 2 || which == 3) db.add_tuple(0, {5, 6});
    if (which == 3) db.add_tuple(0, {7, 8});
    db.finalize();
    return db;
}

Neighbourhood pattern_neighbourhood(int which, int d) {
    Database db = pattern_graph(which, d);
    std::vector<Element> centres = which == 4 ? std::vector<Element>{1} : std::vector<Element>{1, 4};
    return extract_neighbourhood(db, centres, 2);
}

TypeId pattern_type(int which, TypeRegistry& reg, int d) {
    return canonicalize(pattern_neighbourhood(which, d), reg);
}

std::vector<Element> random_permutation(uint32_t n, uint64_t seed) {
    std::vector<Element> p(n + 1);
    for (uint32_t i = 0; i <= n; ++i) p[i] = i;
    if (seed == 0) return p;
    Rng rng(seed);
    for (uint32_t i = n; i > 1; --i) std::swap(p[i], p[1 + rng.below(i)]);
    return p;
}

Copies disjoint_copies(const std::vector<const Database*>& parts, const std::vector<uint32_t>& counts,
                       uint32_t isolated, uint64_t seed, int d) {
    if (parts.size() != counts.size()) throw Error("parts and counts differ in length");
    if (parts.empty()) throw Error("need at least one part");
    uint64_t n = isolated;
    for (size_t i = 0; i < parts.size(); ++i) n += static_cast<uint64_t>(parts[i]->n()) * counts[i];
    if (n > 0xFFFFFFF0ULL) throw Error("database too large");
    auto perm = random_permutation(static_cast<uint32_t>(n), seed);
    Copies out{Database(parts[0]->schema_ptr(), static_cast<uint32_t>(n), d), {}, {}};
    Element base = 0;
    std::vector<Element> buf;
    for (size_t i = 0; i < parts.size(); ++i) {
        const Database& p = *parts[i];
        for (uint32_t c = 0; c < counts[i]; ++c) {
            std::vector<Element> map(p.n());
            for (Element v = 1; v <= p.n(); ++v) map[v - 1] = perm[base + v];
            for (int r = 0; r < p.schema().size(); ++r)
                for (size_t t = 0; t < p.tuple_count(r); ++t) {
                    buf.clear();
                    for (Element e : p.tuple(r, t)) buf.push_back(map[e - 1]);
                    out.db.add_tuple(r, buf);
                }
            out.maps.push_back(std::move(map));
            base += p.n();
        }
    }
    for (uint32_t i = 1; i <= isolated; ++i) out.isolated.push_back(perm[base + i]);
    out.db.finalize();
    return out;
}

Database random_graph(uint32_t n, int d, uint64_t edges, uint64_t seed) {
    Database db(graph_schema(), n, d);
    if (n < 2) {
        db.finalize();
        return db;
    }
    Rng rng(seed);
    std::vector<int> deg(n + 1, 0);
    std::set<std::pair<Element, Element>> seen;
    for (uint64_t i = 0; i < edges; ++i) {
        Element u = 1 + rng.below(n), v = 1 + rng.below(n);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (deg[u] >= d || deg[v] >= d || !seen.insert({u, v}).second) continue;
        ++deg[u];
        ++deg[v];
        db.add_tuple(0, {u, v});
    }
    db.finalize();
    return db;
}

Database random_mixed(uint32_t n, int d, uint64_t edges, uint64_t triples, uint64_t seed) {
    Database db(mixed_schema(), n, d);
    Rng rng(seed);
    std::vector<int> deg(n + 1, 0);
    std::set<std::vector<Element>> seen;
    auto try_add = [&](int rel, std::vector<Element> t) {
        std::vector<Element> distinct(t);
        if (rel == 0 && distinct[0] > distinct[1]) std::swap(t[0], t[1]);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (Element e : distinct)
            if (deg[e] >= d) return;
        std::vector<Element> key(t);
        key.insert(key.begin(), static_cast<Element>(rel));
        if (!seen.insert(key).second) return;
        for (Element e : distinct) ++deg[e];
        db.add_tuple(rel, t);
    };
    if (n >= 2)
        for (uint64_t i = 0; i < edges; ++i) {
            Element u = 1 + rng.below(n), v = 1 + rng.below(n);
            if (u != v) try_add(0, {u, v});
        }
    if (n >= 1)
        for (uint64_t i = 0; i < triples; ++i)
            try_add(1, {Element(1 + rng.below(n)), Element(1 + rng.below(n)), Element(1 + rng.below(n))});
    db.finalize();
    return db;
}

QueryNF two_clause_query(RegistryPtr reg) {
    QueryNF q;
    q.k = 2;
    q.r = 2;
    q.d = 3;
    q.schema = graph_schema();
    q.registry = reg;
    const TypeId t1 = pattern_type(1, *reg), t2 = pattern_type(2, *reg), t4 = pattern_type(4, *reg);
    q.clauses.push_back(Clause{SphereAtom{t1, 2}, {}});
    q.clauses.push_back(Clause{SphereAtom{t2, 2}, {HanfSentence{true, 1, t4, 2}}});
    return q;
}

QueryNF local_query(SchemaPtr schema, RegistryPtr reg, int k, int r, int d, const std::vector<TypeId>& types) {
    QueryNF q;
    q.k = k;
    q.r = r;
    q.d = d;
    q.schema = std::move(schema);
    q.registry = std::move(reg);
    std::vector<TypeId> ts(types);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (TypeId t : ts) {
        if (q.registry->info(t).k != k) throw CentreCountMismatch("type centre count differs from k");
        q.clauses.push_back(Clause{SphereAtom{t, r}, {}});
    }
    return q;
}

Copies n1_with_n2_copies(uint32_t m, uint64_t seed) {
    Database n1 = pattern_graph(1), n2 = pattern_graph(2);
    return disjoint_copies({&n1, &n2}, {1, m}, 0, seed, 3);
}

}  // namespace aqe::gen
