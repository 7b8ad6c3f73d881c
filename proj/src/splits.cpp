#include "aqe/splits.hpp"

#include <algorithm>
#include <numeric>

#include "aqe/errors.hpp"

namespace aqe {

int anchor_radius(int r, int k) { return std::max(3 * r * k, (2 * r + 1) * (k - 1) + r); }

bool RSplit::operator==(const RSplit& o) const {
    if (k != o.k || r != o.r || radius != o.radius || groups.size() != o.groups.size()) return false;
    for (size_t i = 0; i < groups.size(); ++i)
        if (groups[i].coords != o.groups[i].coords || groups[i].binding != o.groups[i].binding ||
            groups[i].anchor != o.groups[i].anchor)
            return false;
    return true;
}

namespace {

// Database copy of a fragment, used to run ball and distance queries on
// representatives.
Database fragment_db(const Fragment& f) {
    Database db(f.schema, f.m, 1 << 20);
    for (size_t t = 0; t < f.tuple_count(); ++t) db.add_tuple(f.rel[t], f.tuple(t));
    db.finalize();
    return db;
}

uint32_t local_id(const Fragment& f, Element g) {
    auto it = std::lower_bound(f.original.begin(), f.original.end(), g);
    if (it == f.original.end() || *it != g) throw ElementOutOfRange("element outside the neighbourhood");
    return static_cast<uint32_t>(it - f.original.begin()) + 1;
}

}  // namespace

RSplit unique_split_of(const Database& db, std::span<const Element> b, int r, TypeRegistry& reg) {
    RSplit C;
    C.k = static_cast<int>(b.size());
    C.r = r;
    C.radius = anchor_radius(r, C.k);
    std::vector<int> group;
    C.groups.resize(centre_groups(db, b, r, group));
    for (int i = 0; i < C.k; ++i) C.groups[group[i]].coords.push_back(i);
    for (auto& g : C.groups) {
        Element lead[1] = {b[g.coords[0]]};
        Neighbourhood nb = extract_neighbourhood(db, lead, C.radius);
        g.anchor = canonicalize(nb, reg);
        auto emb = embedding_into_representative(nb, g.anchor, reg);
        for (size_t j = 1; j < g.coords.size(); ++j) g.binding.push_back(emb[local_id(nb.fragment, b[g.coords[j]]) - 1]);
    }
    return C;
}

std::optional<std::vector<Element>> found_from(const Database& db, std::span<const Element> a, const RSplit& C,
                                               TypeRegistry& reg) {
    if (a.size() != C.groups.size()) return std::nullopt;
    std::vector<Element> b(C.k, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        const SplitGroup& g = C.groups[i];
        Element lead[1] = {a[i]};
        Neighbourhood nb = extract_neighbourhood(db, lead, C.radius);
        if (canonicalize(nb, reg) != g.anchor) return std::nullopt;  // step 1
        auto emb = embedding_into_representative(nb, g.anchor, reg);
        std::vector<uint32_t> inv(emb.size() + 1, 0);
        for (size_t v = 0; v < emb.size(); ++v) inv[emb[v]] = static_cast<uint32_t>(v + 1);
        b[g.coords[0]] = a[i];
        for (size_t j = 1; j < g.coords.size(); ++j) {
            const uint32_t pos = g.binding[j - 1];
            if (pos == 0 || pos >= inv.size()) return std::nullopt;
            b[g.coords[j]] = nb.fragment.original[inv[pos] - 1];
        }
    }
    // Step 3: groups must stay apart, otherwise b has a coarser split.
    if (C.groups.size() > 1) {
        std::vector<int> group;
        centre_groups(db, b, C.r, group);
        for (size_t i = 0; i < C.groups.size(); ++i)
            for (int p : C.groups[i].coords)
                if (group[p] != static_cast<int>(i)) return std::nullopt;
    }
    return b;
}

bool binding_is_r_good(const TypeInfo& anchor, const std::vector<uint32_t>& binding, int r) {
    const Neighbourhood& rep = anchor.representative;
    Database db = fragment_db(rep.fragment);
    std::vector<Element> t{rep.centres.at(0)};
    for (uint32_t p : binding) {
        if (p < 1 || p > rep.fragment.m) return false;
        t.push_back(p);
    }
    std::vector<int> group;
    return centre_groups(db, t, r, group) == 1;
}

uint64_t a_priori_s_eff(const std::vector<TypeId>& T, TypeRegistry& reg, int g, int k) {
    auto f = [g](int delta) -> uint64_t {
        if (delta == 0) return 1;
        uint64_t total = 0, layer = g;
        for (int t = 1; t <= delta; ++t) {
            total += layer;
            layer *= std::max(1, g - 1);
        }
        return total;
    };
    std::vector<uint64_t> per(k + 1, 0);
    for (TypeId t : T) {
        const TypeInfo& info = reg.info(t);
        uint64_t prod = 1;
        for (const auto& c : info.components) {
            const TypeInfo& ci = reg.info(c.type);
            const auto& rep = ci.representative;
            if (c.positions.size() <= 1) continue;
            Database db = fragment_db(rep.fragment);
            for (size_t j = 1; j < c.positions.size(); ++j) {
                const int dist = gaifman_distance(db, rep.centres[0], rep.centres[j], 1 << 20);
                prod *= f(dist);
            }
        }
        per[info.component_count] += prod;
    }
    return std::max<uint64_t>(1, *std::max_element(per.begin(), per.end()));
}

SplitEngine::SplitEngine(LocalTypeCache& cache, std::vector<TypeId> T, int k) : cache_(&cache), k_(k) {
    TypeRegistry& reg = cache.registry();
    const int r = cache.radius();
    by_count_.resize(k + 1);
    std::sort(T.begin(), T.end());
    T.erase(std::unique(T.begin(), T.end()), T.end());
    for (TypeId t : T) {
        const TypeInfo& info = reg.info(t);
        if (info.k != k) throw CentreCountMismatch("type in T has the wrong number of centres");
        Plan plan{t, {}};
        for (const auto& c : info.components) {
            const TypeInfo& ci = reg.info(c.type);
            Database db = fragment_db(ci.representative.fragment);
            Element lead[1] = {ci.representative.centres[0]};
            Neighbourhood nb = extract_neighbourhood(db, lead, r);
            Comp comp;
            comp.leader = c.positions[0];
            comp.leader_type = canonicalize_connected(nb.fragment, nb.centres, r, reg);
            comp.others.assign(c.positions.begin() + 1, c.positions.end());
            comp.reach = (2 * r + 1) * static_cast<int>(comp.others.size());
            plan.comps.push_back(std::move(comp));
        }
        conn_ = std::max(conn_, info.component_count);
        by_count_[info.component_count].push_back(std::move(plan));
    }
    s_eff_ = a_priori_s_eff(T, reg, cache.db().gaifman_degree_bound(), k);
}

const std::vector<Element>& SplitEngine::ball(Element a, int radius) {
    const int r = cache_->radius();
    if (radius == r || radius == r + 1) return cache_->ball(a, radius);
    const uint64_t key = (static_cast<uint64_t>(radius) << 32) | a;
    auto it = balls_.find(key);
    if (it != balls_.end()) return it->second;
    Element c[1] = {a};
    return balls_.emplace(key, gaifman_ball(cache_->db(), c, radius)).first->second;
}

template <typename Visit>
bool SplitEngine::for_each(std::span<const Element> a, Visit&& visit) {
    const size_t l = a.size();
    if (l == 0 || l > static_cast<size_t>(k_)) return true;
    std::vector<Element> b(k_);
    for (const Plan& plan : by_count_[l]) {
        bool ok = true;
        for (size_t i = 0; i < l && ok; ++i) ok = cache_->element_type(a[i]) == plan.comps[i].leader_type;
        if (!ok) continue;
        // Free positions in order, each with the ball it ranges over.
        std::vector<std::pair<int, const std::vector<Element>*>> free;
        for (size_t i = 0; i < l; ++i) {
            b[plan.comps[i].leader] = a[i];
            if (plan.comps[i].others.empty()) continue;
            const auto* B = &ball(a[i], plan.comps[i].reach);
            for (int p : plan.comps[i].others) free.push_back({p, B});
        }
        std::vector<size_t> idx(free.size(), 0);
        while (true) {
            bool empty = false;
            for (size_t j = 0; j < free.size(); ++j) {
                if (free[j].second->empty()) empty = true;
                else b[free[j].first] = (*free[j].second)[idx[j]];
            }
            if (empty) break;
            if (cache_->tuple_type(b) == plan.type && !visit(b)) return false;
            size_t j = 0;
            while (j < free.size() && ++idx[j] == free[j].second->size()) idx[j++] = 0;
            if (j == free.size()) break;
        }
    }
    return true;
}

size_t SplitEngine::candidates(std::span<const Element> a, std::vector<Element>& out) {
    size_t added = 0;
    for_each(a, [&](const std::vector<Element>& b) {
        out.insert(out.end(), b.begin(), b.end());
        ++added;
        return true;
    });
    return added;
}

bool SplitEngine::has_candidate(std::span<const Element> a) {
    bool found = false;
    for_each(a, [&](const std::vector<Element>&) {
        found = true;
        return false;
    });
    return found;
}

std::vector<std::vector<Element>> candidate_found_tuples(LocalTypeCache& cache, std::span<const Element> a,
                                                         const std::vector<TypeId>& T, int k) {
    SplitEngine eng(cache, T, k);
    std::vector<Element> flat;
    eng.candidates(a, flat);
    std::vector<std::vector<Element>> out;
    for (size_t i = 0; i < flat.size(); i += k) out.emplace_back(flat.begin() + i, flat.begin() + i + k);
    return out;
}

}  // namespace aqe
