#include "aqe/neighbourhood.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "aqe/errors.hpp"

namespace aqe {

namespace {

// Leaf budget for the canonical search; orbit pruning keeps real
// neighbourhoods far below it.
constexpr size_t kLeafCap = 2'000'000;

// Keys carry the schema so one registry can hold types over several schemas.
void push_schema(std::vector<uint32_t>& key, const Schema& schema) {
    key.push_back(static_cast<uint32_t>(schema.size()));
    for (const Relation& rel : schema.relations()) {
        uint32_t h = 2166136261u;
        for (unsigned char ch : rel.name) h = (h ^ ch) * 16777619u;
        key.push_back(h);
        key.push_back(static_cast<uint32_t>(rel.arity) * 2 + (rel.symmetric ? 1 : 0));
    }
}

struct Incidence {
    // inc[v] for v in 1..m: (tuple index, position)
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> inc;
    std::vector<char> sym;

    explicit Incidence(const Fragment& f) : inc(f.m + 1), sym(f.tuple_count()) {
        for (size_t t = 0; t < f.tuple_count(); ++t) {
            sym[t] = f.schema->relation(f.rel[t]).symmetric;
            auto tu = f.tuple(t);
            for (uint32_t p = 0; p < tu.size(); ++p) inc[tu[p]].emplace_back(static_cast<uint32_t>(t), p);
        }
    }
};

class UnionFind {
public:
    explicit UnionFind(size_t n) : p_(n) { std::iota(p_.begin(), p_.end(), 0); }
    size_t find(size_t x) {
        while (p_[x] != x) x = p_[x] = p_[p_[x]];
        return x;
    }
    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) p_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<size_t> p_;
};

std::vector<uint32_t> initial_colours(uint32_t m, std::span<const Element> centres) {
    std::vector<uint32_t> col(m + 1, 0);
    std::vector<Element> distinct;
    for (Element c : centres)
        if (std::find(distinct.begin(), distinct.end(), c) == distinct.end()) distinct.push_back(c);
    const uint32_t nd = static_cast<uint32_t>(distinct.size());
    for (uint32_t v = 1; v <= m; ++v) col[v] = nd;
    for (uint32_t i = 0; i < nd; ++i) col[distinct[i]] = i;
    return col;
}

uint32_t count_colours(const std::vector<uint32_t>& col) {
    std::vector<uint32_t> c(col.begin() + 1, col.end());
    std::sort(c.begin(), c.end());
    return static_cast<uint32_t>(std::unique(c.begin(), c.end()) - c.begin());
}

// Refines until stable. Colour of v is always the first signature component,
// so cells only split and keep their relative order.
void refine(const Fragment& f, const Incidence& g, std::vector<uint32_t>& col) {
    const uint32_t m = f.m;
    uint32_t ncol = count_colours(col);
    std::vector<std::vector<uint32_t>> sig(m + 1);
    std::vector<std::vector<uint32_t>> items;
    std::vector<uint32_t> order(m);
    while (true) {
        for (uint32_t v = 1; v <= m; ++v) {
            items.clear();
            for (auto [t, p] : g.inc[v]) {
                auto tu = f.tuple(t);
                std::vector<uint32_t> it;
                it.reserve(tu.size() + 2);
                it.push_back(f.rel[t]);
                if (g.sym[t]) {
                    it.push_back(0);
                    it.push_back(col[tu[1 - p]]);
                } else {
                    it.push_back(p);
                    for (Element e : tu) it.push_back(col[e]);
                }
                items.push_back(std::move(it));
            }
            std::sort(items.begin(), items.end());
            auto& s = sig[v];
            s.clear();
            s.push_back(col[v]);
            for (auto& it : items) s.insert(s.end(), it.begin(), it.end());
        }
        std::iota(order.begin(), order.end(), 1);
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return sig[a] < sig[b]; });
        uint32_t rank = 0;
        for (uint32_t i = 0; i < m; ++i) {
            if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++rank;
            col[order[i]] = rank;
        }
        const uint32_t next = m == 0 ? 0 : rank + 1;
        if (next == ncol) break;
        ncol = next;
    }
}

std::vector<uint32_t> relabelled_tuples(const Fragment& f, const std::vector<uint32_t>& lab) {
    std::vector<std::vector<uint32_t>> ts;
    ts.reserve(f.tuple_count());
    for (size_t t = 0; t < f.tuple_count(); ++t) {
        auto tu = f.tuple(t);
        std::vector<uint32_t> x;
        x.reserve(tu.size() + 1);
        x.push_back(f.rel[t]);
        for (Element e : tu) x.push_back(lab[e]);
        if (f.schema->relation(f.rel[t]).symmetric && x[1] > x[2]) std::swap(x[1], x[2]);
        ts.push_back(std::move(x));
    }
    std::sort(ts.begin(), ts.end());
    std::vector<uint32_t> out;
    out.push_back(static_cast<uint32_t>(ts.size()));
    for (auto& x : ts) out.insert(out.end(), x.begin(), x.end());
    return out;
}

struct CanonSearch {
    const Fragment& f;
    const Incidence& g;
    std::span<const Element> centres;
    std::vector<uint32_t> header;
    std::vector<uint32_t> best_key;
    std::vector<uint32_t> best_lab;
    std::vector<uint32_t> best_inv;
    std::vector<std::vector<uint32_t>> autos;
    std::vector<uint32_t> prefix;
    size_t leaves = 0;

    void leaf(const std::vector<uint32_t>& col) {
        if (++leaves > kLeafCap) throw Error("canonical search exceeded its leaf budget");
        std::vector<uint32_t> lab(f.m + 1, 0);
        for (uint32_t v = 1; v <= f.m; ++v) lab[v] = col[v] + 1;
        std::vector<uint32_t> key = relabelled_tuples(f, lab);
        if (best_key.empty() || key < best_key) {
            best_key = std::move(key);
            best_lab = lab;
            best_inv.assign(f.m + 1, 0);
            for (uint32_t v = 1; v <= f.m; ++v) best_inv[lab[v]] = v;
        } else if (key == best_key) {
            std::vector<uint32_t> a(f.m + 1, 0);
            for (uint32_t v = 1; v <= f.m; ++v) a[v] = best_inv[lab[v]];
            autos.push_back(std::move(a));
        }
    }

    bool same_orbit(uint32_t v, const std::vector<uint32_t>& explored) {
        if (explored.empty()) return false;
        UnionFind uf(f.m + 1);
        bool any = false;
        for (const auto& a : autos) {
            bool fixes = true;
            for (uint32_t p : prefix)
                if (a[p] != p) {
                    fixes = false;
                    break;
                }
            if (!fixes) continue;
            any = true;
            for (uint32_t x = 1; x <= f.m; ++x) uf.unite(x, a[x]);
        }
        if (!any) return false;
        for (uint32_t u : explored)
            if (uf.find(u) == uf.find(v)) return true;
        return false;
    }

    void run(std::vector<uint32_t> col) {
        refine(f, g, col);
        // First non-singleton cell.
        std::vector<uint32_t> cnt(f.m + 1, 0);
        for (uint32_t v = 1; v <= f.m; ++v) ++cnt[col[v]];
        uint32_t target = f.m + 1;
        for (uint32_t c = 0; c <= f.m; ++c)
            if (cnt[c] >= 2) {
                target = c;
                break;
            }
        if (target == f.m + 1) {
            leaf(col);
            return;
        }
        std::vector<uint32_t> explored;
        for (uint32_t v = 1; v <= f.m; ++v) {
            if (col[v] != target) continue;
            if (same_orbit(v, explored)) continue;
            std::vector<uint32_t> child(f.m + 1);
            for (uint32_t x = 1; x <= f.m; ++x) child[x] = 2 * col[x] + 1;
            child[v] = 2 * col[v];
            prefix.push_back(v);
            run(std::move(child));
            prefix.pop_back();
            explored.push_back(v);
        }
    }
};

Fragment relabel_fragment(const Fragment& f, const std::vector<uint32_t>& lab) {
    Fragment out;
    out.schema = f.schema;
    out.m = f.m;
    out.original.resize(f.m);
    std::iota(out.original.begin(), out.original.end(), 1);
    out.offset.push_back(0);
    std::vector<std::vector<uint32_t>> ts;
    for (size_t t = 0; t < f.tuple_count(); ++t) {
        auto tu = f.tuple(t);
        std::vector<uint32_t> x{f.rel[t]};
        for (Element e : tu) x.push_back(lab[e]);
        if (f.schema->relation(f.rel[t]).symmetric && x[1] > x[2]) std::swap(x[1], x[2]);
        ts.push_back(std::move(x));
    }
    std::sort(ts.begin(), ts.end());
    for (auto& x : ts) out.add_tuple(x[0], std::span<const Element>(x.data() + 1, x.size() - 1));
    return out;
}

Fragment sub_fragment(const Fragment& f, const std::vector<int>& comp, int which,
                      std::vector<uint32_t>& local_of) {
    Fragment out;
    out.schema = f.schema;
    out.offset.push_back(0);
    local_of.assign(f.m + 1, 0);
    for (uint32_t v = 1; v <= f.m; ++v)
        if (comp[v - 1] == which) {
            local_of[v] = ++out.m;
            out.original.push_back(f.original.empty() ? v : f.original[v - 1]);
        }
    std::vector<Element> buf;
    for (size_t t = 0; t < f.tuple_count(); ++t) {
        auto tu = f.tuple(t);
        if (comp[tu[0] - 1] != which) continue;
        buf.clear();
        for (Element e : tu) buf.push_back(local_of[e]);
        out.add_tuple(f.rel[t], buf);
    }
    return out;
}

// Combines connected component types (already ordered by first position).
TypeId compose(int k, std::vector<TypeComponent> comps, TypeRegistry& reg) {
    std::vector<uint32_t> key{1, static_cast<uint32_t>(k), static_cast<uint32_t>(comps.size())};
    for (const auto& c : comps) {
        key.push_back(static_cast<uint32_t>(c.positions.size()));
        for (int p : c.positions) key.push_back(static_cast<uint32_t>(p));
        key.push_back(c.type);
    }
    return reg.intern(std::move(key), [&] {
        TypeInfo info;
        info.k = k;
        info.component_count = static_cast<int>(comps.size());
        info.components = comps;
        std::vector<int> comp_of(k, -1), idx_in(k, -1);
        for (size_t j = 0; j < comps.size(); ++j)
            for (size_t i = 0; i < comps[j].positions.size(); ++i) {
                comp_of[comps[j].positions[i]] = static_cast<int>(j);
                idx_in[comps[j].positions[i]] = static_cast<int>(i);
            }
        std::vector<const Neighbourhood*> reps;
        for (const auto& c : comps) reps.push_back(&reg.info(c.type).representative);
        std::vector<std::vector<uint32_t>> newid(comps.size());
        for (size_t j = 0; j < comps.size(); ++j) newid[j].assign(reps[j]->fragment.m + 1, 0);
        uint32_t next = 0;
        std::vector<Element> centres(k);
        for (int p = 0; p < k; ++p) {
            const int j = comp_of[p];
            const Element loc = reps[j]->centres[idx_in[p]];
            if (newid[j][loc] == 0) newid[j][loc] = ++next;
            centres[p] = newid[j][loc];
        }
        for (size_t j = 0; j < comps.size(); ++j)
            for (uint32_t v = 1; v <= reps[j]->fragment.m; ++v)
                if (newid[j][v] == 0) newid[j][v] = ++next;
        Fragment all;
        all.schema = reps[0]->fragment.schema;
        all.m = next;
        all.offset.push_back(0);
        std::vector<Element> buf;
        for (size_t j = 0; j < comps.size(); ++j) {
            const Fragment& rf = reps[j]->fragment;
            for (size_t t = 0; t < rf.tuple_count(); ++t) {
                buf.clear();
                for (Element e : rf.tuple(t)) buf.push_back(e);
                all.add_tuple(rf.rel[t], buf);
            }
        }
        // add_tuple above used component-local ids; rewrite them.
        {
            size_t t = 0;
            for (size_t j = 0; j < comps.size(); ++j) {
                const Fragment& rf = reps[j]->fragment;
                for (size_t u = 0; u < rf.tuple_count(); ++u, ++t)
                    for (uint32_t o = all.offset[t]; o < all.offset[t + 1]; ++o)
                        all.elems[o] = newid[j][all.elems[o]];
            }
        }
        std::vector<uint32_t> ident(all.m + 1);
        std::iota(ident.begin(), ident.end(), 0);
        info.representative.fragment = relabel_fragment(all, ident);
        info.representative.centres = centres;
        info.representative.radius = reps[0]->radius;
        info.cardinality = all.m;
        return info;
    });
}

}  // namespace

size_t VecHash::operator()(const std::vector<uint32_t>& v) const {
    uint64_t h = 0xcbf29ce484222325ULL ^ v.size();
    for (uint32_t x : v) {
        h ^= x;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return static_cast<size_t>(h);
}

const TypeInfo& TypeRegistry::info(TypeId id) const {
    std::lock_guard<std::mutex> lk(mu_);
    if (id >= infos_.size()) throw IndexOutOfRange("unknown type id " + std::to_string(id));
    return infos_[id];
}

TypeId TypeRegistry::find(const std::vector<uint32_t>& key) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = ids_.find(key);
    return it == ids_.end() ? kNoType : it->second;
}

size_t TypeRegistry::size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return infos_.size();
}

Neighbourhood extract_neighbourhood(const Database& db, std::span<const Element> tuple, int r) {
    Neighbourhood nb;
    nb.radius = r;
    auto ball = gaifman_ball(db, tuple, r);
    nb.fragment = induced_subdb(db, ball);
    for (Element a : tuple) {
        auto it = std::lower_bound(nb.fragment.original.begin(), nb.fragment.original.end(), a);
        nb.centres.push_back(static_cast<Element>(it - nb.fragment.original.begin()) + 1);
    }
    return nb;
}

namespace {

int number_groups(UnionFind& uf, size_t k, std::vector<int>& group) {
    group.assign(k, -1);
    std::vector<int> id(k, -1);
    int count = 0;
    for (size_t i = 0; i < k; ++i) {
        const size_t root = uf.find(i);
        if (id[root] < 0) id[root] = count++;
        group[i] = id[root];
    }
    return count;
}

// Components of N_r(t) given each centre's sorted r-ball. Positions whose
// balls overlap are merged, then so are positions joined by a tuple lying
// entirely inside the union of the balls.
template <typename BallOf>
int induced_groups(const Database& db, std::span<const Element> t, BallOf&& ball_of, std::vector<int>& group) {
    const size_t k = t.size();
    UnionFind uf(k);
    std::vector<std::pair<Element, size_t>> owner;
    for (size_t i = 0; i < k; ++i)
        for (Element e : ball_of(t[i])) owner.push_back({e, i});
    std::sort(owner.begin(), owner.end());
    for (size_t j = 1; j < owner.size(); ++j)
        if (owner[j].first == owner[j - 1].first) uf.unite(owner[j].second, owner[j - 1].second);
    auto owner_of = [&](Element e) -> long {
        auto it = std::lower_bound(owner.begin(), owner.end(), std::pair<Element, size_t>{e, 0});
        return it != owner.end() && it->first == e ? static_cast<long>(it->second) : -1;
    };
    for (size_t j = 0; j < owner.size(); ++j) {
        if (j > 0 && owner[j].first == owner[j - 1].first) continue;
        for (const TupleRef& ref : db.incidence(owner[j].first)) {
            auto tu = db.tuple(ref.rel, ref.index);
            bool inside = true;
            for (Element e : tu) inside = inside && owner_of(e) >= 0;
            if (!inside) continue;
            for (Element e : tu) uf.unite(owner[j].second, static_cast<size_t>(owner_of(e)));
        }
    }
    return number_groups(uf, k, group);
}

}  // namespace

int centre_groups(const Database& db, std::span<const Element> t, int r, std::vector<int>& group) {
    const size_t k = t.size();
    if (db.schema().max_arity() <= 2) {
        UnionFind uf(k);
        for (size_t i = 0; i < k; ++i)
            for (size_t j = i + 1; j < k; ++j)
                if (uf.find(i) != uf.find(j) && gaifman_distance(db, t[i], t[j], 2 * r + 1) >= 0) uf.unite(i, j);
        return number_groups(uf, k, group);
    }
    return induced_groups(
        db, t,
        [&](Element a) {
            Element c[1] = {a};
            return gaifman_ball(db, c, r);
        },
        group);
}

int fragment_components(const Fragment& f, std::vector<int>& comp) {
    UnionFind uf(f.m + 1);
    for (size_t t = 0; t < f.tuple_count(); ++t) {
        auto tu = f.tuple(t);
        for (Element e : tu) uf.unite(tu[0], e);
    }
    comp.assign(f.m, -1);
    std::vector<int> id(f.m + 1, -1);
    int count = 0;
    for (uint32_t v = 1; v <= f.m; ++v) {
        size_t root = uf.find(v);
        if (id[root] < 0) id[root] = count++;
        comp[v - 1] = id[root];
    }
    return count;
}

std::vector<uint32_t> refined_colours(const Fragment& f, std::span<const Element> centres) {
    Incidence g(f);
    auto col = initial_colours(f.m, centres);
    refine(f, g, col);
    return col;
}

TypeId canonicalize_connected(const Fragment& f, std::span<const Element> centres, int radius,
                              TypeRegistry& reg) {
    Incidence g(f);
    CanonSearch s{f, g, centres, {}, {}, {}, {}, {}, {}, 0};
    s.run(initial_colours(f.m, centres));
    std::vector<uint32_t> key{0};
    push_schema(key, *f.schema);
    key.push_back(f.m);
    key.push_back(static_cast<uint32_t>(centres.size()));
    for (Element c : centres) key.push_back(s.best_lab.empty() ? 0 : s.best_lab[c]);
    key.insert(key.end(), s.best_key.begin(), s.best_key.end());
    return reg.intern(std::move(key), [&] {
        TypeInfo info;
        info.k = static_cast<int>(centres.size());
        info.cardinality = f.m;
        info.component_count = 1;
        std::vector<int> all(centres.size());
        std::iota(all.begin(), all.end(), 0);
        info.components.push_back(TypeComponent{all, kNoType});
        info.representative.fragment = relabel_fragment(f, s.best_lab);
        for (Element c : centres) info.representative.centres.push_back(s.best_lab[c]);
        info.representative.radius = radius;
        return info;
    });
}

TypeId canonicalize(const Neighbourhood& nb, TypeRegistry& reg) {
    const Fragment& f = nb.fragment;
    const int k = static_cast<int>(nb.centres.size());
    if (k == 0) throw Error("neighbourhood without centres");
    std::vector<int> comp;
    int ncomp = fragment_components(f, comp);
    if (ncomp == 1) return canonicalize_connected(f, nb.centres, nb.radius, reg);
    // Order components by the first centre position that falls in them.
    std::vector<int> order;
    std::vector<std::vector<int>> positions(ncomp);
    for (int p = 0; p < k; ++p) {
        int c = comp[nb.centres[p] - 1];
        if (positions[c].empty()) order.push_back(c);
        positions[c].push_back(p);
    }
    if (static_cast<int>(order.size()) != ncomp)
        throw Error("neighbourhood has a component without a centre");
    std::vector<TypeComponent> comps;
    std::vector<uint32_t> local_of;
    for (int c : order) {
        Fragment sub = sub_fragment(f, comp, c, local_of);
        std::vector<Element> cs;
        for (int p : positions[c]) cs.push_back(local_of[nb.centres[p]]);
        comps.push_back(TypeComponent{positions[c], canonicalize_connected(sub, cs, nb.radius, reg)});
    }
    return compose(k, std::move(comps), reg);
}

uint32_t representative_element(const TypeInfo& t, uint32_t position) {
    if (position < 1 || position > t.cardinality)
        throw IndexOutOfRange("position " + std::to_string(position) + " outside [1," +
                              std::to_string(t.cardinality) + "]");
    return position;
}

std::vector<uint32_t> embedding_into_representative(const Neighbourhood& nb, TypeId t,
                                                    TypeRegistry& reg) {
    if (canonicalize(nb, reg) != t) throw TypeMismatch("neighbourhood does not have the given type");
    const Neighbourhood& rep = reg.info(t).representative;
    const Fragment& F = nb.fragment;
    const Fragment& G = rep.fragment;
    const uint32_t m = F.m;
    auto colF = refined_colours(F, nb.centres);
    auto colG = refined_colours(G, rep.centres);
    std::set<std::vector<uint32_t>> gt;
    for (size_t u = 0; u < G.tuple_count(); ++u) {
        std::vector<uint32_t> x{G.rel[u]};
        for (Element e : G.tuple(u)) x.push_back(e);
        gt.insert(std::move(x));
    }
    // Tuples of F checked once their largest element is assigned.
    std::vector<std::vector<uint32_t>> closing(m + 1);
    for (size_t u = 0; u < F.tuple_count(); ++u) {
        auto tu = F.tuple(u);
        closing[*std::max_element(tu.begin(), tu.end())].push_back(static_cast<uint32_t>(u));
    }
    std::vector<uint32_t> forced(m + 1, 0);
    for (size_t i = 0; i < nb.centres.size(); ++i) forced[nb.centres[i]] = rep.centres[i];
    std::vector<uint32_t> img(m + 1, 0);
    std::vector<char> used(m + 1, 0);
    std::vector<uint32_t> x;
    auto consistent = [&](uint32_t v) {
        for (uint32_t u : closing[v]) {
            auto tu = F.tuple(u);
            x.assign(1, F.rel[u]);
            for (Element e : tu) x.push_back(img[e]);
            if (F.schema->relation(F.rel[u]).symmetric && x[1] > x[2]) std::swap(x[1], x[2]);
            if (!gt.count(x)) return false;
        }
        return true;
    };
    std::function<bool(uint32_t)> go = [&](uint32_t v) -> bool {
        if (v > m) return true;
        for (uint32_t w = 1; w <= m; ++w) {
            if (used[w] || colG[w] != colF[v]) continue;
            if (forced[v] && forced[v] != w) continue;
            img[v] = w;
            used[w] = 1;
            if (consistent(v) && go(v + 1)) return true;
            used[w] = 0;
        }
        img[v] = 0;
        return false;
    };
    if (!go(1)) throw TypeMismatch("no centre-respecting isomorphism found");
    return std::vector<uint32_t>(img.begin() + 1, img.end());
}

LocalTypeCache::LocalTypeCache(const Database& db, int r, RegistryPtr reg)
    : db_(&db), r_(r), reg_(std::move(reg)), elem_type_(db.n() + 1, kNoType),
      ball_r_(db.n() + 1), ball_r1_(db.n() + 1) {}

const std::vector<Element>& LocalTypeCache::ball(Element a, int radius) {
    auto& slot = radius == r_ ? ball_r_[a] : ball_r1_[a];
    if (radius != r_ && radius != r_ + 1) throw Error("LocalTypeCache caches radius r and r+1 only");
    if (slot.empty()) {
        Element c[1] = {a};
        slot = gaifman_ball(*db_, c, radius);
    }
    return slot;
}

TypeId LocalTypeCache::element_type(Element a) {
    TypeId& t = elem_type_[a];
    if (t == kNoType) {
        Element c[1] = {a};
        Neighbourhood nb = extract_neighbourhood(*db_, c, r_);
        t = canonicalize_connected(nb.fragment, nb.centres, r_, *reg_);
    }
    return t;
}

bool LocalTypeCache::near(Element a, Element b) {
    if (a == b) return true;
    const auto& A = ball(a, r_ + 1);
    const auto& B = ball(b, r_);
    size_t i = 0, j = 0;
    while (i < A.size() && j < B.size()) {
        if (A[i] == B[j]) return true;
        if (A[i] < B[j])
            ++i;
        else
            ++j;
    }
    return false;
}

int LocalTypeCache::group_positions(std::span<const Element> t, std::vector<int>& group) {
    const size_t k = t.size();
    if (db_->schema().max_arity() > 2)
        return induced_groups(*db_, t, [&](Element a) -> const std::vector<Element>& { return ball(a, r_); }, group);
    UnionFind uf(k);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j)
            if (uf.find(i) != uf.find(j) && near(t[i], t[j])) uf.unite(i, j);
    return number_groups(uf, k, group);
}

TypeId LocalTypeCache::tuple_type(std::span<const Element> t) {
    const int k = static_cast<int>(t.size());
    if (k == 1) return element_type(t[0]);
    if (k == 2 && !near(t[0], t[1])) {
        const TypeId a = element_type(t[0]), b = element_type(t[1]);
        const uint64_t memo = (static_cast<uint64_t>(a) << 32) | b;
        auto it = pair_memo_.find(memo);
        if (it != pair_memo_.end()) return it->second;
        TypeId id = compose(2, {TypeComponent{{0}, a}, TypeComponent{{1}, b}}, *reg_);
        pair_memo_.emplace(memo, id);
        return id;
    }
    const int ng = group_positions(t, scratch_group_);
    std::vector<TypeComponent> comps(ng);
    for (int i = 0; i < k; ++i) comps[scratch_group_[i]].positions.push_back(i);
    std::vector<Element> sub;
    for (auto& c : comps) {
        if (c.positions.size() == 1) {
            c.type = element_type(t[c.positions[0]]);
            continue;
        }
        sub.clear();
        for (int p : c.positions) sub.push_back(t[p]);
        auto it = group_memo_.find(sub);
        if (it != group_memo_.end()) {
            c.type = it->second;
            continue;
        }
        Neighbourhood nb = extract_neighbourhood(*db_, sub, r_);
        c.type = canonicalize_connected(nb.fragment, nb.centres, r_, *reg_);
        group_memo_.emplace(sub, c.type);
    }
    if (ng == 1) return comps[0].type;
    return compose(k, std::move(comps), *reg_);
}

}  // namespace aqe
