#include "aqe/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_map>

#include "aqe/errors.hpp"

namespace aqe {

TypeId tuple_type_direct(const Database& db, std::span<const Element> t, int r, TypeRegistry& reg) {
    return canonicalize(extract_neighbourhood(db, t, r), reg);
}

bool eval_sphere(const Database& db, std::span<const Element> a, const SphereAtom& s, TypeRegistry& reg) {
    return tuple_type_direct(db, a, s.radius, reg) == s.type;
}

std::map<TypeId, uint64_t> type_census(const Database& db, int r, TypeRegistry& reg) {
    std::map<TypeId, uint64_t> out;
    for (Element a = 1; a <= db.n(); ++a) {
        Element c[1] = {a};
        ++out[tuple_type_direct(db, c, r, reg)];
    }
    return out;
}

uint64_t count_type(const Database& db, TypeId t, int r, TypeRegistry& reg) {
    uint64_t cnt = 0;
    for (Element a = 1; a <= db.n(); ++a) {
        Element c[1] = {a};
        if (tuple_type_direct(db, c, r, reg) == t) ++cnt;
    }
    return cnt;
}

bool eval_hanf(const Database& db, const HanfSentence& h, TypeRegistry& reg) {
    // A threshold of 0 is vacuous; the parser never produces one.
    const bool holds = h.threshold == 0 || count_type(db, h.type, h.radius, reg) >= h.threshold;
    return holds != h.negated;
}

bool eval_query(const Database& db, std::span<const Element> a, const QueryNF& q) {
    ExactEvaluator ev(db, q);
    return ev.eval(a);
}

ExactEvaluator::ExactEvaluator(const Database& db, const QueryNF& q) : db_(&db), q_(&q) {}

uint64_t ExactEvaluator::count(TypeId t, int r) {
    auto it = census_.find(r);
    if (it == census_.end()) it = census_.emplace(r, type_census(*db_, r, *q_->registry)).first;
    auto jt = it->second.find(t);
    return jt == it->second.end() ? 0 : jt->second;
}

bool ExactEvaluator::sentence(const HanfSentence& h) {
    const bool holds = h.threshold == 0 || count(h.type, h.radius) >= h.threshold;
    return holds != h.negated;
}

bool ExactEvaluator::sentences_hold(const Clause& c) {
    for (const auto& h : c.sentences)
        if (!sentence(h)) return false;
    return true;
}

bool ExactEvaluator::eval(std::span<const Element> a) {
    if (static_cast<int>(a.size()) != q_->k) throw ArityMismatch("tuple length differs from query k");
    if (q_->clauses.empty()) return false;
    const TypeId t = tuple_type_direct(*db_, a, q_->r, *q_->registry);
    for (const auto& c : q_->clauses)
        if (c.sphere.type == t && sentences_hold(c)) return true;
    return false;
}

bool ExactEvaluator::clause_satisfiable(const Clause& c) {
    return sentences_hold(c) && exists_tuple_of_type(*db_, c.sphere.type, c.sphere.radius, *q_->registry);
}

bool AnswerSet::contains(std::span<const Element> t) const {
    std::vector<Element> v(t.begin(), t.end());
    return std::binary_search(tuples.begin(), tuples.end(), v);
}

AnswerSet answer_set(const Database& db, const QueryNF& q, uint64_t budget) {
    AnswerSet out;
    const double space = std::pow(static_cast<double>(db.n()), q.k);
    if (space > static_cast<double>(budget))
        throw BudgetExceeded("n^k = " + std::to_string(space) + " exceeds the brute-force budget");
    if (db.n() == 0 || q.clauses.empty()) return out;
    ExactEvaluator ev(db, q);
    std::vector<Element> t(q.k, 1);
    while (true) {
        if (ev.eval(t)) out.tuples.push_back(t);
        int i = q.k - 1;
        while (i >= 0 && t[i] == db.n()) t[i--] = 1;
        if (i < 0) break;
        ++t[i];
    }
    return out;  // generated in lexicographic order
}

bool local_member(const Database& db, std::span<const Element> a, const QueryNF& q) {
    if (!is_local(q)) throw NotLocal("query carries Hanf sentences");
    if (static_cast<int>(a.size()) != q.k) throw ArityMismatch("tuple length differs from query k");
    const TypeId t = tuple_type_direct(db, a, q.r, *q.registry);
    for (const auto& c : q.clauses)
        if (c.sphere.type == t) return true;
    return false;
}

namespace {

// Leader-based realisations of one connected component type: all tuples
// (over the component's positions) whose r-type is `t`.
void realisations(const Database& db, TypeId t, int r, TypeRegistry& reg,
                  const std::function<bool(const std::vector<Element>&)>& visit) {
    const TypeInfo& info = reg.info(t);
    const int k = info.k;
    // r-type of the leader inside the representative equals its r-type in D.
    const Neighbourhood& rep = info.representative;
    Element lead_rep = rep.centres[0];
    Neighbourhood lead_nb;
    {
        Database repdb(rep.fragment.schema, rep.fragment.m, std::max(2, db.d()));
        for (size_t u = 0; u < rep.fragment.tuple_count(); ++u)
            repdb.add_tuple(rep.fragment.rel[u], rep.fragment.tuple(u));
        repdb.finalize();
        Element c[1] = {lead_rep};
        lead_nb = extract_neighbourhood(repdb, c, r);
    }
    const TypeId lead_type = canonicalize(lead_nb, reg);
    const int reach = (2 * r + 1) * (k - 1);
    std::vector<Element> tup(k);
    for (Element a = 1; a <= db.n(); ++a) {
        Element c[1] = {a};
        if (tuple_type_direct(db, c, r, reg) != lead_type) continue;
        auto ball = gaifman_ball(db, c, reach);
        tup[0] = a;
        std::function<bool(int)> fill = [&](int p) -> bool {
            if (p == k) {
                if (tuple_type_direct(db, tup, r, reg) == t) return visit(tup);
                return true;
            }
            for (Element x : ball) {
                tup[p] = x;
                if (!fill(p + 1)) return false;
            }
            return true;
        };
        if (!fill(1)) return;
    }
}

}  // namespace

bool exists_tuple_of_type(const Database& db, TypeId t, int r, TypeRegistry& reg) {
    const TypeInfo& info = reg.info(t);
    if (info.component_count == 1) {
        bool found = false;
        realisations(db, t, r, reg, [&](const std::vector<Element>&) {
            found = true;
            return false;
        });
        return found;
    }
    // Pick one realisation per component with pairwise separated groups.
    std::vector<std::vector<std::vector<Element>>> lists;
    for (const auto& c : info.components) {
        std::vector<std::vector<Element>> l;
        realisations(db, c.type, r, reg, [&](const std::vector<Element>& g) {
            l.push_back(g);
            return true;
        });
        if (l.empty()) return false;
        lists.push_back(std::move(l));
    }
    // Disjoint balls are necessary for separate components; the full type
    // check on the assembled tuple settles the rest.
    std::vector<const std::vector<Element>*> chosen;
    auto disjoint = [&](const std::vector<Element>& g) {
        for (const auto* h : chosen)
            for (Element x : g)
                for (Element y : *h)
                    if (gaifman_distance(db, x, y, 2 * r) >= 0) return false;
        return true;
    };
    std::vector<Element> tup(info.k);
    std::function<bool(size_t)> pick = [&](size_t j) -> bool {
        if (j == lists.size()) {
            for (size_t c = 0; c < chosen.size(); ++c)
                for (size_t p = 0; p < chosen[c]->size(); ++p) tup[info.components[c].positions[p]] = (*chosen[c])[p];
            return tuple_type_direct(db, tup, r, reg) == t;
        }
        for (const auto& g : lists[j]) {
            if (!disjoint(g)) continue;
            chosen.push_back(&g);
            if (pick(j + 1)) return true;
            chosen.pop_back();
        }
        return false;
    };
    return pick(0);
}

namespace {

// Mutable database used by the closeness search.
class EditableDb {
public:
    explicit EditableDb(const Database& db) : schema_(db.schema_ptr()), n_(db.n()), inc_(db.n() + 1) {
        rels_.resize(schema_->size());
        for (int r = 0; r < schema_->size(); ++r)
            for (size_t t = 0; t < db.tuple_count(r); ++t) {
                auto tu = db.tuple(r, t);
                insert(r, std::vector<Element>(tu.begin(), tu.end()));
            }
    }

    bool contains(int r, const std::vector<Element>& t) const { return rels_[r].count(t) > 0; }

    void insert(int r, const std::vector<Element>& t) {
        auto [it, fresh] = rels_[r].insert(t);
        if (!fresh) return;
        for (Element e : distinct(*it)) inc_[e].push_back({r, &*it});
    }

    void erase(int r, const std::vector<Element>& t) {
        auto it = rels_[r].find(t);
        if (it == rels_[r].end()) return;
        for (Element e : distinct(*it)) {
            auto& v = inc_[e];
            v.erase(std::find_if(v.begin(), v.end(), [&](const auto& p) { return p.second == &*it; }));
        }
        rels_[r].erase(it);
    }

    int degree(Element e) const { return static_cast<int>(inc_[e].size()); }

    std::vector<Element> ball(std::span<const Element> centres, int r) const {
        std::vector<Element> out(centres.begin(), centres.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        std::vector<Element> frontier = out, next;
        for (int s = 0; s < r && !frontier.empty(); ++s) {
            next.clear();
            for (Element a : frontier)
                for (const auto& [rel, tp] : inc_[a])
                    for (Element b : *tp)
                        if (!std::binary_search(out.begin(), out.end(), b) &&
                            std::find(next.begin(), next.end(), b) == next.end())
                            next.push_back(b);
            out.insert(out.end(), next.begin(), next.end());
            std::sort(out.begin(), out.end());
            frontier = next;
        }
        return out;
    }

    // Type of `centres` with a memo keyed on the global content of the ball.
    TypeId type_of(std::span<const Element> centres, int r, TypeRegistry& reg) {
        auto ball_el = ball(centres, r);
        std::vector<uint32_t> key{static_cast<uint32_t>(r), static_cast<uint32_t>(centres.size())};
        key.insert(key.end(), centres.begin(), centres.end());
        key.push_back(static_cast<uint32_t>(ball_el.size()));
        key.insert(key.end(), ball_el.begin(), ball_el.end());
        std::vector<std::pair<int, const std::vector<Element>*>> ts;
        for (Element x : ball_el)
            for (const auto& p : inc_[x]) {
                const auto& tu = *p.second;
                if (*std::min_element(tu.begin(), tu.end()) != x) continue;
                bool inside = std::all_of(tu.begin(), tu.end(), [&](Element e) {
                    return std::binary_search(ball_el.begin(), ball_el.end(), e);
                });
                if (inside) ts.push_back(p);
            }
        std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first < b.first : *a.second < *b.second;
        });
        for (const auto& [rel, tp] : ts) {
            key.push_back(static_cast<uint32_t>(rel));
            key.insert(key.end(), tp->begin(), tp->end());
        }
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Neighbourhood nb;
        nb.radius = r;
        nb.fragment.schema = schema_;
        nb.fragment.original = ball_el;
        nb.fragment.m = static_cast<uint32_t>(ball_el.size());
        nb.fragment.offset.push_back(0);
        auto local = [&](Element g) {
            return static_cast<Element>(std::lower_bound(ball_el.begin(), ball_el.end(), g) - ball_el.begin()) + 1;
        };
        std::vector<Element> buf;
        for (const auto& [rel, tp] : ts) {
            buf.clear();
            for (Element e : *tp) buf.push_back(local(e));
            nb.fragment.add_tuple(rel, buf);
        }
        for (Element c : centres) nb.centres.push_back(local(c));
        TypeId id = canonicalize(nb, reg);
        memo_.emplace(std::move(key), id);
        return id;
    }

private:
    static std::vector<Element> distinct(const std::vector<Element>& t) {
        std::vector<Element> d(t);
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        return d;
    }

    SchemaPtr schema_;
    uint32_t n_;
    std::vector<std::set<std::vector<Element>>> rels_;
    std::vector<std::vector<std::pair<int, const std::vector<Element>*>>> inc_;
    std::unordered_map<std::vector<uint32_t>, TypeId, VecHash> memo_;
};

double choose(uint64_t n, int k) {
    double c = 1;
    for (int i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / (i + 1);
    return c;
}

}  // namespace

bool closeness_check(const Database& db, std::span<const Element> a, const QueryNF& q, double eps,
                     int edit_budget_cap, uint64_t node_cap, ClosenessStats* stats) {
    TypeRegistry& reg = *q.registry;
    const int budget = static_cast<int>(std::floor(eps * db.d() * static_cast<double>(db.n()) + 1e-9));
    if (stats) *stats = ClosenessStats{0, budget, false};
    ExactEvaluator ev(db, q);
    if (ev.eval(a)) {
        if (stats) stats->short_circuit = true;
        return true;
    }
    const TypeId tau = tuple_type_direct(db, a, q.r, reg);
    std::vector<const Clause*> relevant;
    for (const auto& c : q.clauses)
        if (c.sphere.type == tau) relevant.push_back(&c);
    if (relevant.empty() || budget == 0) {
        if (stats) stats->short_circuit = true;
        return false;
    }
    if (budget > edit_budget_cap)
        throw BudgetExceeded("edit budget " + std::to_string(budget) + " exceeds cap " +
                             std::to_string(edit_budget_cap));

    // Candidate tuples: every tuple the schema allows over [n].
    std::vector<std::pair<int, std::vector<Element>>> cand;
    const Schema& S = db.schema();
    for (int r = 0; r < S.size(); ++r) {
        const int ar = S.relation(r).arity;
        if (S.relation(r).symmetric) {
            for (Element u = 1; u <= db.n(); ++u)
                for (Element v = u + 1; v <= db.n(); ++v) cand.push_back({r, {u, v}});
            continue;
        }
        if (std::pow(static_cast<double>(db.n()), ar) > 1e6)
            throw BudgetExceeded("candidate tuple space too large for exhaustive closeness search");
        std::vector<Element> t(ar, 1);
        while (true) {
            cand.push_back({r, t});
            int i = ar - 1;
            while (i >= 0 && t[i] == db.n()) t[i--] = 1;
            if (i < 0) break;
            ++t[i];
        }
    }
    double total = 0;
    for (int b = 1; b <= budget; ++b) total += choose(cand.size(), b);
    if (total > static_cast<double>(node_cap))
        throw BudgetExceeded("closeness search space (" + std::to_string(total) + " edit sets) exceeds cap");

    EditableDb ed(db);
    // Radii that matter for the sentences of relevant clauses.
    std::vector<int> radii;
    for (const Clause* c : relevant)
        for (const auto& h : c->sentences) radii.push_back(h.radius);
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    // cur[ri][x] = r-type of x; counts[ri][type] = how many.
    std::vector<std::vector<TypeId>> cur(radii.size(), std::vector<TypeId>(db.n() + 1));
    std::vector<std::unordered_map<TypeId, int64_t>> counts(radii.size());
    for (size_t ri = 0; ri < radii.size(); ++ri)
        for (Element x = 1; x <= db.n(); ++x) {
            Element c[1] = {x};
            cur[ri][x] = ed.type_of(c, radii[ri], reg);
            ++counts[ri][cur[ri][x]];
        }
    int violations = 0;
    for (Element x = 1; x <= db.n(); ++x)
        if (ed.degree(x) > db.d()) ++violations;

    struct Change {
        size_t ri;
        Element x;
        TypeId old;
    };
    auto toggle = [&](size_t idx, std::vector<Change>& log) {
        const auto& [rel, t] = cand[idx];
        std::vector<Element> ends(t.begin(), t.end());
        std::vector<std::vector<Element>> before(radii.size());
        for (size_t ri = 0; ri < radii.size(); ++ri) before[ri] = ed.ball(ends, radii[ri]);
        std::vector<Element> touched(ends);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (Element e : touched)
            if (ed.degree(e) > db.d()) --violations;
        if (ed.contains(rel, t))
            ed.erase(rel, t);
        else
            ed.insert(rel, t);
        for (Element e : touched)
            if (ed.degree(e) > db.d()) ++violations;
        for (size_t ri = 0; ri < radii.size(); ++ri) {
            auto after = ed.ball(ends, radii[ri]);
            std::vector<Element> aff;
            std::set_union(before[ri].begin(), before[ri].end(), after.begin(), after.end(),
                           std::back_inserter(aff));
            for (Element x : aff) {
                Element c[1] = {x};
                TypeId nt = ed.type_of(c, radii[ri], reg);
                if (nt == cur[ri][x]) continue;
                log.push_back({ri, x, cur[ri][x]});
                --counts[ri][cur[ri][x]];
                ++counts[ri][nt];
                cur[ri][x] = nt;
            }
        }
    };
    auto undo = [&](size_t idx, std::vector<Change>& log) {
        const auto& [rel, t] = cand[idx];
        std::vector<Element> touched(t.begin(), t.end());
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (Element e : touched)
            if (ed.degree(e) > db.d()) --violations;
        if (ed.contains(rel, t))
            ed.erase(rel, t);
        else
            ed.insert(rel, t);
        for (Element e : touched)
            if (ed.degree(e) > db.d()) ++violations;
        for (auto it = log.rbegin(); it != log.rend(); ++it) {
            --counts[it->ri][cur[it->ri][it->x]];
            ++counts[it->ri][it->old];
            cur[it->ri][it->x] = it->old;
        }
        log.clear();
    };
    auto radius_index = [&](int r) {
        return static_cast<size_t>(std::lower_bound(radii.begin(), radii.end(), r) - radii.begin());
    };
    auto satisfied = [&]() {
        if (violations > 0) return false;
        bool some = false;
        for (const Clause* c : relevant) {
            bool ok = true;
            for (const auto& h : c->sentences) {
                auto& m = counts[radius_index(h.radius)];
                auto it = m.find(h.type);
                const int64_t cnt = it == m.end() ? 0 : it->second;
                const bool holds = h.threshold == 0 || cnt >= static_cast<int64_t>(h.threshold);
                if (holds == h.negated) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                some = true;
                break;
            }
        }
        if (!some) return false;
        return ed.type_of(a, q.r, reg) == tau;
    };
    uint64_t nodes = 0;
    // Iterative deepening: edit sets of size exactly `limit` are checked at
    // the leaves, so small witnesses are found before deep subtrees.
    std::function<bool(size_t, int, int)> dfs = [&](size_t start, int depth, int limit) -> bool {
        for (size_t idx = start; idx < cand.size(); ++idx) {
            ++nodes;
            std::vector<Change> log;
            toggle(idx, log);
            bool ok = depth + 1 == limit ? satisfied() : dfs(idx + 1, depth + 1, limit);
            undo(idx, log);
            if (ok) return true;
        }
        return false;
    };
    bool found = false;
    for (int limit = 1; limit <= budget && !found; ++limit) found = dfs(0, 0, limit);
    if (stats) stats->nodes = nodes;
    return found;
}

}  // namespace aqe
