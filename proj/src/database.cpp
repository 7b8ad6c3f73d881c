#include "aqe/database.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "aqe/errors.hpp"

namespace aqe {

namespace {

thread_local uint64_t t_oracle_calls = 0;

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

long parse_long(const std::string& tok, int line) {
    try {
        size_t used = 0;
        long v = std::stol(tok, &used);
        if (used != tok.size()) throw ParseError("bad integer '" + tok + "'", line);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad integer '" + tok + "'", line);
    }
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++lineno;
        std::string_view line = text.substr(pos, end - pos);
        auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        auto toks = split_ws(line);
        if (!toks.empty()) f(toks, lineno);
        if (end == text.size()) break;
        pos = end + 1;
    }
}

}  // namespace

Schema::Schema(std::vector<Relation> rels) : rels_(std::move(rels)) {
    for (int i = 0; i < static_cast<int>(rels_.size()); ++i) {
        const auto& r = rels_[i];
        if (r.arity < 1) throw ParseError("relation " + r.name + " has arity < 1");
        if (r.symmetric && r.arity != 2)
            throw ParseError("relation " + r.name + ": symmetric requires arity 2");
        if (!by_name_.emplace(r.name, i).second) throw ParseError("duplicate relation " + r.name);
        max_arity_ = std::max(max_arity_, r.arity);
        norm_ += r.arity;
    }
    if (rels_.size() > 0xFFFF) throw ParseError("too many relations");
}

Schema Schema::parse(std::string_view text) {
    std::vector<Relation> rels;
    for_each_line(text, [&](const std::vector<std::string>& t, int line) {
        if (t[0] != "relation" || t.size() < 3 || t.size() > 4)
            throw ParseError("expected 'relation <name> <arity> [symmetric]'", line);
        Relation r;
        r.name = t[1];
        r.arity = static_cast<int>(parse_long(t[2], line));
        if (t.size() == 4) {
            if (t[3] != "symmetric") throw ParseError("unknown flag '" + t[3] + "'", line);
            r.symmetric = true;
        }
        if (r.arity < 1) throw ParseError("arity must be positive", line);
        rels.push_back(std::move(r));
    });
    return Schema(std::move(rels));
}

Schema Schema::graph() { return Schema({Relation{"E", 2, true}}); }

int Schema::index_of(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? -1 : it->second;
}

std::string Schema::to_text() const {
    std::string out;
    for (const auto& r : rels_) {
        out += "relation " + r.name + " " + std::to_string(r.arity);
        if (r.symmetric) out += " symmetric";
        out += "\n";
    }
    return out;
}

bool Schema::operator==(const Schema& o) const {
    if (rels_.size() != o.rels_.size()) return false;
    for (size_t i = 0; i < rels_.size(); ++i) {
        if (rels_[i].name != o.rels_[i].name || rels_[i].arity != o.rels_[i].arity ||
            rels_[i].symmetric != o.rels_[i].symmetric)
            return false;
    }
    return true;
}

void Fragment::add_tuple(int r, std::span<const Element> local) {
    if (offset.empty()) offset.push_back(0);
    rel.push_back(static_cast<uint16_t>(r));
    elems.insert(elems.end(), local.begin(), local.end());
    offset.push_back(static_cast<uint32_t>(elems.size()));
}

Database::Database(SchemaPtr schema, uint32_t n, int d)
    : schema_(std::move(schema)), n_(n), d_(d), tuples_(schema_->size()) {
    if (d < 2) throw Error("degree bound d must be at least 2");
}

void Database::add_tuple(int rel, std::span<const Element> tuple) {
    if (finalized_) throw Error("database is immutable after finalize()");
    if (rel < 0 || rel >= schema_->size()) throw ParseError("unknown relation index");
    const Relation& R = schema_->relation(rel);
    if (static_cast<int>(tuple.size()) != R.arity)
        throw ArityMismatch("relation " + R.name + " expects " + std::to_string(R.arity) +
                            " elements, got " + std::to_string(tuple.size()));
    for (Element e : tuple)
        if (e < 1 || e > n_)
            throw ElementOutOfRange("element " + std::to_string(e) + " outside [1," +
                                    std::to_string(n_) + "]");
    auto& dst = tuples_[rel];
    if (R.symmetric) {
        if (tuple[0] == tuple[1])
            throw ParseError("self-loop on " + std::to_string(tuple[0]) + " in symmetric relation " +
                             R.name);
        dst.push_back(std::min(tuple[0], tuple[1]));
        dst.push_back(std::max(tuple[0], tuple[1]));
    } else {
        dst.insert(dst.end(), tuple.begin(), tuple.end());
    }
}

void Database::finalize() {
    if (finalized_) return;
    std::vector<uint32_t> deg(n_ + 2, 0);
    for (int r = 0; r < schema_->size(); ++r) {
        const int ar = schema_->relation(r).arity;
        auto& flat = tuples_[r];
        const size_t cnt = flat.size() / ar;
        std::vector<uint32_t> order(cnt);
        std::iota(order.begin(), order.end(), 0);
        auto less = [&](uint32_t a, uint32_t b) {
            return std::lexicographical_compare(flat.begin() + a * ar, flat.begin() + (a + 1) * ar,
                                                flat.begin() + b * ar, flat.begin() + (b + 1) * ar);
        };
        std::sort(order.begin(), order.end(), less);
        std::vector<Element> sorted;
        sorted.reserve(flat.size());
        for (size_t i = 0; i < cnt; ++i) {
            if (i > 0 && !less(order[i - 1], order[i])) continue;  // duplicate
            sorted.insert(sorted.end(), flat.begin() + order[i] * ar,
                          flat.begin() + (order[i] + 1) * ar);
        }
        flat = std::move(sorted);
    }
    // Incidence lists in (relation, tuple index) order; a tuple mentioning an
    // element twice is listed once.
    auto visit = [&](auto&& fn) {
        for (int r = 0; r < schema_->size(); ++r) {
            const int ar = schema_->relation(r).arity;
            const size_t cnt = tuples_[r].size() / ar;
            for (size_t t = 0; t < cnt; ++t) {
                const Element* p = tuples_[r].data() + t * ar;
                for (int i = 0; i < ar; ++i) {
                    bool first = true;
                    for (int j = 0; j < i; ++j)
                        if (p[j] == p[i]) first = false;
                    if (first) fn(p[i], TupleRef{static_cast<uint16_t>(r), static_cast<uint32_t>(t)});
                }
            }
        }
    };
    visit([&](Element e, TupleRef) { ++deg[e]; });
    for (Element a = 1; a <= n_; ++a)
        if (static_cast<int>(deg[a]) > d_) throw DegreeExceeded(a, deg[a], d_);
    inc_off_.assign(n_ + 2, 0);
    for (Element a = 1; a <= n_; ++a) inc_off_[a + 1] = inc_off_[a] + deg[a];
    inc_.resize(inc_off_[n_ + 1]);
    std::vector<uint32_t> fill(inc_off_.begin(), inc_off_.end());
    visit([&](Element e, TupleRef ref) { inc_[fill[e]++] = ref; });
    finalized_ = true;
}

size_t Database::total_tuples() const {
    size_t s = 0;
    for (int r = 0; r < schema_->size(); ++r) s += tuple_count(r);
    return s;
}

int Database::max_degree() const {
    int m = 0;
    for (Element a = 1; a <= n_; ++a) m = std::max(m, degree(a));
    return m;
}

int Database::gaifman_degree_bound() const {
    if (schema_->is_single_symmetric_binary()) return d_;
    return d_ * std::max(1, schema_->max_arity() - 1);
}

std::optional<std::span<const Element>> Database::oracle_query(int rel, Element i, int j) const {
    ++t_oracle_calls;
    if (i < 1 || i > n_) throw IndexOutOfRange("element index " + std::to_string(i) + " outside [1,n]");
    if (j < 1 || j > d_) throw IndexOutOfRange("tuple rank " + std::to_string(j) + " outside [1,d]");
    if (rel < 0 || rel >= schema_->size()) throw IndexOutOfRange("unknown relation");
    // Incidence is sorted by relation, then by tuple rank inside the relation.
    auto inc = incidence(i);
    auto lo = std::lower_bound(inc.begin(), inc.end(), rel,
                               [](const TupleRef& t, int r) { return t.rel < r; });
    auto pos = lo + (j - 1);
    if (pos >= inc.end() || pos->rel != rel) return std::nullopt;
    return tuple(rel, pos->index);
}

bool Database::contains(int rel, std::span<const Element> t) const {
    const int ar = schema_->relation(rel).arity;
    if (static_cast<int>(t.size()) != ar) return false;
    for (Element e : t)
        if (e < 1 || e > n_) return false;
    for (const TupleRef& ref : incidence(t[0])) {
        if (ref.rel != rel) continue;
        auto u = tuple(rel, ref.index);
        if (std::equal(u.begin(), u.end(), t.begin())) return true;
    }
    return false;
}

std::string Database::to_text() const {
    std::ostringstream out;
    out << "domain " << n_ << "\n";
    for (int r = 0; r < schema_->size(); ++r) {
        for (size_t t = 0; t < tuple_count(r); ++t) {
            out << schema_->relation(r).name;
            for (Element e : tuple(r, t)) out << ' ' << e;
            out << '\n';
        }
    }
    return out.str();
}

Database load_database(std::string_view schema_text, std::string_view db_text, int d) {
    return load_database(std::make_shared<const Schema>(Schema::parse(schema_text)), db_text, d);
}

Database load_database(SchemaPtr schema, std::string_view db_text, int d) {
    std::optional<Database> db;
    std::vector<Element> buf;
    for_each_line(db_text, [&](const std::vector<std::string>& t, int line) {
        if (!db) {
            if (t[0] != "domain" || t.size() != 2) throw ParseError("expected 'domain <n>'", line);
            long n = parse_long(t[1], line);
            if (n < 0 || n > 0xFFFFFFF0L) throw ParseError("domain size out of range", line);
            db.emplace(schema, static_cast<uint32_t>(n), d);
            return;
        }
        int rel = schema->index_of(t[0]);
        if (rel < 0) throw ParseError("unknown relation '" + t[0] + "'", line);
        const int ar = schema->relation(rel).arity;
        if (static_cast<int>(t.size()) - 1 != ar)
            throw ArityMismatch("line " + std::to_string(line) + ": relation " + t[0] + " expects " +
                                std::to_string(ar) + " elements");
        buf.clear();
        for (size_t i = 1; i < t.size(); ++i) {
            long v = parse_long(t[i], line);
            if (v < 1 || v > static_cast<long>(db->n()))
                throw ElementOutOfRange("line " + std::to_string(line) + ": element " + t[i] +
                                        " outside [1," + std::to_string(db->n()) + "]");
            buf.push_back(static_cast<Element>(v));
        }
        try {
            db->add_tuple(rel, buf);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line);
        }
    });
    if (!db) throw ParseError("missing 'domain <n>' header");
    db->finalize();
    return std::move(*db);
}

uint64_t oracle_calls() { return t_oracle_calls; }
void reset_oracle_calls() { t_oracle_calls = 0; }

std::vector<Element> gaifman_ball(const Database& db, std::span<const Element> centres, int r) {
    std::vector<Element> ball;
    std::unordered_set<Element> seen;
    std::vector<Element> frontier;
    for (Element c : centres) {
        if (c < 1 || c > db.n()) throw ElementOutOfRange("centre " + std::to_string(c) + " outside [1,n]");
        if (seen.insert(c).second) {
            ball.push_back(c);
            frontier.push_back(c);
        }
    }
    std::vector<Element> next;
    const int nrel = db.schema().size();
    for (int step = 0; step < r && !frontier.empty(); ++step) {
        next.clear();
        for (Element a : frontier) {
            for (int rel = 0; rel < nrel; ++rel) {
                for (int j = 1; j <= db.d(); ++j) {
                    auto t = db.oracle_query(rel, a, j);
                    if (!t) break;
                    for (Element b : *t)
                        if (seen.insert(b).second) {
                            ball.push_back(b);
                            next.push_back(b);
                        }
                }
            }
        }
        frontier.swap(next);
    }
    std::sort(ball.begin(), ball.end());
    return ball;
}

int gaifman_distance(const Database& db, Element a, Element b, int limit) {
    if (a == b) return 0;
    std::unordered_set<Element> seen{a};
    std::vector<Element> frontier{a}, next;
    for (int dist = 1; dist <= limit && !frontier.empty(); ++dist) {
        next.clear();
        for (Element x : frontier) {
            for (const TupleRef& ref : db.incidence(x)) {
                for (Element y : db.tuple(ref.rel, ref.index)) {
                    if (y == b) return dist;
                    if (seen.insert(y).second) next.push_back(y);
                }
            }
        }
        frontier.swap(next);
    }
    return -1;
}

Fragment induced_subdb(const Database& db, std::span<const Element> elements) {
    Fragment f;
    f.schema = db.schema_ptr();
    f.original.assign(elements.begin(), elements.end());
    std::sort(f.original.begin(), f.original.end());
    f.original.erase(std::unique(f.original.begin(), f.original.end()), f.original.end());
    f.m = static_cast<uint32_t>(f.original.size());
    f.offset.push_back(0);
    auto local_of = [&](Element g) -> Element {
        auto it = std::lower_bound(f.original.begin(), f.original.end(), g);
        if (it == f.original.end() || *it != g) return 0;
        return static_cast<Element>(it - f.original.begin()) + 1;
    };
    // Collect each tuple once: when visiting its smallest element.
    std::vector<std::pair<TupleRef, std::vector<Element>>> found;
    std::vector<Element> loc;
    for (Element g : f.original) {
        for (const TupleRef& ref : db.incidence(g)) {
            auto t = db.tuple(ref.rel, ref.index);
            if (*std::min_element(t.begin(), t.end()) != g) continue;
            loc.clear();
            bool inside = true;
            for (Element e : t) {
                Element l = local_of(e);
                if (l == 0) {
                    inside = false;
                    break;
                }
                loc.push_back(l);
            }
            if (inside) found.emplace_back(ref, loc);
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        return a.first.rel != b.first.rel ? a.first.rel < b.first.rel : a.first.index < b.first.index;
    });
    for (const auto& [ref, l] : found) f.add_tuple(ref.rel, l);
    return f;
}

}  // namespace aqe
