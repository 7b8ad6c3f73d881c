#include "aqe/query.hpp"

#include <algorithm>
#include <sstream>

#include "aqe/errors.hpp"

namespace aqe {

namespace {

struct Line {
    int no;
    std::vector<std::string> tok;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> out;
    std::istringstream in{std::string(text)};
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
        ++no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        std::istringstream ls(raw);
        Line l{no, {}};
        std::string t;
        while (ls >> t) l.tok.push_back(t);
        if (!l.tok.empty()) out.push_back(std::move(l));
    }
    return out;
}

long to_long(const std::string& s, int line) {
    try {
        size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) throw ParseError("bad integer '" + s + "'", line);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad integer '" + s + "'", line);
    }
}

bool is_keyword(const std::string& t) {
    return t == "QUERY" || t == "CLAUSE" || t == "SPHERE" || t == "HANF" || t == "END";
}

// Reads DOMAIN / CENTRES / tuple lines starting at lines[i]; advances i.
Neighbourhood read_block(const std::vector<Line>& lines, size_t& i, const SchemaPtr& schema, int r,
                         int d) {
    if (i >= lines.size() || lines[i].tok[0] != "DOMAIN" || lines[i].tok.size() != 2)
        throw ParseError("expected 'DOMAIN <m>'", i < lines.size() ? lines[i].no : 0);
    const int dom_line = lines[i].no;
    const long m = to_long(lines[i].tok[1], dom_line);
    if (m < 1) throw ParseError("neighbourhood domain must be non-empty", dom_line);
    ++i;
    if (i >= lines.size() || lines[i].tok[0] != "CENTRES" || lines[i].tok.size() < 2)
        throw ParseError("expected 'CENTRES <c1> ...'", i < lines.size() ? lines[i].no : dom_line);
    std::vector<Element> centres;
    for (size_t j = 1; j < lines[i].tok.size(); ++j) {
        long c = to_long(lines[i].tok[j], lines[i].no);
        if (c < 1 || c > m) throw ElementOutOfRange("centre " + lines[i].tok[j] + " outside [1,m]");
        centres.push_back(static_cast<Element>(c));
    }
    ++i;
    Database block(schema, static_cast<uint32_t>(m), d);
    std::vector<Element> buf;
    for (; i < lines.size() && !is_keyword(lines[i].tok[0]); ++i) {
        const auto& t = lines[i].tok;
        int rel = schema->index_of(t[0]);
        if (rel < 0) throw ParseError("unknown relation '" + t[0] + "'", lines[i].no);
        buf.clear();
        for (size_t j = 1; j < t.size(); ++j) {
            long e = to_long(t[j], lines[i].no);
            if (e < 1 || e > m) throw ElementOutOfRange("element " + t[j] + " outside [1,m]");
            buf.push_back(static_cast<Element>(e));
        }
        try {
            block.add_tuple(rel, buf);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lines[i].no);
        }
    }
    block.finalize();
    auto ball = gaifman_ball(block, centres, r);
    if (ball.size() != static_cast<size_t>(m))
        throw RadiusMismatch("neighbourhood at line " + std::to_string(dom_line) +
                             " has elements farther than " + std::to_string(r) + " from its centres");
    return extract_neighbourhood(block, centres, r);
}

void merge_duplicates(std::vector<Clause>& clauses) {
    std::vector<Clause> out;
    for (auto& c : clauses) {
        std::sort(c.sentences.begin(), c.sentences.end());
        c.sentences.erase(std::unique(c.sentences.begin(), c.sentences.end()), c.sentences.end());
        bool absorbed = false;
        for (auto& o : out) {
            if (o.sphere.type != c.sphere.type) continue;
            if (o.sentences == c.sentences || o.sentences.empty()) {
                absorbed = true;
                break;
            }
            if (c.sentences.empty()) {
                // sph OR (sph AND psi) is just sph.
                o.sentences.clear();
                absorbed = true;
                break;
            }
        }
        if (!absorbed) out.push_back(std::move(c));
    }
    clauses = std::move(out);
}

}  // namespace

Neighbourhood parse_neighbourhood(std::string_view text, SchemaPtr schema, int r, int d) {
    auto lines = tokenize(text);
    size_t i = 0;
    Neighbourhood nb = read_block(lines, i, schema, r, d);
    if (i != lines.size()) throw ParseError("trailing input after neighbourhood", lines[i].no);
    return nb;
}

std::string print_neighbourhood(const Neighbourhood& nb) {
    std::ostringstream out;
    out << "DOMAIN " << nb.fragment.m << "\nCENTRES";
    for (Element c : nb.centres) out << ' ' << c;
    out << '\n';
    for (size_t t = 0; t < nb.fragment.tuple_count(); ++t) {
        out << nb.fragment.schema->relation(nb.fragment.rel[t]).name;
        for (Element e : nb.fragment.tuple(t)) out << ' ' << e;
        out << '\n';
    }
    return out.str();
}

QueryNF parse_query(std::string_view text, SchemaPtr schema, RegistryPtr registry) {
    auto lines = tokenize(text);
    QueryNF q;
    q.schema = schema;
    q.registry = registry;
    size_t i = 0;
    if (lines.empty() || lines[0].tok[0] != "QUERY") throw ParseError("expected 'QUERY k=.. r=.. d=..'", 1);
    bool hk = false, hr = false, hd = false;
    for (size_t j = 1; j < lines[0].tok.size(); ++j) {
        const auto& t = lines[0].tok[j];
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("bad header field '" + t + "'", lines[0].no);
        std::string name = t.substr(0, eq);
        long v = to_long(t.substr(eq + 1), lines[0].no);
        if (name == "k") q.k = static_cast<int>(v), hk = true;
        else if (name == "r") q.r = static_cast<int>(v), hr = true;
        else if (name == "d") q.d = static_cast<int>(v), hd = true;
        else throw ParseError("unknown header field '" + name + "'", lines[0].no);
    }
    if (!hk || !hr || !hd) throw ParseError("header needs k=, r= and d=", lines[0].no);
    if (q.k < 1) throw ParseError("k must be at least 1", lines[0].no);
    if (q.r < 0) throw ParseError("r must be non-negative", lines[0].no);
    if (q.d < 2) throw ParseError("d must be at least 2", lines[0].no);
    i = 1;
    bool ended = false;
    while (i < lines.size()) {
        const auto& L = lines[i];
        if (L.tok[0] == "END") {
            ended = true;
            ++i;
            break;
        }
        if (L.tok[0] != "CLAUSE") throw ParseError("expected CLAUSE or END", L.no);
        ++i;
        if (i >= lines.size() || lines[i].tok[0] != "SPHERE")
            throw ParseError("CLAUSE must start with SPHERE", L.no);
        if (lines[i].tok.size() != 1) throw ParseError("SPHERE takes no arguments", lines[i].no);
        ++i;
        Neighbourhood sph = read_block(lines, i, schema, q.r, q.d);
        if (static_cast<int>(sph.centres.size()) != q.k)
            throw CentreCountMismatch("sphere has " + std::to_string(sph.centres.size()) +
                                      " centres, query has k=" + std::to_string(q.k));
        Clause c;
        c.sphere = SphereAtom{canonicalize(sph, *registry), q.r};
        while (i < lines.size() && lines[i].tok[0] == "HANF") {
            const auto& H = lines[i];
            if (H.tok.size() < 4 || H.tok.size() > 5) throw ParseError("expected 'HANF <+|-> >= <m> [r=<r>]'", H.no);
            bool neg;
            if (H.tok[1] == "+") neg = false;
            else if (H.tok[1] == "-") neg = true;
            else throw ParseError("HANF sign must be + or -", H.no);
            const std::string& op = H.tok[2];
            if (op != ">=" && op != "=") throw ParseError("HANF comparison must be >= or =", H.no);
            long m = to_long(H.tok[3], H.no);
            if (m < 1) throw ParseError("HANF threshold must be at least 1", H.no);
            int hr2 = q.r;
            if (H.tok.size() == 5) {
                if (H.tok[4].rfind("r=", 0) != 0) throw ParseError("expected r=<radius>", H.no);
                hr2 = static_cast<int>(to_long(H.tok[4].substr(2), H.no));
                if (hr2 < 0 || hr2 > q.r)
                    throw RadiusMismatch("sentence radius " + std::to_string(hr2) + " exceeds query radius " +
                                         std::to_string(q.r));
            }
            if (op == "=" && neg) throw ParseError("negated exact count is not a conjunction", H.no);
            ++i;
            Neighbourhood hb = read_block(lines, i, schema, hr2, q.d);
            if (hb.centres.size() != 1) throw CentreCountMismatch("Hanf sentence type needs exactly one centre");
            TypeId ht = canonicalize(hb, *registry);
            c.sentences.push_back(HanfSentence{neg, static_cast<uint32_t>(m), ht, hr2});
            if (op == "=") c.sentences.push_back(HanfSentence{true, static_cast<uint32_t>(m + 1), ht, hr2});
        }
        q.clauses.push_back(std::move(c));
    }
    if (!ended) throw ParseError("missing END");
    if (i != lines.size()) throw ParseError("trailing input after END", lines[i].no);
    merge_duplicates(q.clauses);
    return q;
}

std::string print_query(const QueryNF& q) {
    std::ostringstream out;
    out << "QUERY k=" << q.k << " r=" << q.r << " d=" << q.d << "\n";
    for (const auto& c : q.clauses) {
        out << "CLAUSE\nSPHERE\n" << print_neighbourhood(q.registry->info(c.sphere.type).representative);
        for (const auto& h : c.sentences) {
            out << "HANF " << (h.negated ? '-' : '+') << " >= " << h.threshold;
            if (h.radius != q.r) out << " r=" << h.radius;
            out << "\n" << print_neighbourhood(q.registry->info(h.type).representative);
        }
    }
    out << "END\n";
    return out.str();
}

int compute_conn(const QueryNF& q) {
    int c = 1;
    for (const auto& cl : q.clauses) c = std::max(c, q.registry->info(cl.sphere.type).component_count);
    return c;
}

bool is_local(const QueryNF& q) {
    return std::all_of(q.clauses.begin(), q.clauses.end(), [](const Clause& c) { return c.sentences.empty(); });
}

std::vector<TypeId> clause_types(const QueryNF& q) {
    std::vector<TypeId> t;
    for (const auto& c : q.clauses) t.push_back(c.sphere.type);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

bool same_query(const QueryNF& a, const QueryNF& b) {
    if (a.k != b.k || a.r != b.r || a.d != b.d || a.clauses.size() != b.clauses.size()) return false;
    for (size_t i = 0; i < a.clauses.size(); ++i) {
        if (a.clauses[i].sphere.type != b.clauses[i].sphere.type) return false;
        if (a.clauses[i].sentences != b.clauses[i].sentences) return false;
    }
    return true;
}

}  // namespace aqe
