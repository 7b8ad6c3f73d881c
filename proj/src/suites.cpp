#include "aqe/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "aqe/approx.hpp"
#include "aqe/errors.hpp"
#include "aqe/generators.hpp"
#include "aqe/stats.hpp"

namespace aqe::suites {

namespace {

// Pinned tolerances.
constexpr double kSignificance = 0.01;
constexpr double kTwoThirds = 2.0 / 3.0;
constexpr double kNineTenths = 0.9;
constexpr double kDelayVariation = 0.05;
constexpr double kBoundFactor = 2.0;

struct Ctx {
    Options opt;
    uint64_t runs = 0, dups = 0, outputs = 0;
    std::map<std::string, std::pair<uint64_t, uint64_t>> by_source;  // runs, dups

    uint64_t trials(uint64_t base) const {
        if (opt.trials) return *opt.trials;
        return std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(base * opt.scale)));
    }
    uint64_t seed(std::string_view label, uint64_t i) const { return derive_seed(opt.seed, label, i); }
    void log(const std::string& s) const {
        if (opt.log) *opt.log << "  " << s << "\n" << std::flush;
    }
};

// Seen-set over D^k that also counts repeats.
class Collector {
public:
    Collector(uint64_t n, int k) : space_(IndexSpace::tuples(n, k)), seen_(space_.size()) {}
    // False on a repeat.
    bool add(std::span<const Element> t) {
        ++outputs;
        if (seen_.test_and_set(space_.encode(t))) {
            ++dups;
            return false;
        }
        return true;
    }
    uint64_t outputs = 0, dups = 0;

private:
    IndexSpace space_;
    LazyFlags seen_;
};

void record(Ctx& ctx, const std::string& source, const Collector& col) {
    ++ctx.runs;
    ctx.dups += col.dups;
    ctx.outputs += col.outputs;
    auto& e = ctx.by_source[source];
    ++e.first;
    e.second += col.dups;
}

std::string binom_text(uint64_t x, uint64_t n, double p0) {
    std::ostringstream o;
    o << x << "/" << n;
    if (n) o << " (" << static_cast<double>(x) / n << ", tail p=" << stats::binomial_tail_ge(n, p0, x) << ")";
    return o.str();
}

bool binom_pass(uint64_t x, uint64_t n, double p0) { return stats::binomial_test_pass(x, n, p0, kSignificance); }

EnumOptions base_options(const Ctx& ctx, double gamma, uint64_t seed) {
    EnumOptions o;
    o.gamma = gamma;
    o.seed = seed;
    o.disable_dedup = ctx.opt.inject_dedup_fault;
    return o;
}

// Disjoint N1 copies with the per-copy roles the workloads need.
struct PatternCopies {
    gen::Copies cp;
    std::vector<int> copy_of;  // element -> copy, -1 if isolated
    std::vector<int> role;     // element -> pattern vertex 1..8, 0 if isolated
};

PatternCopies pattern_copies(int which, uint32_t copies, uint32_t isolated, uint64_t seed) {
    Database f = gen::pattern_graph(which);
    PatternCopies out{gen::disjoint_copies({&f}, {copies}, isolated, seed, 3), {}, {}};
    out.copy_of.assign(out.cp.db.n() + 1, -1);
    out.role.assign(out.cp.db.n() + 1, 0);
    for (uint32_t c = 0; c < copies; ++c)
        for (int v = 1; v <= 8; ++v) {
            out.copy_of[out.cp.maps[c][v - 1]] = static_cast<int>(c);
            out.role[out.cp.maps[c][v - 1]] = v;
        }
    return out;
}

// Degree-1 vertices of N1 (4..8). At radius 2 all five have the same ball.
bool is_leaf(int role) { return role >= 4; }

// ---------------------------------------------------------------------------

Result criterion1(Ctx& ctx) {
    Result res{1, "local soundness (enumerate_local, random dbs)", false, false, {}, 0};
    const uint64_t runs = ctx.trials(10000);
    if (runs == 0) return res.pass = true, res.vacuous = true, res;
    const uint64_t ndb = std::min<uint64_t>(50, std::max<uint64_t>(1, runs / 200));
    const uint64_t per_db = (runs + ndb - 1) / ndb;
    uint64_t done = 0, emitted = 0, bad = 0, nonempty = 0;
    for (uint64_t i = 0; i < ndb; ++i) {
        Rng rng(ctx.seed("c1-db", i));
        const uint32_t n = 20 + static_cast<uint32_t>(rng.below(1981));
        const int d = 2 + static_cast<int>(rng.below(3));
        const bool mixed = i % 3 == 2;
        const double fill = 0.3 + 0.7 * rng.uniform01();
        Database db = mixed ? gen::random_mixed(n, d, static_cast<uint64_t>(n * d / 3.0 * fill), n / 4, rng.next())
                            : gen::random_graph(n, d, static_cast<uint64_t>(n * d / 2.0 * fill), rng.next());
        const int r = static_cast<int>(rng.below(3));
        const int k = i % 5 < 2 ? 1 : (i % 5 < 4 ? 2 : 3);
        auto reg = std::make_shared<TypeRegistry>();
        std::vector<TypeId> types;
        const int ntypes = 1 + static_cast<int>(rng.below(3));
        std::vector<Element> t(k);
        for (int j = 0; j < ntypes; ++j) {
            for (auto& e : t) e = static_cast<Element>(1 + rng.below(n));
            types.push_back(tuple_type_direct(db, t, r, *reg));
        }
        QueryNF q = gen::local_query(db.schema_ptr(), reg, k, r, d, types);
        LocalTypeCache cache(db, r, reg);
        ExactEvaluator ev(db, q);
        for (uint64_t s = 0; s < per_db && done < runs; ++s, ++done) {
            EnumOptions o = base_options(ctx, 0.1 + 0.4 * rng.uniform01(), ctx.seed("c1-run", done));
            o.max_outputs = 50;
            o.cache = &cache;
            Collector col(n, k);
            enumerate_local(db, q, o, [&](std::span<const Element> a) {
                col.add(a);
                if (!ev.eval(a)) ++bad;
                return true;
            });
            record(ctx, "c1 local", col);
            emitted += col.outputs;
            if (col.outputs) ++nonempty;
        }
    }
    res.pass = bad == 0;
    std::ostringstream o;
    o << done << " runs over " << ndb << " dbs, " << emitted << " tuples emitted (" << nonempty
      << " non-empty runs), " << bad << " outside the answer set";
    res.detail = o.str();
    return res;
}

// (tau4-centre, leaf) pairs from different N1 copies.
struct CentreLeaf {
    PatternCopies fc;
    QueryNF q;
    uint64_t expected = 0;
    bool member(std::span<const Element> a) const {
        const int ca = fc.copy_of[a[0]], cb = fc.copy_of[a[1]];
        return fc.role[a[0]] == 1 && is_leaf(fc.role[a[1]]) && ca >= 0 && cb >= 0 && ca != cb;
    }
};

CentreLeaf centre_leaf(uint32_t n, uint64_t seed, RegistryPtr reg) {
    const uint32_t copies = n / 8;
    CentreLeaf w{pattern_copies(1, copies, n - 8 * copies, seed), {}, 0};
    std::vector<Element> rep{w.fc.cp.maps[0][0], w.fc.cp.maps[1][4]};
    const TypeId t = tuple_type_direct(w.fc.cp.db, rep, 2, *reg);
    w.q = gen::local_query(w.fc.cp.db.schema_ptr(), reg, 2, 2, 3, {t});
    w.expected = uint64_t{copies} * 5 * (copies - 1);
    return w;
}

Result criterion2(Ctx& ctx) {
    Result res{2, "local completeness at gamma*n^k (k=2, gamma=0.05)", false, false, {}, 0};
    const uint64_t trials = ctx.trials(300);
    if (trials == 0) return res.pass = true, res.vacuous = true, res;
    const double gamma = 0.05;
    bool ok = true;
    std::ostringstream o;
    for (uint32_t n : {500u, 2000u}) {
        auto reg = std::make_shared<TypeRegistry>();
        CentreLeaf w = centre_leaf(n, ctx.seed("c2-db", n), reg);
        const Database& db = w.fc.cp.db;
        const bool dense = static_cast<double>(w.expected) >= gamma * n * n;
        // Brute-force cross-check of the analytic answer set.
        bool cross = true;
        if (n <= 500) {
            AnswerSet as = answer_set(db, w.q);
            cross = as.tuples.size() == w.expected;
            for (const auto& t : as.tuples) cross = cross && w.member(t);
        } else {
            ExactEvaluator ev(db, w.q);
            Rng rng(ctx.seed("c2-cross", n));
            for (int i = 0; i < 4000; ++i) {
                Element a[2] = {static_cast<Element>(1 + rng.below(n)), static_cast<Element>(1 + rng.below(n))};
                if (i % 2 == 0) a[0] = w.fc.cp.maps[rng.below(n / 8)][0];
                cross = cross && ev.eval(a) == w.member(a);
            }
        }
        LocalTypeCache cache(db, 2, reg);
        uint64_t complete = 0, unsound = 0;
        for (uint64_t s = 0; s < trials; ++s) {
            EnumOptions opt = base_options(ctx, gamma, ctx.seed("c2-run", n * 1000 + s));
            opt.cache = &cache;
            Collector col(n, 2);
            uint64_t good = 0;
            enumerate_local(db, w.q, opt, [&](std::span<const Element> a) {
                if (col.add(a) && w.member(a)) ++good;
                if (!w.member(a)) ++unsound;
                return true;
            });
            record(ctx, "c2 local", col);
            if (col.dups == 0 && good == w.expected && col.outputs == w.expected) ++complete;
        }
        const bool pass = dense && cross && unsound == 0 && binom_pass(complete, trials, kTwoThirds);
        ok = ok && pass;
        o << "n=" << n << ": |answers|=" << w.expected << (dense ? " >= " : " < ") << "gamma*n^2="
          << gamma * n * n << ", brute-force cross-check " << (cross ? "ok" : "FAILED") << ", S=answers in "
          << binom_text(complete, trials, kTwoThirds) << "; ";
    }
    res.pass = ok;
    res.detail = o.str();
    return res;
}

Result criterion3(Ctx& ctx) {
    Result res{3, "strengthened threshold gamma*n^c (c=1)", false, false, {}, 0};
    const uint64_t trials = ctx.trials(300);
    if (trials == 0) return res.pass = true, res.vacuous = true, res;
    const double gamma = 0.05;
    const uint32_t n = 8000;
    std::ostringstream o;
    // (a) sph_t1 on N1 copies, local modes.
    auto reg = std::make_shared<TypeRegistry>();
    PatternCopies fc = pattern_copies(1, n / 8, 0, ctx.seed("c3-db", 1));
    const Database& db = fc.cp.db;
    QueryNF q = gen::local_query(db.schema_ptr(), reg, 2, 2, 3, {gen::pattern_type(1, *reg)});
    auto member = [&](std::span<const Element> a) {
        return fc.role[a[0]] == 1 && fc.role[a[1]] == 4 && fc.copy_of[a[0]] == fc.copy_of[a[1]];
    };
    const uint64_t expected = n / 8;
    bool cross = compute_conn(q) == 1;
    {
        ExactEvaluator ev(db, q);
        Rng rng(ctx.seed("c3-cross", 0));
        for (int i = 0; i < 2000; ++i) {
            const auto& m = fc.cp.maps[rng.below(n / 8)];
            Element a[2] = {m[rng.below(8)], m[rng.below(8)]};
            cross = cross && ev.eval(a) == member(a);
        }
    }
    const bool linear = static_cast<double>(expected) >= gamma * n && static_cast<double>(expected) < gamma * n * n;
    LocalTypeCache cache(db, 2, reg);
    auto run_mode = [&](bool strengthened, uint64_t runs, const char* label) {
        uint64_t complete = 0;
        for (uint64_t s = 0; s < runs; ++s) {
            EnumOptions opt = base_options(ctx, gamma, ctx.seed(label, s));
            opt.cache = &cache;
            Collector col(n, 2);
            uint64_t good = 0;
            auto emit = [&](std::span<const Element> a) {
                if (col.add(a) && member(a)) ++good;
                return true;
            };
            if (strengthened)
                enumerate_local_strengthened(db, q, opt, emit);
            else
                enumerate_local(db, q, opt, emit);
            record(ctx, strengthened ? "c3 local-strengthened" : "c3 local", col);
            if (col.dups == 0 && good == expected && col.outputs == expected) ++complete;
        }
        return complete;
    };
    const uint64_t strong = run_mode(true, trials, "c3-strong");
    const uint64_t plain_runs = std::max<uint64_t>(1, trials / 10);
    const uint64_t plain = run_mode(false, plain_runs, "c3-plain");
    const bool plain_fails = static_cast<double>(plain) / plain_runs < kTwoThirds;
    o << "N1 copies n=" << n << ", |answers|=" << expected << " (gamma*n=" << gamma * n << ", gamma*n^2=" << gamma * n * n
      << "), cross-check " << (cross ? "ok" : "FAILED") << "; local-strengthened complete in "
      << binom_text(strong, trials, kTwoThirds) << "; plain local complete in " << plain << "/" << plain_runs;
    bool ok = cross && linear && binom_pass(strong, trials, kTwoThirds) && plain_fails;

    // (b) the two-clause query on N2 copies through the tester-plugin mode.
    auto reg2 = std::make_shared<TypeRegistry>();
    PatternCopies f2 = pattern_copies(2, n / 8, 0, ctx.seed("c3-db", 2));
    QueryNF q2 = gen::two_clause_query(reg2);
    auto member2 = [&](std::span<const Element> a) {
        return f2.role[a[0]] == 1 && f2.role[a[1]] == 4 && f2.copy_of[a[0]] == f2.copy_of[a[1]];
    };
    bool cross2 = true;
    {
        ExactEvaluator ev(f2.cp.db, q2);
        Rng rng(ctx.seed("c3-cross", 1));
        for (int i = 0; i < 2000; ++i) {
            const auto& m = f2.cp.maps[rng.below(n / 8)];
            Element a[2] = {m[rng.below(8)], m[rng.below(8)]};
            cross2 = cross2 && ev.eval(a) == member2(a);
        }
    }
    LocalTypeCache cache2(f2.cp.db, 2, reg2);
    const auto testers = make_testers(q2, TesterKind::AbsentType);
    uint64_t complete2 = 0, unsound2 = 0;
    for (uint64_t s = 0; s < trials; ++s) {
        EnumOptions opt = base_options(ctx, gamma, ctx.seed("c3-hanf", s));
        opt.eps = 0.2;
        opt.cache = &cache2;
        opt.testers = testers;
        Collector col(n, 2);
        uint64_t good = 0;
        enumerate_hanf_testable(f2.cp.db, q2, opt, [&](std::span<const Element> a) {
            if (col.add(a) && member2(a)) ++good;
            if (!member2(a)) ++unsound2;
            return true;
        });
        record(ctx, "c3 hanf", col);
        if (col.dups == 0 && good == expected && col.outputs == expected) ++complete2;
    }
    o << "; two-clause query on N2 copies (tester plugins), cross-check " << (cross2 ? "ok" : "FAILED")
      << ", complete in " << binom_text(complete2, trials, kTwoThirds);
    ok = ok && cross2 && unsound2 == 0 && binom_pass(complete2, trials, kTwoThirds);
    res.pass = ok;
    res.detail = o.str();
    return res;
}

Result criterion4(Ctx& ctx) {
    Result res{4, "no duplicates in any run", false, false, {}, 0};
    const uint64_t trials = ctx.trials(100);
    if (trials == 0 && ctx.runs == 0) return res.pass = true, res.vacuous = true, res;
    const double gamma = 0.05;
    // Expansion with two groups: centre/leaf pairs through D u D^2.
    {
        auto reg = std::make_shared<TypeRegistry>();
        CentreLeaf w = centre_leaf(500, ctx.seed("c4-db", 0), reg);
        LocalTypeCache cache(w.fc.cp.db, 2, reg);
        for (uint64_t s = 0; s < trials; ++s) {
            EnumOptions opt = base_options(ctx, gamma, ctx.seed("c4-ls", s));
            opt.cache = &cache;
            Collector col(500, 2);
            enumerate_local_strengthened(w.fc.cp.db, w.q, opt, [&](std::span<const Element> a) {
                col.add(a);
                return true;
            });
            record(ctx, "c4 local-strengthened c=2", col);
        }
    }
    // General expansion modes on a mix of N1 and N2 copies.
    {
        auto reg = std::make_shared<TypeRegistry>();
        Database n1 = gen::pattern_graph(1), n2 = gen::pattern_graph(2);
        gen::Copies cp = gen::disjoint_copies({&n1, &n2}, {10, 90}, 0, ctx.seed("c4-db", 1), 3);
        QueryNF q = gen::two_clause_query(reg);
        LocalTypeCache cache(cp.db, 2, reg);
        const auto exact = make_testers(q, TesterKind::Exact);
        const auto plugins = make_testers(q, TesterKind::AbsentType);
        for (uint64_t s = 0; s < trials; ++s) {
            for (int mode = 0; mode < 2; ++mode) {
                EnumOptions opt = base_options(ctx, gamma, ctx.seed(mode ? "c4-hanf" : "c4-gs", s));
                opt.cache = &cache;
                opt.testers = mode ? plugins : exact;
                Collector col(cp.db.n(), 2);
                auto emit = [&](std::span<const Element> a) {
                    col.add(a);
                    return true;
                };
                if (mode)
                    enumerate_hanf_testable(cp.db, q, opt, emit);
                else
                    enumerate_general_strengthened(cp.db, q, opt, emit);
                record(ctx, mode ? "c4 hanf" : "c4 general-strengthened", col);
            }
        }
    }
    std::ostringstream o;
    o << ctx.runs << " runs, " << ctx.outputs << " emissions, " << ctx.dups << " repeats [";
    bool first = true;
    for (const auto& [src, e] : ctx.by_source) {
        o << (first ? "" : "; ") << src << ": " << e.first << " runs/" << e.second << " repeats";
        first = false;
    }
    o << "]";
    res.pass = ctx.dups == 0 && ctx.runs > 0;
    res.detail = o.str();
    return res;
}

Result criterion5(Ctx& ctx) {
    Result res{5, "constant delay across n (ops per output)", false, false, {}, 0};
    const uint64_t seeds = std::min<uint64_t>(3, ctx.trials(3));
    if (seeds == 0) return res.pass = true, res.vacuous = true, res;
    const double gamma = 0.01;
    const std::vector<uint32_t> sizes{1000, 10000, 100000};
    std::ostringstream o;
    bool ok = true;
    for (int workload = 0; workload < 2; ++workload) {
        std::vector<double> maxes;
        uint64_t bound = 0;
        for (uint32_t n : sizes) {
            auto reg = std::make_shared<TypeRegistry>();
            PatternCopies fc = pattern_copies(1, n / 8, n % 8, ctx.seed("c5-db", n));
            const Database& db = fc.cp.db;
            // Leaves of two different copies: a two-component type.
            std::vector<Element> rep{fc.cp.maps[0][4], fc.cp.maps[1][4]};
            const TypeId t = tuple_type_direct(db, rep, 2, *reg);
            QueryNF q = gen::local_query(db.schema_ptr(), reg, 2, 2, 3, {t});
            if (workload == 1) {
                Element c[1] = {fc.cp.maps[0][0]};
                q.clauses[0].sentences.push_back(HanfSentence{false, 1, tuple_type_direct(db, c, 2, *reg), 2});
            }
            LocalTypeCache cache(db, 2, reg);
            double total = 0;
            for (uint64_t s = 0; s < seeds; ++s) {
                EnumOptions opt = base_options(ctx, gamma, ctx.seed("c5-run", n * 10 + s));
                opt.max_outputs = 500;
                opt.cache = &cache;
                Collector col(n, 2);
                auto emit = [&](std::span<const Element> a) {
                    col.add(a);
                    return true;
                };
                EnumSummary sum = workload == 0 ? enumerate_local(db, q, opt, emit) : enumerate_general(db, q, opt, emit);
                record(ctx, workload == 0 ? "c5 local" : "c5 general", col);
                total += static_cast<double>(sum.max_delay);
                bound = sum.analytic_bound;
                ok = ok && sum.outputs == 500;
                ctx.log("workload " + std::to_string(workload) + " n=" + std::to_string(n) + ": " + sum.to_text());
            }
            maxes.push_back(total / seeds);
        }
        const double lo = *std::min_element(maxes.begin(), maxes.end());
        const double hi = *std::max_element(maxes.begin(), maxes.end());
        const double variation = (hi - lo) / lo;
        const bool within = hi <= static_cast<double>(bound) && static_cast<double>(bound) <= kBoundFactor * lo;
        ok = ok && variation < kDelayVariation && within;
        o << (workload == 0 ? "local" : "general") << ": max ops/output";
        for (size_t i = 0; i < sizes.size(); ++i) o << " n=" << sizes[i] << ":" << maxes[i];
        o << ", variation " << variation * 100 << "%, analytic bound " << bound << (within ? " (within 2x)" : " (OUT)")
          << "; ";
    }
    res.pass = ok;
    res.detail = o.str();
    return res;
}

Result criterion6(Ctx& ctx) {
    Result res{6, "absent-type tester (member accept, far reject)", false, false, {}, 0};
    const uint64_t trials = ctx.trials(200);
    if (trials == 0) return res.pass = true, res.vacuous = true, res;
    const int d = 3;
    const double eps = 0.02;
    const uint32_t n = 32400;
    auto reg = std::make_shared<TypeRegistry>();
    const TypeId t4 = gen::pattern_type(4, *reg);
    PatternCopies member = pattern_copies(2, n / 8, 0, ctx.seed("c6-db", 0));
    PatternCopies far = pattern_copies(1, n / 8, 0, ctx.seed("c6-db", 1));
    // Membership of the member instance, by scan.
    const uint64_t member_t4 = count_type(member.cp.db, t4, 2, *reg);
    const bool is_member = member_t4 == 0 && exists_tuple_of_type(member.cp.db, gen::pattern_type(2, *reg), 2, *reg);
    // Far-ness: each planted t4 centre needs an edit with an endpoint in its own
    // copy before its ball can change, so at least t/2 edits are needed.
    const uint64_t t = count_type(far.cp.db, t4, 2, *reg);
    const double edn = eps * d * n;
    const bool certified = static_cast<double>(t) / 2 > edn;
    const double claim_floor = edn - 8.0 * (d + 1) - 8.0 * std::pow(d, 4);
    const bool claim_ok = static_cast<double>(t) >= claim_floor && n >= 24.0 * d * d * d / eps;
    uint64_t acc = 0, rej = 0, samples = 0;
    for (uint64_t s = 0; s < trials; ++s) {
        TesterVerdict v = absent_type_tester(member.cp.db, eps, ctx.seed("c6-member", s), *reg);
        acc += v.accept && !v.exact_branch;
        TesterVerdict w = absent_type_tester(far.cp.db, eps, ctx.seed("c6-far", s), *reg);
        rej += !w.accept && !w.exact_branch;
        samples = std::max(samples, w.samples);
    }
    std::ostringstream o;
    o << "n=" << n << " d=" << d << " eps=" << eps << " alpha=" << absent_type_samples(eps, d)
      << "; member (" << n / 8 << " N2 copies, t4 count " << member_t4 << ") accepted " << acc << "/" << trials
      << "; far (" << t << " planted t4 centres, t/2=" << t / 2.0 << " > eps*d*n=" << edn
      << ", counting floor " << claim_floor << " <= t) rejected " << binom_text(rej, trials, kTwoThirds);
    res.pass = is_member && certified && claim_ok && acc == trials && binom_pass(rej, trials, kTwoThirds);
    res.detail = o.str();
    return res;
}

Result criterion7(Ctx& ctx) {
    Result res{7, "estimate_frequencies L1 error <= lambda", false, false, {}, 0};
    const uint64_t trials = ctx.trials(300);
    if (trials == 0) return res.pass = true, res.vacuous = true, res;
    const double lambda = 0.1;
    const uint32_t n = 8000;
    auto reg = std::make_shared<TypeRegistry>();
    PatternCopies fc = pattern_copies(1, n / 8, 0, ctx.seed("c7-db", 0));
    LocalTypeCache cache(fc.cp.db, 2, reg);
    DistributionVector dv = exact_distribution(cache, 1);
    const uint64_t c = dv.entries.size();
    const uint64_t s = frequency_sample_size(c, lambda);
    uint64_t good = 0;
    double worst = 0;
    for (uint64_t i = 0; i < trials; ++i) {
        DistributionVector v = estimate_frequencies(cache, 1, s, ctx.seed("c7-run", i));
        const double err = v.l1_distance(dv);
        worst = std::max(worst, err);
        if (err <= lambda) ++good;
    }
    std::ostringstream o;
    o << "N1 copies n=" << n << ", k=1 r=2, realised types c=" << c << ", s=" << s << ", within lambda in "
      << binom_text(good, trials, kNineTenths) << ", worst L1 " << worst;
    res.pass = binom_pass(good, trials, kNineTenths);
    res.detail = o.str();
    return res;
}

Result criterion8(Ctx& ctx) {
    Result res{8, "split expansion equals brute force, unique leaders", false, false, {}, 0};
    const uint64_t count = ctx.trials(24);
    if (count == 0) return res.pass = true, res.vacuous = true, res;
    uint64_t checked = 0, tuples = 0, mismatches = 0;
    for (uint64_t i = 0; i < count; ++i) {
        Rng rng(ctx.seed("c8-db", i));
        const int k = 1 + static_cast<int>(i % 3);
        const int r = static_cast<int>((i / 3) % 2);
        const uint32_t cap = k == 3 ? 16 : 40;
        Database db = [&] {
            switch (i % 4) {
                case 0: {
                    const uint32_t n = 8 + static_cast<uint32_t>(rng.below(cap - 7));
                    const int d = 2 + static_cast<int>(rng.below(3));
                    return gen::random_graph(n, d, n * d / 2, rng.next());
                }
                case 1: {
                    const uint32_t n = 6 + static_cast<uint32_t>(rng.below(cap - 5));
                    return gen::random_mixed(n, 3, n / 2, n / 3, rng.next());
                }
                default: {
                    Database n1 = gen::pattern_graph(1), n2 = gen::pattern_graph(2);
                    const uint32_t m = cap / 8;
                    return gen::disjoint_copies({&n1, &n2}, {(m + 1) / 2, m / 2}, 0, rng.next(), 3).db;
                }
            }
        }();
        const uint32_t n = db.n();
        auto reg = std::make_shared<TypeRegistry>();
        IndexSpace all = IndexSpace::tuples(n, k);
        std::vector<TypeId> direct(all.size());
        std::vector<Element> b(k);
        std::vector<TypeId> seen_types;
        for (uint64_t x = 0; x < all.size(); ++x) {
            all.decode(x, b.data());
            direct[x] = tuple_type_direct(db, b, r, *reg);
            seen_types.push_back(direct[x]);
        }
        std::sort(seen_types.begin(), seen_types.end());
        seen_types.erase(std::unique(seen_types.begin(), seen_types.end()), seen_types.end());
        // Three type sets per database: everything, one type, a random half.
        std::vector<std::vector<TypeId>> sets{seen_types, {seen_types[rng.below(seen_types.size())]}, {}};
        for (TypeId t : seen_types)
            if (rng.below(2)) sets[2].push_back(t);
        LocalTypeCache cache(db, r, reg);
        for (const auto& T : sets) {
            std::vector<TypeId> sorted(T);
            std::sort(sorted.begin(), sorted.end());
            std::vector<uint32_t> hits(all.size(), 0);
            SplitEngine eng(cache, sorted, k);
            IndexSpace leaders = IndexSpace::prefix_union(n, k);
            std::vector<Element> a(k), out;
            for (uint64_t x = 0; x < leaders.size(); ++x) {
                const int len = leaders.decode(x, a.data());
                out.clear();
                eng.candidates(std::span<const Element>(a.data(), len), out);
                for (size_t j = 0; j < out.size(); j += k) ++hits[all.encode(std::span<const Element>(&out[j], k))];
            }
            for (uint64_t x = 0; x < all.size(); ++x) {
                const bool want = std::binary_search(sorted.begin(), sorted.end(), direct[x]);
                if (hits[x] != (want ? 1u : 0u)) ++mismatches;
                tuples += want;
            }
            ++checked;
        }
    }
    std::ostringstream o;
    o << checked << " (database, T) pairs from " << count << " databases (n<=40, k<=3, r in {0,1}), " << tuples
      << " tuples of type in T, " << mismatches << " mismatches";
    res.pass = mismatches == 0;
    res.detail = o.str();
    return res;
}

// Closeness of every pair, for tiny instances (one N1 copy, m N2 copies).
struct TinyInstance {
    gen::Copies cp;
    RegistryPtr reg;
    QueryNF q;
    double eps;
    std::vector<char> close;  // by encoded pair
    uint64_t answers = 0, close_count = 0;
};

TinyInstance tiny_instance(uint32_t m, uint64_t seed) {
    TinyInstance ti{gen::n1_with_n2_copies(m, seed), std::make_shared<TypeRegistry>(), {}, 0, {}, 0, 0};
    ti.q = gen::two_clause_query(ti.reg);
    const uint32_t n = ti.cp.db.n();
    ti.eps = 3.0 / (3.0 * n);  // edit budget floor(eps*d*n) = 3
    IndexSpace sp = IndexSpace::tuples(n, 2);
    ti.close.assign(sp.size(), 0);
    ExactEvaluator ev(ti.cp.db, ti.q);
    Element a[2];
    for (uint64_t x = 0; x < sp.size(); ++x) {
        sp.decode(x, a);
        ti.answers += ev.eval(a);
        ti.close[x] = closeness_check(ti.cp.db, a, ti.q, ti.eps, 3);
        ti.close_count += ti.close[x];
    }
    return ti;
}

Result criterion9(Ctx& ctx) {
    Result res{9, "general-mode soundness up to eps-closeness (tiny instances)", false, false, {}, 0};
    const uint64_t trials = ctx.trials(300);
    if (trials == 0) return res.pass = true, res.vacuous = true, res;
    std::ostringstream o;
    bool ok = true;
    for (uint32_t m : {1u, 2u}) {
        TinyInstance ti = tiny_instance(m, ctx.seed("c9-db", m));
        const uint32_t n = ti.cp.db.n();
        IndexSpace sp = IndexSpace::tuples(n, 2);
        LocalTypeCache cache(ti.cp.db, 2, ti.reg);
        o << "N1+" << m << "xN2 n=" << n << " budget=" << static_cast<int>(ti.eps * 3 * n + 1e-9)
          << " |answers|=" << ti.answers << " |close|=" << ti.close_count << ":";
        const char* names[] = {"general", "general-strengthened", "hanf", "general forced testers",
                               "general-strengthened forced testers"};
        for (int mode = 0; mode < 5; ++mode) {
            uint64_t sound = 0, emitted = 0;
            for (uint64_t s = 0; s < trials; ++s) {
                EnumOptions opt = base_options(ctx, 0.05, ctx.seed("c9-run", m * 100000 + mode * 10000 + s));
                opt.eps = ti.eps;
                opt.cache = &cache;
                opt.force_testers = mode >= 3;
                opt.testers = mode == 2 ? make_testers(ti.q, TesterKind::AbsentType)
                                        : make_testers(ti.q, TesterKind::Sampling);
                Collector col(n, 2);
                bool all_close = true;
                auto emit = [&](std::span<const Element> a) {
                    col.add(a);
                    all_close = all_close && ti.close[sp.encode(a)];
                    return true;
                };
                if (mode == 0 || mode == 3)
                    enumerate_general(ti.cp.db, ti.q, opt, emit);
                else if (mode == 2)
                    enumerate_hanf_testable(ti.cp.db, ti.q, opt, emit);
                else
                    enumerate_general_strengthened(ti.cp.db, ti.q, opt, emit);
                record(ctx, std::string("c9 ") + names[mode], col);
                emitted += col.outputs;
                sound += all_close;
            }
            const bool pass = binom_pass(sound, trials, kTwoThirds);
            ok = ok && pass;
            o << " " << names[mode] << " " << binom_text(sound, trials, kTwoThirds) << " (" << emitted
              << " emitted);";
        }
        o << " ";
    }
    res.pass = ok;
    res.detail = o.str();
    return res;
}

Result criterion10(Ctx& ctx) {
    Result res{10, "approximate counting interval", false, false, {}, 0};
    const uint64_t trials = ctx.trials(300);
    if (trials == 0) return res.pass = true, res.vacuous = true, res;
    std::ostringstream o;
    bool ok = true;
    auto check = [&](const std::string& label, const Database& db, const QueryNF& q, double eps, double lambda,
                     double truth, double true_close, const std::vector<TesterPtr>& testers, bool force) {
        LocalTypeCache cache(db, q.r, q.registry);
        uint64_t inside = 0;
        double lo_est = 1e300, hi_est = -1e300, hw = 0;
        int c = 1;
        for (uint64_t s = 0; s < trials; ++s) {
            CountEstimate e = approx_count(db, q, eps, lambda, testers, ctx.seed("c10-" + label, s), force, &cache);
            hw = e.half_width;
            c = e.c;
            lo_est = std::min(lo_est, e.estimate);
            hi_est = std::max(hi_est, e.estimate);
            if (e.estimate >= truth - e.half_width && e.estimate <= true_close + e.half_width) ++inside;
        }
        const bool pass = binom_pass(inside, trials, kTwoThirds);
        ok = ok && pass;
        o << label << ": c=" << c << " true=" << truth << " trueClose=" << true_close << " half-width=" << hw
          << " estimates in [" << lo_est << ", " << hi_est << "], inside " << binom_text(inside, trials, kTwoThirds)
          << "; ";
    };
    {
        auto reg = std::make_shared<TypeRegistry>();
        PatternCopies fc = pattern_copies(1, 1000, 0, ctx.seed("c10-db", 0));
        QueryNF q = gen::local_query(fc.cp.db.schema_ptr(), reg, 2, 2, 3, {gen::pattern_type(1, *reg)});
        // Local query: closeness adds nothing, so trueClose = true count.
        check("t1 on N1 copies", fc.cp.db, q, 0.1, 0.1, 1000, 1000, make_testers(q, TesterKind::Sampling), false);
    }
    {
        auto reg = std::make_shared<TypeRegistry>();
        CentreLeaf w = centre_leaf(500, ctx.seed("c10-db", 1), reg);
        check("centre/leaf pairs c=2", w.fc.cp.db, w.q, 0.1, 0.05, static_cast<double>(w.expected),
              static_cast<double>(w.expected), make_testers(w.q, TesterKind::Sampling), false);
    }
    {
        TinyInstance ti = tiny_instance(2, ctx.seed("c10-db", 2));
        const auto testers = make_testers(ti.q, TesterKind::Sampling);
        check("two-clause query on N1+2xN2", ti.cp.db, ti.q, ti.eps, 0.1, static_cast<double>(ti.answers),
              static_cast<double>(ti.close_count), testers, false);
        check("two-clause query on N1+2xN2 forced testers", ti.cp.db, ti.q, ti.eps, 0.1, static_cast<double>(ti.answers),
              static_cast<double>(ti.close_count), testers, true);
    }
    res.pass = ok;
    res.detail = o.str();
    return res;
}

}  // namespace

std::vector<Result> run(const Options& opt, const std::vector<int>& which) {
    Ctx ctx{opt, 0, 0, 0, {}};
    using Fn = Result (*)(Ctx&);
    const Fn fns[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                      criterion6, criterion7, criterion8, criterion9, criterion10};
    std::vector<Result> out;
    for (int id = 1; id <= 10; ++id) {
        if (!which.empty() && std::find(which.begin(), which.end(), id) == which.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = fns[id - 1](ctx);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.log) *opt.log << format(r) << "\n" << std::flush;
        out.push_back(std::move(r));
    }
    return out;
}

std::string format(const Result& r) {
    std::ostringstream o;
    o << (r.pass ? "PASS" : "FAIL") << " C" << r.id << " " << r.name;
    if (r.vacuous) o << " [vacuous: zero trials]";
    o << " (" << std::fixed;
    o.precision(1);
    o << r.seconds << "s)";
    if (!r.detail.empty()) o << ": " << r.detail;
    return o.str();
}

}  // namespace aqe::suites
