// Command-line front end: enumeration modes, exact reference, membership,
// counting, testers, split inspection, delay benchmark and the self-test.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "aqe/approx.hpp"
#include "aqe/enumerate.hpp"
#include "aqe/exact.hpp"
#include "aqe/splits.hpp"
#include "aqe/testers.hpp"
#include "aqe/errors.hpp"
#include "aqe/generators.hpp"
#include "aqe/suites.hpp"

using namespace aqe;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitMode = 3;

struct Paths {
    std::string schema, db, query;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SchemaPtr load_schema(const std::string& path) {
    if (path.empty()) return std::make_shared<const Schema>(Schema::graph());
    return std::make_shared<const Schema>(Schema::parse(slurp(path)));
}

struct Loaded {
    SchemaPtr schema;
    RegistryPtr reg = std::make_shared<TypeRegistry>();
    QueryNF q;
    std::unique_ptr<Database> db;
};

Loaded load_all(const Paths& p) {
    Loaded l;
    l.schema = load_schema(p.schema);
    l.q = parse_query(slurp(p.query), l.schema, l.reg);
    l.db = std::make_unique<Database>(load_database(l.schema, slurp(p.db), l.q.d));
    return l;
}

uint64_t resolve_seed(const std::string& s) {
    if (s == "auto") {
        std::random_device rd;
        const uint64_t seed = (static_cast<uint64_t>(rd()) << 32) | rd();
        std::cerr << "seed=" << seed << "\n";
        return seed;
    }
    try {
        size_t used = 0;
        const uint64_t v = std::stoull(s, &used);
        if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw ParseError("--seed must be a non-negative integer or 'auto'");
}

std::vector<Element> parse_tuple(const std::string& s) {
    std::vector<Element> t;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            size_t used = 0;
            const long v = std::stol(part, &used);
            if (used != part.size() || v < 1) throw ParseError("bad tuple element '" + part + "'");
            t.push_back(static_cast<Element>(v));
        } catch (const std::logic_error&) {
            throw ParseError("bad tuple element '" + part + "'");
        }
    }
    if (t.empty()) throw ParseError("empty tuple");
    return t;
}

void check_tuple(const Database& db, const std::vector<Element>& t) {
    for (Element e : t)
        if (e > db.n()) throw ElementOutOfRange("tuple element " + std::to_string(e) + " outside [1,n]");
}

TesterKind tester_kind(const std::string& s) {
    if (s == "exact") return TesterKind::Exact;
    if (s == "sampling") return TesterKind::Sampling;
    if (s == "absent-type") return TesterKind::AbsentType;
    throw ParseError("unknown tester '" + s + "'");
}

void print_tuple(std::ostream& out, std::span<const Element> t) {
    for (size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << t[i];
    out << '\n';
}

EnumSummary run_mode(const std::string& mode, const Database& db, const QueryNF& q, const EnumOptions& opt,
                     const EmitFn& emit) {
    if (mode == "local") return enumerate_local(db, q, opt, emit);
    if (mode == "local-strengthened") return enumerate_local_strengthened(db, q, opt, emit);
    if (mode == "general") return enumerate_general(db, q, opt, emit);
    if (mode == "general-strengthened") return enumerate_general_strengthened(db, q, opt, emit);
    if (mode == "hanf") return enumerate_hanf_testable(db, q, opt, emit);
    throw ParseError("unknown mode '" + mode + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate query enumeration over bounded-degree databases"};
    app.require_subcommand(1);

    Paths paths;
    std::string seed_text, mode = "local", tester = "sampling", tuple_text;
    double gamma = 0.05, eps = 0.1, lambda = 0.1;
    uint64_t max_outputs = 0;
    uint64_t s_eff = 0;
    bool force = false, exact = false;

    auto add_io = [&](CLI::App* c, bool query) {
        c->add_option("--schema", paths.schema, "schema file (default: one undirected edge relation E)");
        c->add_option("--db", paths.db, "database file")->required();
        if (query) c->add_option("--query", paths.query, "query file")->required();
    };

    auto* en = app.add_subcommand("enumerate", "randomized enumeration");
    add_io(en, true);
    en->add_option("--mode", mode, "local|local-strengthened|general|general-strengthened|hanf")
        ->check(CLI::IsMember({"local", "local-strengthened", "general", "general-strengthened", "hanf"}));
    en->add_option("--gamma", gamma, "answer threshold fraction")->check(CLI::Range(1e-9, 1.0));
    en->add_option("--epsilon", eps, "closeness parameter")->check(CLI::Range(1e-9, 1.0));
    en->add_option("--seed", seed_text, "integer seed or 'auto'")->required();
    en->add_option("--tester", tester, "exact|sampling|absent-type");
    en->add_option("--max-outputs", max_outputs, "stop after this many tuples");
    en->add_option("--s-eff", s_eff, "override the expansion bound");
    en->add_flag("--force-testers", force, "use testers even below the full-check size");

    auto* ex = app.add_subcommand("exact-enumerate", "brute-force answer set");
    add_io(ex, true);

    auto* mem = app.add_subcommand("member", "approximate (or exact) membership");
    add_io(mem, true);
    mem->add_option("--tuple", tuple_text, "a1,...,ak")->required();
    mem->add_option("--epsilon", eps)->check(CLI::Range(1e-9, 1.0));
    mem->add_option("--seed", seed_text, "integer seed or 'auto'");
    mem->add_option("--tester", tester, "exact|sampling|absent-type");
    mem->add_flag("--exact", exact, "evaluate exactly");

    auto* cnt = app.add_subcommand("count", "approximate answer count");
    add_io(cnt, true);
    cnt->add_option("--epsilon", eps)->check(CLI::Range(1e-9, 1.0));
    cnt->add_option("--lambda", lambda)->check(CLI::Range(1e-9, 1.0));
    cnt->add_option("--seed", seed_text, "integer seed or 'auto'")->required();
    cnt->add_option("--tester", tester, "exact|sampling|absent-type");

    auto* tst = app.add_subcommand("test", "run the clause testers and print T");
    add_io(tst, true);
    tst->add_option("--epsilon", eps)->check(CLI::Range(1e-9, 1.0));
    tst->add_option("--seed", seed_text, "integer seed or 'auto'")->required();
    tst->add_option("--tester", tester, "exact|sampling|absent-type");
    tst->add_flag("--force-testers", force, "use testers even below the full-check size");

    int split_r = 1, degree = 1 << 16;
    auto* spl = app.add_subcommand("split", "print the unique r-split of a tuple");
    add_io(spl, false);
    spl->add_option("--tuple", tuple_text, "b1,...,bk")->required();
    spl->add_option("--r", split_r, "radius")->check(CLI::NonNegativeNumber);
    spl->add_option("--degree", degree, "degree bound for loading")->check(CLI::Range(2, 1 << 20));

    std::string sweep_text = "1000,10000,100000", workload = "leaf-pairs";
    uint64_t bench_outputs = 500;
    auto* bench = app.add_subcommand("bench-delay", "delay profile over a size sweep");
    bench->add_option("--sweep", sweep_text, "comma-separated sizes");
    bench->add_option("--mode", mode, "local|general")->check(CLI::IsMember({"local", "general"}));
    bench->add_option("--workload", workload, "leaf-pairs|empty")->check(CLI::IsMember({"leaf-pairs", "empty"}));
    bench->add_option("--gamma", gamma)->check(CLI::Range(1e-9, 1.0));
    bench->add_option("--outputs", bench_outputs, "outputs per run");
    bench->add_option("--seed", seed_text, "integer seed or 'auto'")->required();

    double scale = 0.1;
    int64_t trials = -1;
    bool fault = false;
    std::vector<int> only;
    auto* self = app.add_subcommand("selftest", "acceptance suites at reduced trial counts");
    self->add_option("--scale", scale, "trial multiplier")->check(CLI::Range(0.0, 10.0));
    self->add_option("--trials", trials, "fixed trial count for every criterion");
    self->add_option("--only", only, "criterion ids")->delimiter(',');
    self->add_flag("--inject-dedup-fault", fault, "disable duplicate suppression (negative control)");
    self->add_option("--seed", seed_text, "integer seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (en->parsed()) {
            Loaded l = load_all(paths);
            EnumOptions opt;
            opt.gamma = gamma;
            opt.eps = eps;
            opt.seed = resolve_seed(seed_text);
            opt.max_outputs = max_outputs;
            opt.force_testers = force;
            if (s_eff) opt.s_eff_override = s_eff;
            if (mode != "local" && mode != "local-strengthened") opt.testers = make_testers(l.q, tester_kind(tester));
            std::ostringstream out;
            EnumSummary s = run_mode(mode, *l.db, l.q, opt, [&](std::span<const Element> t) {
                print_tuple(out, t);
                return true;
            });
            std::cout << out.str();
            if (s.truncated)
                std::cout << "-- truncated after " << s.outputs << " outputs --\n";
            else
                std::cout << "-- end --\n";
            std::cerr << s.to_text() << "\n";
            return 0;
        }
        if (ex->parsed()) {
            Loaded l = load_all(paths);
            AnswerSet as = answer_set(*l.db, l.q);
            for (const auto& t : as.tuples) print_tuple(std::cout, t);
            std::cout << "-- end --\n";
            return 0;
        }
        if (mem->parsed()) {
            Loaded l = load_all(paths);
            auto t = parse_tuple(tuple_text);
            if (static_cast<int>(t.size()) != l.q.k) throw ArityMismatch("tuple length differs from query k");
            check_tuple(*l.db, t);
            bool ans;
            if (exact) {
                ans = eval_query(*l.db, t, l.q);
            } else {
                if (seed_text.empty()) throw ParseError("--seed is required unless --exact is given");
                auto idx = membership_preprocess(*l.db, l.q, eps, make_testers(l.q, tester_kind(tester)),
                                                 resolve_seed(seed_text));
                ans = membership_answer(idx, *l.db, t);
                std::cerr << "type_set=" << idx.types.members.size() << " exact_branch=" << idx.types.exact_branch
                          << "\n";
            }
            std::cout << (ans ? "yes" : "no") << "\n";
            return 0;
        }
        if (cnt->parsed()) {
            Loaded l = load_all(paths);
            CountEstimate e = approx_count(*l.db, l.q, eps, lambda, make_testers(l.q, tester_kind(tester)),
                                           resolve_seed(seed_text));
            std::cout << "estimate " << e.estimate << "\nhalf_width " << e.half_width << "\n";
            std::cerr << "c=" << e.c << " s_eff=" << e.s_eff << " type_set=" << e.types.members.size()
                      << " exact_branch=" << e.types.exact_branch << " samples_per_block="
                      << (e.samples.empty() ? 0 : e.samples[0]) << " confidence_budget=5/6*9/10\n";
            return 0;
        }
        if (tst->parsed()) {
            Loaded l = load_all(paths);
            TypeSetT T = compute_type_set(*l.db, l.q, eps, make_testers(l.q, tester_kind(tester)),
                                          resolve_seed(seed_text), force);
            std::cout << "exact_branch " << (T.exact_branch ? "yes" : "no") << "\n";
            if (T.exact_branch) {
                ExactEvaluator ev(*l.db, l.q);
                for (size_t i = 0; i < l.q.clauses.size(); ++i)
                    std::cout << "clause " << i + 1 << " " << (ev.clause_satisfiable(l.q.clauses[i]) ? "accept" : "reject")
                              << " exact\n";
            }
            for (const auto& [i, v] : T.provenance)
                std::cout << "clause " << i + 1 << " " << (v.accept ? "accept" : "reject") << " " << to_string(v.model)
                          << " repetitions=" << v.repetitions << " samples=" << v.samples
                          << (v.exact_branch ? " full-check" : "") << "\n";
            std::cout << "T";
            for (size_t i = 0; i < l.q.clauses.size(); ++i)
                if (T.contains(l.q.clauses[i].sphere.type)) std::cout << " clause" << i + 1;
            std::cout << "\n";
            return 0;
        }
        if (spl->parsed()) {
            SchemaPtr schema = load_schema(paths.schema);
            Database db = load_database(schema, slurp(paths.db), degree);
            auto t = parse_tuple(tuple_text);
            check_tuple(db, t);
            TypeRegistry reg;
            RSplit C = unique_split_of(db, t, split_r, reg);
            std::cout << "k=" << C.k << " r=" << C.r << " anchor_radius=" << C.radius << " groups=" << C.groups.size()
                      << "\n";
            for (const auto& g : C.groups) {
                std::cout << "group coords";
                for (int c : g.coords) std::cout << ' ' << c + 1;
                std::cout << " leader " << t[g.coords[0]] << " anchor_size " << reg.info(g.anchor).cardinality
                          << " binding";
                for (uint32_t b : g.binding) std::cout << ' ' << b;
                std::cout << "\n";
            }
            return 0;
        }
        if (bench->parsed()) {
            std::vector<uint32_t> sizes;
            std::stringstream ss(sweep_text);
            std::string part;
            while (std::getline(ss, part, ',')) {
                try {
                    size_t used = 0;
                    const long v = std::stol(part, &used);
                    if (used != part.size() || v < 16) throw ParseError("sweep sizes must be integers >= 16");
                    sizes.push_back(static_cast<uint32_t>(v));
                } catch (const std::logic_error&) {
                    throw ParseError("bad sweep entry '" + part + "'");
                }
            }
            if (sizes.empty()) throw ParseError("empty sweep");
            const uint64_t seed = resolve_seed(seed_text);
            std::cout << "n\tmax_ops\tp99_ops\tend_ops\toutputs\tbound_ops\n";
            for (uint32_t n : sizes) {
                auto reg = std::make_shared<TypeRegistry>();
                Database n1 = gen::pattern_graph(1);
                gen::Copies cp = gen::disjoint_copies({&n1}, {n / 8}, n % 8, derive_seed(seed, "bench-db", n), 3);
                TypeId t;
                if (workload == "leaf-pairs") {
                    std::vector<Element> rep{cp.maps[0][4], cp.maps[1][4]};
                    t = tuple_type_direct(cp.db, rep, 2, *reg);
                } else {
                    // A pair type no N1 copy realises.
                    t = gen::pattern_type(3, *reg);
                }
                QueryNF q = gen::local_query(cp.db.schema_ptr(), reg, 2, 2, 3, {t});
                EnumOptions opt;
                opt.gamma = gamma;
                opt.seed = derive_seed(seed, "bench-run", n);
                opt.max_outputs = bench_outputs;
                auto sink = [](std::span<const Element>) { return true; };
                EnumSummary s = mode == "local" ? enumerate_local(cp.db, q, opt, sink)
                                                : enumerate_general(cp.db, q, opt, sink);
                std::cout << n << '\t' << s.max_delay << '\t' << s.p99_delay << '\t' << s.end_delay << '\t'
                          << s.outputs << '\t' << s.analytic_bound << "\n";
            }
            return 0;
        }
        if (self->parsed()) {
            suites::Options o;
            o.scale = scale;
            if (trials >= 0) o.trials = static_cast<uint64_t>(trials);
            o.inject_dedup_fault = fault;
            if (!seed_text.empty()) o.seed = resolve_seed(seed_text);
            if (trials == 0) std::cerr << "warning: zero trials, every criterion passes vacuously\n";
            bool ok = true;
            for (const auto& r : suites::run(o, only)) {
                std::cout << suites::format(r) << "\n" << std::flush;
                ok = ok && r.pass;
            }
            return ok ? 0 : 1;
        }
    } catch (const NotLocal& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMode;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return 0;
}
