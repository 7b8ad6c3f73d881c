#include "aqe/testers.hpp"

#include <algorithm>
#include <cmath>

#include "aqe/errors.hpp"
#include "aqe/generators.hpp"
#include "aqe/rng.hpp"
#include "aqe/stats.hpp"

namespace aqe {

const char* to_string(ErrorModel m) {
    switch (m) {
        case ErrorModel::Exact: return "exact";
        case ErrorModel::OneSided: return "one-sided";
        case ErrorModel::TwoSided: return "two-sided";
    }
    return "?";
}

TesterVerdict ExactClauseTester::run(const Database& db, const QueryNF& q, const Clause& c, double,
                                     uint64_t seed) const {
    ExactEvaluator ev(db, q);
    return TesterVerdict{ev.clause_satisfiable(c), db.n(), seed, 1, ErrorModel::Exact, true};
}

uint64_t SamplingClauseTester::insertion_cost(const TypeInfo& t, int d) {
    return static_cast<uint64_t>(t.cardinality) * d + t.representative.fragment.tuple_count();
}

uint64_t SamplingClauseTester::sample_size(int negated_types, double eps, int d) {
    const double c = negated_types + 1;
    const double lambda = std::min(eps * d / 6.0, 0.25);
    return static_cast<uint64_t>(std::ceil(c * c / (lambda * lambda) * std::log(20.0 * c)));
}

TesterVerdict SamplingClauseTester::run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                                        uint64_t seed) const {
    TypeRegistry& reg = *q.registry;
    const double budget = eps * db.d() * static_cast<double>(db.n());
    double ins = static_cast<double>(insertion_cost(reg.info(c.sphere.type), db.d()));
    std::vector<const HanfSentence*> negs;
    for (const auto& h : c.sentences) {
        if (h.negated)
            negs.push_back(&h);
        else
            ins += static_cast<double>(h.threshold) * static_cast<double>(insertion_cost(reg.info(h.type), db.d()));
    }
    if (ins > budget) {
        ExactEvaluator ev(db, q);
        return TesterVerdict{ev.clause_satisfiable(c), db.n(), seed, 1, ErrorModel::TwoSided, true};
    }
    TesterVerdict v{true, 0, seed, 1, ErrorModel::TwoSided, false};
    if (negs.empty()) return v;
    std::stable_sort(negs.begin(), negs.end(),
                     [](const HanfSentence* a, const HanfSentence* b) { return a->radius < b->radius; });
    const int ntypes = static_cast<int>(negs.size());
    const uint64_t s = sample_size(ntypes, eps, db.d());
    const double lambda = std::min(eps * db.d() / 6.0, 0.25);
    std::vector<uint64_t> hits(negs.size(), 0);
    Rng rng(seed);
    for (uint64_t i = 0; i < s; ++i) {
        Element a[1] = {static_cast<Element>(1 + rng.below(db.n()))};
        // One extraction per distinct radius.
        int last_r = -1;
        TypeId t = kNoType;
        for (size_t j = 0; j < negs.size(); ++j) {
            if (negs[j]->radius != last_r) {
                t = tuple_type_direct(db, a, negs[j]->radius, reg);
                last_r = negs[j]->radius;
            }
            if (t == negs[j]->type) ++hits[j];
        }
    }
    v.samples = s;
    const double n = db.n();
    for (size_t j = 0; j < negs.size(); ++j) {
        const double est = n * static_cast<double>(hits[j]) / static_cast<double>(s);
        const double m = negs[j]->threshold;
        if (est >= m + std::max(m / 2.0, lambda * n / 2.0)) v.accept = false;
    }
    return v;
}

AbsentTypeTester::AbsentTypeTester(RegistryPtr reg)
    : reg_(std::move(reg)), t2_(gen::pattern_type(2, *reg_)), t4_(gen::pattern_type(4, *reg_)) {}

bool AbsentTypeTester::matches(const Clause& c) const {
    return c.sphere.type == t2_ && c.sphere.radius == 2 && c.sentences.size() == 1 &&
           c.sentences[0] == HanfSentence{true, 1, t4_, 2};
}

uint64_t absent_type_samples(double eps, int d) {
    return static_cast<uint64_t>(std::ceil(std::log(1.0 / 3.0) / std::log(1.0 - eps * d / 3.0)));
}

namespace {

TesterVerdict absent_type_run(const Database& db, double eps, uint64_t seed, TypeRegistry& reg, TypeId t2, TypeId t4) {
    if (!db.schema().is_single_symmetric_binary())
        throw SchemaMismatch("the absent-type tester needs a single undirected edge relation");
    const double d = db.d();
    TesterVerdict v{true, 0, seed, 1, ErrorModel::OneSided, false};
    if (static_cast<double>(db.n()) < 24.0 * d * d * d / eps) {
        v.exact_branch = true;
        v.samples = db.n();
        v.accept = count_type(db, t4, 2, reg) == 0 && exists_tuple_of_type(db, t2, 2, reg);
        return v;
    }
    const uint64_t alpha = absent_type_samples(eps, db.d());
    Rng rng(seed);
    for (uint64_t i = 0; i < alpha; ++i) {
        Element a[1] = {static_cast<Element>(1 + rng.below(db.n()))};
        ++v.samples;
        if (tuple_type_direct(db, a, 2, reg) == t4) {
            v.accept = false;
            break;
        }
    }
    return v;
}

}  // namespace

TesterVerdict AbsentTypeTester::run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                                   uint64_t seed) const {
    if (q.registry != reg_) throw TypeMismatch("tester and query use different type registries");
    if (!matches(c)) throw TypeMismatch("the absent-type tester only handles sph_t2 and NOT exists t4");
    return absent_type_run(db, eps, seed, *reg_, t2_, t4_);
}

TesterVerdict absent_type_tester(const Database& db, double eps, uint64_t seed, TypeRegistry& reg) {
    return absent_type_run(db, eps, seed, reg, gen::pattern_type(2, reg), gen::pattern_type(4, reg));
}

int repetitions_for(ErrorModel model, double target) {
    const double fail = 1.0 - target;
    if (model == ErrorModel::Exact || fail >= 1.0 / 3.0 - 1e-12) return 1;
    if (fail <= 0) throw Error("target confidence must be below 1");
    if (model == ErrorModel::OneSided)
        return std::max(1, static_cast<int>(std::ceil(std::log(fail) / std::log(1.0 / 3.0) - 1e-12)));
    for (int r = 1;; r += 2)
        if (stats::majority_error(r, 1.0 / 3.0) <= fail + 1e-15) return r;
}

AmplifiedTester::AmplifiedTester(TesterPtr base, double target)
    : base_(std::move(base)), reps_(repetitions_for(base_->model(), target)) {}

TesterVerdict AmplifiedTester::run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                                   uint64_t seed) const {
    TesterVerdict out{false, 0, seed, reps_, base_->model(), false};
    int accepts = 0;
    for (int i = 0; i < reps_; ++i) {
        TesterVerdict v = base_->run(db, q, c, eps, reps_ == 1 ? seed : derive_seed(seed, "repeat", i));
        out.samples += v.samples;
        out.exact_branch = out.exact_branch || v.exact_branch;
        if (v.accept) ++accepts;
        // A full check is final; a one-sided reject is final.
        if (v.exact_branch) {
            out.accept = v.accept;
            out.repetitions = i + 1;
            return out;
        }
        if (base_->model() == ErrorModel::OneSided && !v.accept) {
            out.repetitions = i + 1;
            return out;
        }
    }
    out.accept = base_->model() == ErrorModel::TwoSided ? 2 * accepts > reps_ : accepts == reps_;
    return out;
}

TesterPtr amplify(TesterPtr base, double target) {
    return std::make_shared<AmplifiedTester>(std::move(base), target);
}

std::vector<TesterPtr> make_testers(const QueryNF& q, TesterKind kind) {
    std::vector<TesterPtr> out;
    auto exact = std::make_shared<ExactClauseTester>();
    auto sampling = std::make_shared<SamplingClauseTester>();
    std::shared_ptr<AbsentTypeTester> ex;
    if (kind == TesterKind::AbsentType) {
        if (!q.schema->is_single_symmetric_binary())
            throw SchemaMismatch("the absent-type tester needs a single undirected edge relation");
        ex = std::make_shared<AbsentTypeTester>(q.registry);
    }
    for (const auto& c : q.clauses) {
        if (kind == TesterKind::Exact)
            out.push_back(exact);
        else if (ex && ex->matches(c))
            out.push_back(ex);
        else
            out.push_back(sampling);
    }
    return out;
}

bool TypeSetT::contains(TypeId t) const { return std::binary_search(members.begin(), members.end(), t); }

TypeSetT exact_type_set(const Database& db, const QueryNF& q) {
    TypeSetT T;
    T.exact_branch = true;
    ExactEvaluator ev(db, q);
    for (const auto& c : q.clauses)
        if (!T.contains(c.sphere.type) && ev.clause_satisfiable(c)) {
            T.members.push_back(c.sphere.type);
            std::sort(T.members.begin(), T.members.end());
        }
    return T;
}

TypeSetT compute_type_set(const Database& db, const QueryNF& q, double eps, const std::vector<TesterPtr>& testers,
                          uint64_t seed, bool force_testers) {
    if (testers.size() != q.clauses.size())
        throw MissingTester("expected one tester per clause (" + std::to_string(q.clauses.size()) + "), got " +
                            std::to_string(testers.size()));
    for (size_t i = 0; i < testers.size(); ++i)
        if (!testers[i]) throw MissingTester("clause " + std::to_string(i + 1) + " has no tester");
    if (!force_testers && static_cast<double>(db.n()) < 8.0 * q.k / eps) return exact_type_set(db, q);
    TypeSetT T;
    const size_t m = q.clauses.size();
    if (m == 0) return T;
    const double target = std::pow(5.0 / 6.0, 1.0 / static_cast<double>(m));
    for (size_t i = 0; i < m; ++i) {
        AmplifiedTester tester(testers[i], target);
        T.repetitions = std::max(T.repetitions, tester.repetitions());
        TesterVerdict v = tester.run(db, q, q.clauses[i], eps / 2, derive_seed(seed, "clause", i));
        T.provenance.emplace_back(i, v);
        if (v.accept) T.members.push_back(q.clauses[i].sphere.type);
    }
    std::sort(T.members.begin(), T.members.end());
    T.members.erase(std::unique(T.members.begin(), T.members.end()), T.members.end());
    return T;
}

}  // namespace aqe
