#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "aqe/exact.hpp"

namespace aqe {

enum class ErrorModel { Exact, OneSided, TwoSided };
const char* to_string(ErrorModel m);

struct TesterVerdict {
    bool accept = false;
    uint64_t samples = 0;
    uint64_t seed = 0;
    int repetitions = 1;
    ErrorModel model = ErrorModel::Exact;
    bool exact_branch = false;  // decided by a full check
};

// Tests the sentence "exists x: sph_tau(x) and the clause's Hanf sentences".
class ClauseTester {
public:
    virtual ~ClauseTester() = default;
    virtual TesterVerdict run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                              uint64_t seed) const = 0;
    virtual ErrorModel model() const = 0;
    virtual std::string name() const = 0;
};

using TesterPtr = std::shared_ptr<const ClauseTester>;

// Full evaluation. Never wrong, linear in n.
class ExactClauseTester : public ClauseTester {
public:
    TesterVerdict run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                      uint64_t seed) const override;
    ErrorModel model() const override { return ErrorModel::Exact; }
    std::string name() const override { return "exact"; }
};

// Generic sampler. Sphere existence and positive sentences are accepted once
// the cost of inserting isolated copies of their types fits in eps*d*n edits
// (full check otherwise); each negated sentence NOT exists>=m t is estimated
// from uniformly sampled vertices.
class SamplingClauseTester : public ClauseTester {
public:
    TesterVerdict run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                      uint64_t seed) const override;
    ErrorModel model() const override { return ErrorModel::TwoSided; }
    std::string name() const override { return "sampling"; }

    // Edits needed to plant an isolated copy of a type's representative.
    static uint64_t insertion_cost(const TypeInfo& t, int d);
    static uint64_t sample_size(int negated_types, double eps, int d);
};

// The constant-time tester for "exists xy sph_t2(x,y) and no vertex of type t4"
// on graphs. Only accepts that clause (TypeMismatch otherwise).
class AbsentTypeTester : public ClauseTester {
public:
    explicit AbsentTypeTester(RegistryPtr reg);
    TesterVerdict run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                      uint64_t seed) const override;
    ErrorModel model() const override { return ErrorModel::OneSided; }
    std::string name() const override { return "absent-type"; }

    bool matches(const Clause& c) const;
    TypeId t2() const { return t2_; }
    TypeId t4() const { return t4_; }

private:
    RegistryPtr reg_;
    TypeId t2_, t4_;
};

// The bare four-step tester for the property itself. Throws SchemaMismatch.
TesterVerdict absent_type_tester(const Database& db, double eps, uint64_t seed, TypeRegistry& reg);
uint64_t absent_type_samples(double eps, int d);

// Repetitions needed to push a base tester with error 1/3 to `target`
// confidence under the given error model.
int repetitions_for(ErrorModel model, double target);

class AmplifiedTester : public ClauseTester {
public:
    AmplifiedTester(TesterPtr base, double target);
    TesterVerdict run(const Database& db, const QueryNF& q, const Clause& c, double eps,
                      uint64_t seed) const override;
    ErrorModel model() const override { return base_->model(); }
    std::string name() const override { return base_->name(); }
    int repetitions() const { return reps_; }

private:
    TesterPtr base_;
    int reps_;
};

TesterPtr amplify(TesterPtr base, double target);

enum class TesterKind { Exact, Sampling, AbsentType };

// One tester per clause. AbsentType is used for the clauses it matches and the
// sampling tester for the rest.
std::vector<TesterPtr> make_testers(const QueryNF& q, TesterKind kind);

struct TypeSetT {
    std::vector<TypeId> members;  // sorted, distinct
    // (clause index, verdict) for every tester run; empty on the exact branch.
    std::vector<std::pair<size_t, TesterVerdict>> provenance;
    bool exact_branch = false;
    int repetitions = 0;

    bool contains(TypeId t) const;
};

// Small inputs (n < 8k/eps) get the exact set unless force_testers is set.
// Throws MissingTester when a clause has no tester.
TypeSetT compute_type_set(const Database& db, const QueryNF& q, double eps, const std::vector<TesterPtr>& testers,
                          uint64_t seed, bool force_testers = false);
TypeSetT exact_type_set(const Database& db, const QueryNF& q);

}  // namespace aqe
