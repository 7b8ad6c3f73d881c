#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "aqe/query.hpp"

namespace aqe {

// Reference evaluation by direct neighbourhood extraction. Linear-time scans
// are fine here; this module is the yardstick for the sampling algorithms.

// r-type of a tuple by extraction + canonicalisation.
TypeId tuple_type_direct(const Database& db, std::span<const Element> t, int r, TypeRegistry& reg);

bool eval_sphere(const Database& db, std::span<const Element> a, const SphereAtom& s, TypeRegistry& reg);
uint64_t count_type(const Database& db, TypeId t, int r, TypeRegistry& reg);
// Histogram of element r-types over the whole domain.
std::map<TypeId, uint64_t> type_census(const Database& db, int r, TypeRegistry& reg);
bool eval_hanf(const Database& db, const HanfSentence& h, TypeRegistry& reg);
bool eval_query(const Database& db, std::span<const Element> a, const QueryNF& q);

// Caches element censuses so repeated evaluations on one database only pay
// for the tuple's own neighbourhood.
class ExactEvaluator {
public:
    ExactEvaluator(const Database& db, const QueryNF& q);

    uint64_t count(TypeId t, int r);
    bool sentence(const HanfSentence& h);
    bool sentences_hold(const Clause& c);
    bool eval(std::span<const Element> a);
    // Does the database satisfy "exists x: sph_tau(x) and sentences"?
    bool clause_satisfiable(const Clause& c);

    const Database& db() const { return *db_; }
    const QueryNF& query() const { return *q_; }

private:
    const Database* db_;
    const QueryNF* q_;
    std::map<int, std::map<TypeId, uint64_t>> census_;
};

struct AnswerSet {
    std::vector<std::vector<Element>> tuples;  // sorted, duplicate-free
    bool contains(std::span<const Element> t) const;
};

// Brute force over D^k. Throws BudgetExceeded when n^k > budget.
AnswerSet answer_set(const Database& db, const QueryNF& q, uint64_t budget = 20'000'000);

// Constant-time membership for local queries: one extraction, one
// canonicalisation, one lookup. Throws NotLocal.
bool local_member(const Database& db, std::span<const Element> a, const QueryNF& q);

struct ClosenessStats {
    uint64_t nodes = 0;
    int budget = 0;
    bool short_circuit = false;
};

// Is `a` epsilon-close to being an answer: some database within
// floor(eps*d*n) tuple insertions/deletions, degree <= d, in which `a` is an
// answer and keeps its r-type? Exhaustive; throws BudgetExceeded when the edit
// budget exceeds `edit_budget_cap` or the search visits more than
// `node_cap` edit sets.
bool closeness_check(const Database& db, std::span<const Element> a, const QueryNF& q, double eps,
                     int edit_budget_cap, uint64_t node_cap = 50'000'000, ClosenessStats* stats = nullptr);

// Does the database contain a tuple of type t? Uses leader balls, so the work
// is linear in n for connected t.
bool exists_tuple_of_type(const Database& db, TypeId t, int r, TypeRegistry& reg);

}  // namespace aqe
