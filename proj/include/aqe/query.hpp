#pragma once

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "aqe/neighbourhood.hpp"

namespace aqe {

struct SphereAtom {
    TypeId type = kNoType;
    int radius = 0;
};

// sign: count >= threshold, or its negation.
struct HanfSentence {
    bool negated = false;
    uint32_t threshold = 1;
    TypeId type = kNoType;  // one centre
    int radius = 0;

    bool operator==(const HanfSentence& o) const = default;
    bool operator<(const HanfSentence& o) const {
        return std::tie(type, radius, threshold, negated) <
               std::tie(o.type, o.radius, o.threshold, o.negated);
    }
};

struct Clause {
    SphereAtom sphere;
    std::vector<HanfSentence> sentences;  // conjunction, kept sorted
};

// Disjunction of clauses sph_tau(x) AND (signed Hanf sentences).
struct QueryNF {
    int k = 1;
    int r = 0;
    int d = 2;
    SchemaPtr schema;
    RegistryPtr registry;
    std::vector<Clause> clauses;
};

// Grammar:
//   QUERY k=<k> r=<r> d=<d>
//   CLAUSE
//   SPHERE
//   DOMAIN <m>
//   CENTRES <c1> .. <ck>
//   <rel> <e1> .. <e_ar>
//   HANF <+|-> >= <m> [r=<r'>]     (or HANF + = <m>)
//   <neighbourhood block with one centre>
//   END
// Throws ParseError, RadiusMismatch, CentreCountMismatch, DegreeExceeded.
QueryNF parse_query(std::string_view text, SchemaPtr schema, RegistryPtr registry);
std::string print_query(const QueryNF& q);

// Parses one neighbourhood block (DOMAIN/CENTRES/tuples) and validates it
// against radius r and degree bound d.
Neighbourhood parse_neighbourhood(std::string_view text, SchemaPtr schema, int r, int d);
std::string print_neighbourhood(const Neighbourhood& nb);

int compute_conn(const QueryNF& q);
bool is_local(const QueryNF& q);
// Sorted distinct clause sphere types.
std::vector<TypeId> clause_types(const QueryNF& q);

// Structural equality (same registry assumed).
bool same_query(const QueryNF& a, const QueryNF& b);

}  // namespace aqe
