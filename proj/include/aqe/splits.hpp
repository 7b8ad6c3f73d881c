#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "aqe/neighbourhood.hpp"

namespace aqe {

// Radius of the anchor types: 3rk, widened so that the r-ball of every group
// member fits inside (matters for r = 0 and k = 1).
int anchor_radius(int r, int k);

struct SplitGroup {
    std::vector<int> coords;         // 0-based tuple positions, increasing; coords[0] leads
    std::vector<uint32_t> binding;   // representative positions of coords[1..]
    TypeId anchor = kNoType;         // anchor-radius type of the leader
};

struct RSplit {
    int k = 0;
    int r = 0;
    int radius = 0;  // anchor radius
    std::vector<SplitGroup> groups;

    bool operator==(const RSplit& o) const;
};

// Groups are the connected components of N_r(b) (see centre_groups),
// numbered by their smallest coordinate.
RSplit unique_split_of(const Database& db, std::span<const Element> b, int r, TypeRegistry& reg);

// The tuple found from leaders `a` and split C, if any.
std::optional<std::vector<Element>> found_from(const Database& db, std::span<const Element> a, const RSplit& C,
                                               TypeRegistry& reg);

// Is (centre, binding...) r-connected inside the anchor representative?
bool binding_is_r_good(const TypeInfo& anchor, const std::vector<uint32_t>& binding, int r);

// Candidate expansion against a type set: all k-tuples whose r-type is in T
// and whose group leaders are exactly `a`.
class SplitEngine {
public:
    SplitEngine(LocalTypeCache& cache, std::vector<TypeId> T, int k);

    // Appends to out (flattened, k entries per tuple). Returns the count added.
    size_t candidates(std::span<const Element> a, std::vector<Element>& out);
    bool has_candidate(std::span<const Element> a);

    // Largest group count among types in T (1 if T is empty).
    int conn() const { return conn_; }
    int k() const { return k_; }
    // A priori bound on the candidate count of any leader tuple.
    uint64_t s_eff() const { return s_eff_; }
    LocalTypeCache& cache() { return *cache_; }

private:
    struct Comp {
        int leader;                 // position
        TypeId leader_type;         // r-type of the leader element
        std::vector<int> others;    // positions
        int reach;
    };
    struct Plan {
        TypeId type;
        std::vector<Comp> comps;
    };

    template <typename Visit>
    bool for_each(std::span<const Element> a, Visit&& visit);
    const std::vector<Element>& ball(Element a, int radius);

    LocalTypeCache* cache_;
    int k_;
    int conn_ = 1;
    uint64_t s_eff_ = 0;
    std::vector<std::vector<Plan>> by_count_;  // index = group count
    std::unordered_map<uint64_t, std::vector<Element>> balls_;
    std::vector<Element> scratch_;
};

// Sum over types with l groups of the product, over non-leader centres, of the
// number of elements a bounded-degree graph can have within the centre's
// distance from its leader; maximised over l.
uint64_t a_priori_s_eff(const std::vector<TypeId>& T, TypeRegistry& reg, int gaifman_degree, int k);

std::vector<std::vector<Element>> candidate_found_tuples(LocalTypeCache& cache, std::span<const Element> a,
                                                         const std::vector<TypeId>& T, int k);

}  // namespace aqe
