#pragma once

#include <cstdint>
#include <vector>

#include "aqe/query.hpp"

namespace aqe::gen {

// The four 8-vertex pattern graphs. Vertex 1 and vertex 4 are the two centres;
// 2 and 3 hang off 1, and 5..8 are the leaves (5,6 under 2; 7,8 under 3).
//   1: tree edges only
//   2: tree + {5,6}
//   3: tree + {5,6} + {7,8}
//   4: same edges as 1, centred at vertex 1 only
Database pattern_graph(int which, int d = 3);
Neighbourhood pattern_neighbourhood(int which, int d = 3);
// 2-type of the pattern neighbourhood (two centres for 1..3, one for 4).
TypeId pattern_type(int which, TypeRegistry& reg, int d = 3);

struct Copies {
    Database db;
    // maps[c][v - 1] = global id of vertex v of copy c.
    std::vector<std::vector<Element>> maps;
    std::vector<Element> isolated;
};

// Disjoint union of parts[i] repeated counts[i] times, plus `isolated` extra
// elements. Global ids are a seeded random permutation (seed 0 keeps the
// natural block order). All parts share one schema.
Copies disjoint_copies(const std::vector<const Database*>& parts, const std::vector<uint32_t>& counts,
                       uint32_t isolated, uint64_t seed, int d);

// Random graph with max degree d: `edges` attempted insertions of uniform
// non-loop pairs, skipped when they would break the degree bound.
Database random_graph(uint32_t n, int d, uint64_t edges, uint64_t seed);

// Schema {E 2 symmetric, R 3} with random edges and triples, degree <= d.
Database random_mixed(uint32_t n, int d, uint64_t edges, uint64_t triples, uint64_t seed);
SchemaPtr mixed_schema();

// chi = sph_t1 OR (sph_t2 AND NOT exists>=1 sph_t4), k=2, r=2, d=3.
QueryNF two_clause_query(RegistryPtr reg);

// Local query: one empty-sentence clause per type.
QueryNF local_query(SchemaPtr schema, RegistryPtr reg, int k, int r, int d, const std::vector<TypeId>& types);

// One copy of pattern 1 and m copies of pattern 2, relabelled by seed.
Copies n1_with_n2_copies(uint32_t m, uint64_t seed);

// Fisher-Yates permutation of 1..n (index 0 unused: perm[v] = image of v).
std::vector<Element> random_permutation(uint32_t n, uint64_t seed);

}  // namespace aqe::gen
