#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "aqe/enumerate.hpp"

namespace aqe {

struct MembershipIndex {
    TypeSetT types;
    const QueryNF* query = nullptr;
    double eps = 0;
    uint64_t seed = 0;
};

MembershipIndex membership_preprocess(const Database& db, const QueryNF& q, double eps,
                                      const std::vector<TesterPtr>& testers, uint64_t seed,
                                      bool force_testers = false);
// One extraction and canonicalisation of `a`, then a lookup in T.
bool membership_answer(const MembershipIndex& idx, const Database& db, std::span<const Element> a);

struct DistributionVector {
    std::map<TypeId, double> entries;

    double total() const;
    double l1_distance(const DistributionVector& o) const;
};

// Empirical type distribution of s uniform k-tuples. With exhaustive set, the
// whole of D^k is scanned instead and s is ignored.
DistributionVector estimate_frequencies(LocalTypeCache& cache, int k, uint64_t s, uint64_t seed,
                                        bool exhaustive = false);
DistributionVector exact_distribution(LocalTypeCache& cache, int k);

// ceil(c^2 / lambda^2 * ln(20 c)).
uint64_t frequency_sample_size(uint64_t c, double lambda);

struct CountEstimate {
    double estimate = 0;
    double half_width = 0;  // lambda * c * n^c
    int c = 1;
    uint64_t s_eff = 0;
    std::vector<uint64_t> samples;  // per block length 1..c
    TypeSetT types;
};

// Samples leader tuples of each length i <= c and scales the mean candidate
// count by n^i.
CountEstimate approx_count(const Database& db, const QueryNF& q, double eps, double lambda,
                           const std::vector<TesterPtr>& testers, uint64_t seed, bool force_testers = false,
                           LocalTypeCache* cache = nullptr);
// Per-block sample size: enough for a Hoeffding deviation of lambda on values
// in [0, s_eff] with failure 1/(10c).
uint64_t count_sample_size(uint64_t s_eff, int c, double lambda);

}  // namespace aqe
