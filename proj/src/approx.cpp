#include "aqe/approx.hpp"

#include <algorithm>
#include <cmath>

#include "aqe/errors.hpp"

namespace aqe {

MembershipIndex membership_preprocess(const Database& db, const QueryNF& q, double eps,
                                      const std::vector<TesterPtr>& testers, uint64_t seed, bool force_testers) {
    MembershipIndex idx;
    idx.types = compute_type_set(db, q, eps, testers, seed, force_testers);
    idx.query = &q;
    idx.eps = eps;
    idx.seed = seed;
    return idx;
}

bool membership_answer(const MembershipIndex& idx, const Database& db, std::span<const Element> a) {
    if (static_cast<int>(a.size()) != idx.query->k) throw ArityMismatch("tuple length differs from query k");
    return idx.types.contains(tuple_type_direct(db, a, idx.query->r, *idx.query->registry));
}

double DistributionVector::total() const {
    double t = 0;
    for (const auto& [_, v] : entries) t += v;
    return t;
}

double DistributionVector::l1_distance(const DistributionVector& o) const {
    double d = 0;
    auto i = entries.begin();
    auto j = o.entries.begin();
    while (i != entries.end() || j != o.entries.end()) {
        if (j == o.entries.end() || (i != entries.end() && i->first < j->first)) {
            d += std::abs(i->second);
            ++i;
        } else if (i == entries.end() || j->first < i->first) {
            d += std::abs(j->second);
            ++j;
        } else {
            d += std::abs(i->second - j->second);
            ++i;
            ++j;
        }
    }
    return d;
}

namespace {

DistributionVector normalise(const std::map<TypeId, uint64_t>& counts, uint64_t total) {
    DistributionVector v;
    for (const auto& [t, c] : counts) v.entries[t] = static_cast<double>(c) / static_cast<double>(total);
    return v;
}

}  // namespace

DistributionVector exact_distribution(LocalTypeCache& cache, int k) {
    const uint64_t n = cache.db().n();
    IndexSpace space = IndexSpace::tuples(n, k);
    if (space.size() > 200'000'000ULL) throw BudgetExceeded("exhaustive distribution over too many tuples");
    std::map<TypeId, uint64_t> counts;
    std::vector<Element> t(k);
    for (uint64_t i = 0; i < space.size(); ++i) {
        space.decode(i, t.data());
        ++counts[cache.tuple_type(t)];
    }
    return normalise(counts, space.size());
}

DistributionVector estimate_frequencies(LocalTypeCache& cache, int k, uint64_t s, uint64_t seed, bool exhaustive) {
    if (exhaustive) return exact_distribution(cache, k);
    if (s == 0) throw Error("sample count must be positive");
    const uint32_t n = cache.db().n();
    if (n == 0) throw Error("cannot sample from an empty domain");
    Rng rng(seed);
    std::map<TypeId, uint64_t> counts;
    std::vector<Element> t(k);
    for (uint64_t i = 0; i < s; ++i) {
        for (auto& e : t) e = static_cast<Element>(1 + rng.below(n));
        ++counts[cache.tuple_type(t)];
    }
    return normalise(counts, s);
}

uint64_t frequency_sample_size(uint64_t c, double lambda) {
    const double cc = static_cast<double>(c);
    return static_cast<uint64_t>(std::ceil(cc * cc / (lambda * lambda) * std::log(20.0 * cc) - 1e-9));
}

uint64_t count_sample_size(uint64_t s_eff, int c, double lambda) {
    const double s = static_cast<double>(s_eff);
    return static_cast<uint64_t>(std::ceil(s * s * std::log(20.0 * c) / (2 * lambda * lambda) - 1e-9));
}

CountEstimate approx_count(const Database& db, const QueryNF& q, double eps, double lambda,
                           const std::vector<TesterPtr>& testers, uint64_t seed, bool force_testers,
                           LocalTypeCache* cache) {
    if (!(lambda > 0 && lambda <= 1)) throw Error("lambda must lie in (0,1]");
    CountEstimate out;
    out.types = compute_type_set(db, q, eps, testers, derive_seed(seed, "type-set"), force_testers);
    std::unique_ptr<LocalTypeCache> own;
    if (!cache) {
        own = std::make_unique<LocalTypeCache>(db, q.r, q.registry);
        cache = own.get();
    }
    SplitEngine eng(*cache, out.types.members, q.k);
    out.c = eng.conn();
    out.s_eff = eng.s_eff();
    const double n = db.n();
    out.half_width = lambda * out.c * std::pow(n, out.c);
    if (out.types.members.empty() || db.n() == 0) {
        out.samples.assign(out.c, 0);
        return out;
    }
    const uint64_t s = count_sample_size(out.s_eff, out.c, lambda);
    std::vector<Element> a, scratch;
    for (int i = 1; i <= out.c; ++i) {
        Rng rng(derive_seed(seed, "count-block", i));
        a.assign(i, 0);
        uint64_t total = 0;
        for (uint64_t j = 0; j < s; ++j) {
            for (auto& e : a) e = static_cast<Element>(1 + rng.below(db.n()));
            scratch.clear();
            total += eng.candidates(a, scratch);
        }
        out.samples.push_back(s);
        out.estimate += std::pow(n, i) * static_cast<double>(total) / static_cast<double>(s);
    }
    return out;
}

}  // namespace aqe
