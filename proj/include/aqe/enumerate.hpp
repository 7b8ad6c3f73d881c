#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "aqe/rng.hpp"
#include "aqe/splits.hpp"
#include "aqe/testers.hpp"

namespace aqe {

// Index space over D^k, or over D^1 u ... u D^c in consecutive blocks. Inside a
// block, tuples are numbered lexicographically with the first coordinate most
// significant.
class IndexSpace {
public:
    static IndexSpace tuples(uint64_t n, int k);
    static IndexSpace prefix_union(uint64_t n, int c);

    uint64_t size() const { return size_; }
    uint64_t n() const { return n_; }
    int max_len() const { return max_len_; }
    // Writes the tuple into out (capacity max_len) and returns its length.
    int decode(uint64_t index, Element* out) const;
    uint64_t encode(std::span<const Element> t) const;

private:
    IndexSpace(uint64_t n, int min_len, int max_len);
    uint64_t n_;
    int min_len_, max_len_;
    std::vector<uint64_t> start_;  // start_[len - min_len]
    uint64_t size_;
};

// Bit set that costs nothing to initialise: small spaces use calloc'd words
// (pages are zero-filled on first touch), huge ones fall back to a hash set.
class LazyFlags {
public:
    explicit LazyFlags(uint64_t size);
    ~LazyFlags();
    LazyFlags(const LazyFlags&) = delete;
    LazyFlags& operator=(const LazyFlags&) = delete;

    // Returns the previous value.
    bool test_and_set(uint64_t i);
    bool test(uint64_t i) const;

private:
    uint64_t* words_ = nullptr;
    std::unordered_set<uint64_t> sparse_;
};

double q_for(double mu, double delta);
uint64_t alpha_for(double mu, double delta);
uint64_t batch_for(double mu);

// Work units: one per draw, cursor step, flag test, membership probe,
// enqueue and dequeue.
uint64_t round_bound(uint64_t alpha, uint64_t batch);

class PartitionedEnumerator {
public:
    using Pred = std::function<bool(std::span<const Element>)>;

    PartitionedEnumerator(IndexSpace space, Pred in_v1, double mu, double delta, uint64_t seed);

    // Next output, or false once a round leaves the queue empty.
    bool next(std::vector<Element>& out);

    uint64_t ops() const { return ops_; }
    void add_ops(uint64_t x) { ops_ += x; }
    double mu() const { return mu_; }
    double delta() const { return delta_; }
    double q() const { return q_; }
    uint64_t alpha() const { return alpha_; }
    uint64_t batch() const { return batch_; }
    size_t peak_queue() const { return peak_queue_; }
    const IndexSpace& space() const { return space_; }
    // Negative-control hook: skip the seen-flags.
    void disable_dedup(bool off) { dedup_off_ = off; }

private:
    void consider(uint64_t index);

    IndexSpace space_;
    Pred in_v1_;
    double mu_, delta_, q_;
    uint64_t alpha_, batch_;
    Rng rng_;
    LazyFlags seen_;
    std::vector<uint64_t> queue_;
    size_t head_ = 0;
    size_t peak_queue_ = 0;
    uint64_t cursor_ = 0;
    uint64_t ops_ = 0;
    bool dedup_off_ = false;
    bool done_ = false;
    std::vector<Element> buf_;
};

struct EnumOptions {
    double gamma = 0.05;
    double eps = 0.1;
    uint64_t seed = 1;
    uint64_t max_outputs = 0;  // 0 = no cap
    bool disable_dedup = false;
    std::optional<uint64_t> s_eff_override;
    std::vector<TesterPtr> testers;  // general modes; empty = sampling testers
    bool force_testers = false;
    // Optional shared cache (same database, radius q.r and registry).
    LocalTypeCache* cache = nullptr;
};

struct EnumSummary {
    std::string mode;
    double mu = 0, delta = 0, q = 0, gamma = 0, eps = 0;
    uint64_t alpha = 0, batch = 0, seed = 0;
    uint64_t space_size = 0;
    uint64_t s_eff = 0;
    int c = 1;
    uint64_t outputs = 0;
    uint64_t max_delay = 0, p99_delay = 0, end_delay = 0;
    uint64_t analytic_bound = 0;
    size_t peak_queue = 0;
    bool exact_branch = false;
    bool truncated = false;
    size_t type_set_size = 0;
    int tester_repetitions = 0;
    double preprocess_seconds = 0, enumerate_seconds = 0;

    std::string to_text() const;
};

// Return false from the callback to stop early.
using EmitFn = std::function<bool(std::span<const Element>)>;

EnumSummary enumerate_local(const Database& db, const QueryNF& q, const EnumOptions& opt, const EmitFn& emit);
EnumSummary enumerate_local_strengthened(const Database& db, const QueryNF& q, const EnumOptions& opt,
                                         const EmitFn& emit);
EnumSummary enumerate_general(const Database& db, const QueryNF& q, const EnumOptions& opt, const EmitFn& emit);
EnumSummary enumerate_general_strengthened(const Database& db, const QueryNF& q, const EnumOptions& opt,
                                           const EmitFn& emit);
// Like the strengthened general mode, but every clause must come with a tester.
EnumSummary enumerate_hanf_testable(const Database& db, const QueryNF& q, const EnumOptions& opt,
                                    const EmitFn& emit);

}  // namespace aqe
