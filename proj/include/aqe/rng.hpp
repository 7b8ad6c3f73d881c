#pragma once

#include <cstdint>
#include <string_view>

namespace aqe {

// Counter-based generator: the i-th draw is mix(seed + i * golden). Replaying a
// session only needs (seed, counter).
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed) {}

    uint64_t next();
    // Uniform in [0, bound). bound must be positive.
    uint64_t below(uint64_t bound);
    // Uniform in [lo, hi] inclusive.
    uint64_t between(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }
    double uniform01();

    uint64_t seed() const { return seed_; }
    uint64_t counter() const { return counter_; }

private:
    uint64_t seed_;
    uint64_t counter_ = 0;
};

uint64_t splitmix64(uint64_t x);

// Independent stream seed for a named sub-task (clause tester, sampling block...).
uint64_t derive_seed(uint64_t seed, std::string_view label, uint64_t index = 0);

}  // namespace aqe
