#pragma once

#include <cstdint>

namespace aqe::stats {

// P[Bin(n, p) >= x], summed in log space.
double binomial_tail_ge(uint64_t n, double p, uint64_t x);

// One-sided test of "success probability exceeds p0": passes iff observing
// `successes` or more out of `trials` has probability <= alpha when the true
// probability is exactly p0.
bool binomial_test_pass(uint64_t successes, uint64_t trials, double p0 = 2.0 / 3.0, double alpha = 0.01);

// Error of a majority vote over `reps` independent runs that each err with
// probability p (reps odd).
double majority_error(uint64_t reps, double p);

}  // namespace aqe::stats
