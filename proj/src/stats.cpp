#include "aqe/stats.hpp"

#include <algorithm>
#include <cmath>

namespace aqe::stats {

double binomial_tail_ge(uint64_t n, double p, uint64_t x) {
    if (x == 0) return 1.0;
    if (x > n) return 0.0;
    if (p <= 0) return 0.0;
    if (p >= 1) return 1.0;
    const double lp = std::log(p), lq = std::log1p(-p);
    double total = 0;
    for (uint64_t i = x; i <= n; ++i) {
        const double lc = std::lgamma(double(n) + 1) - std::lgamma(double(i) + 1) - std::lgamma(double(n - i) + 1);
        total += std::exp(lc + double(i) * lp + double(n - i) * lq);
    }
    return std::min(1.0, total);
}

bool binomial_test_pass(uint64_t successes, uint64_t trials, double p0, double alpha) {
    if (trials == 0) return false;
    return binomial_tail_ge(trials, p0, successes) <= alpha;
}

double majority_error(uint64_t reps, double p) {
    return binomial_tail_ge(reps, p, (reps + 1) / 2);
}

}  // namespace aqe::stats
