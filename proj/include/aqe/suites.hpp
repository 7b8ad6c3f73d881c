#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace aqe::suites {

struct Options {
    // Multiplies every trial count (seeds, databases). Sizes are never scaled.
    double scale = 1.0;
    // Overrides every trial count when set; 0 makes each criterion vacuous.
    std::optional<uint64_t> trials;
    // Negative control: run every enumeration without its seen-flags.
    bool inject_dedup_fault = false;
    uint64_t seed = 0x5eed2024;
    std::ostream* log = nullptr;
};

struct Result {
    int id = 0;
    std::string name;
    bool pass = false;
    bool vacuous = false;
    std::string detail;
    double seconds = 0;
};

// Runs the listed criteria (1..10; empty = all) in order.
std::vector<Result> run(const Options& opt, const std::vector<int>& which = {});
std::string format(const Result& r);

}  // namespace aqe::suites
