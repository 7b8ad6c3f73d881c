// Runs every acceptance criterion at full trial counts and prints one
// PASS/FAIL line each. Exit status is nonzero if any criterion fails.
#include <cstdlib>
#include <iostream>

#include "aqe/suites.hpp"

int main(int argc, char** argv) {
    aqe::suites::Options opt;
    // Optional trial multiplier for local runs; ctest uses the default of 1.
    if (argc > 1) opt.scale = std::atof(argv[1]);
    opt.log = &std::cerr;
    bool ok = true;
    for (const auto& r : aqe::suites::run(opt)) {
        std::cout << aqe::suites::format(r) << std::endl;
        ok = ok && r.pass && !r.vacuous;
    }
    return ok ? 0 : 1;
}
