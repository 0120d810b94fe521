#ifndef TOBRA_TESTS_SUPPORT_HPP
#define TOBRA_TESTS_SUPPORT_HPP

#include <cstdlib>
#include <random>

// Property-test seed; override with TODA_BRANE_SEED for reproduction of a
// specific run.
inline unsigned test_seed() {
    if (const char* s = std::getenv("TODA_BRANE_SEED"))
        return unsigned(std::strtoul(s, nullptr, 10));
    return 20260808u;
}

inline std::mt19937& test_rng() {
    static std::mt19937 rng(test_seed());
    return rng;
}

#endif
