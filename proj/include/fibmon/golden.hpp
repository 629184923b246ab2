#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fibmon {

// Golden ratio and its conjugate. phi^2 = phi + 1.
struct GoldenConstants {
    static constexpr double phi = 1.6180339887498948482;
    static constexpr double psi = -1.0 / phi;
};

inline constexpr double kPhi = GoldenConstants::phi;

// Fibonacci numbers under the convention f_1 = f_2 = 1 (so f_15 = 610,
// f_19 = 4181). fib(0) = 0 for convenience.
inline std::int64_t fibonacci(int n) {
    if (n < 0) throw std::invalid_argument("fibonacci: negative index");
    if (n > 90) throw std::invalid_argument("fibonacci: index overflows int64");
    std::int64_t a = 0, b = 1;
    for (int i = 0; i < n; ++i) {
        std::int64_t c = a + b;
        a = b;
        b = c;
    }
    return a;
}

// All Fibonacci numbers <= max_t, strictly increasing (the repeated 1 of
// f_1 = f_2 is deduplicated). Empty for max_t < 1.
inline std::vector<std::int64_t> fibonacci_times(std::int64_t max_t) {
    std::vector<std::int64_t> out;
    std::int64_t a = 1, b = 2;
    while (a <= max_t) {
        out.push_back(a);
        std::int64_t c = a + b;
        a = b;
        b = c;
    }
    return out;
}

inline bool is_fibonacci_number(std::int64_t t) {
    if (t < 1) return false;
    std::int64_t a = 1, b = 2;
    while (a < t) {
        std::int64_t c = a + b;
        a = b;
        b = c;
    }
    return a == t;
}

}  // namespace fibmon
