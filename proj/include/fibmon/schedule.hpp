#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fibmon/golden.hpp"
#include "fibmon/rng.hpp"

namespace fibmon {

// Layer-type sequence over {1 = X layer, 0 = ZZ layer}, stored packed.
// Fibonacci words are built from w0 = "1", w1 = "10", w_k = w_{k-1} w_{k-2}.
struct Word {
    std::vector<bool> symbols;

    std::size_t size() const { return symbols.size(); }
    bool operator[](std::size_t i) const { return symbols[i]; }
    bool operator==(const Word& other) const = default;

    std::string to_string() const;
    static Word from_string(const std::string& s);
};

struct FibonacciSchedule {
    int generation = 0;
};

struct FloquetSchedule {
    Word period;  // repeated cyclically
};

struct DilutedFibonacciSchedule {
    double p_x = 1.0;   // activation rate of X slots
    double p_zz = 1.0;  // activation rate of ZZ slots
};

using ScheduleKind =
    std::variant<FibonacciSchedule, FloquetSchedule, DilutedFibonacciSchedule>;

// Generation cap keeps the packed word below ~2e8 symbols.
inline constexpr int kMaxFibGeneration = 40;

Word fib_word(int generation);
Word dual_word(const Word& w);

// (n1, n0) symbol counts; for fib_word(k) these are consecutive Fibonacci
// numbers f_{k+1}, f_k.
std::pair<std::int64_t, std::int64_t> symbol_counts(const Word& w);

// Layer types for an arbitrary depth: prefix of the infinite Fibonacci word
// (depths need not be Fibonacci numbers), or cyclic repetition for Floquet.
Word layer_word(const ScheduleKind& kind, std::int64_t depth);

// Per-layer activation mask for the diluted protocol. Layer t of type X has
// L site slots, a ZZ layer has L bond slots; each slot fires independently
// with the rate of its layer type. Draw order is fixed (layer-major,
// slot-ascending) so masks are reproducible and shareable across backends.
struct DilutionMask {
    int L = 0;
    std::int64_t depth = 0;
    Word word;                            // layer types, word[t]
    std::vector<std::vector<bool>> active;  // active[t][slot]

    bool all_active() const;
};

DilutionMask realize_dilution(const DilutedFibonacciSchedule& kind, int L,
                              std::int64_t depth, CounterStream& stream);

// Fully-packed mask (p_x = p_zz = 1) without consuming randomness.
DilutionMask full_mask(int L, std::int64_t depth);

}  // namespace fibmon
