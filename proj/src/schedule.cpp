#include "fibmon/schedule.hpp"

#include <stdexcept>

namespace fibmon {

std::string Word::to_string() const {
    std::string s;
    s.reserve(symbols.size());
    for (bool b : symbols) s.push_back(b ? '1' : '0');
    return s;
}

Word Word::from_string(const std::string& s) {
    Word w;
    w.symbols.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("Word::from_string: symbols must be 0/1");
        w.symbols.push_back(c == '1');
    }
    return w;
}

Word fib_word(int generation) {
    if (generation < 0) throw std::invalid_argument("fib_word: negative generation");
    if (generation > kMaxFibGeneration)
        throw std::invalid_argument("fib_word: generation exceeds size cap 40");
    Word prev;   // w_{k-1}
    Word prev2;  // w_{k-2}
    prev2.symbols = {true};         // w0 = "1"
    prev.symbols = {true, false};   // w1 = "10"
    if (generation == 0) return prev2;
    if (generation == 1) return prev;
    for (int k = 2; k <= generation; ++k) {
        Word next;
        next.symbols.reserve(prev.size() + prev2.size());
        next.symbols = prev.symbols;
        next.symbols.insert(next.symbols.end(), prev2.symbols.begin(),
                            prev2.symbols.end());
        prev2 = std::move(prev);
        prev = std::move(next);
    }
    return prev;
}

Word dual_word(const Word& w) {
    Word d;
    d.symbols.reserve(w.size());
    for (bool b : w.symbols) d.symbols.push_back(!b);
    return d;
}

std::pair<std::int64_t, std::int64_t> symbol_counts(const Word& w) {
    std::int64_t n1 = 0;
    for (bool b : w.symbols) n1 += b ? 1 : 0;
    return {n1, static_cast<std::int64_t>(w.size()) - n1};
}

Word layer_word(const ScheduleKind& kind, std::int64_t depth) {
    if (depth < 0) throw std::invalid_argument("layer_word: negative depth");
    Word out;
    out.symbols.reserve(depth);
    if (const auto* floq = std::get_if<FloquetSchedule>(&kind)) {
        if (floq->period.size() == 0)
            throw std::invalid_argument("layer_word: empty Floquet period");
        for (std::int64_t t = 0; t < depth; ++t)
            out.symbols.push_back(floq->period[t % floq->period.size()]);
        return out;
    }
    // Fibonacci and diluted-Fibonacci schedules both follow w_infinity.
    int gen = 1;
    while (fibonacci(gen + 2) < depth && gen < kMaxFibGeneration) ++gen;
    if (fibonacci(gen + 2) < depth)
        throw std::invalid_argument("layer_word: depth exceeds generation cap");
    Word w = fib_word(gen);
    out.symbols.assign(w.symbols.begin(), w.symbols.begin() + depth);
    return out;
}

bool DilutionMask::all_active() const {
    for (const auto& layer : active)
        for (bool b : layer)
            if (!b) return false;
    return true;
}

DilutionMask realize_dilution(const DilutedFibonacciSchedule& kind, int L,
                              std::int64_t depth, CounterStream& stream) {
    if (kind.p_x < 0.0 || kind.p_x > 1.0 || kind.p_zz < 0.0 || kind.p_zz > 1.0)
        throw std::invalid_argument("realize_dilution: rates must lie in [0,1]");
    if (L < 1) throw std::invalid_argument("realize_dilution: L must be positive");
    DilutionMask mask;
    mask.L = L;
    mask.depth = depth;
    mask.word = layer_word(ScheduleKind{kind}, depth);
    mask.active.resize(depth);
    for (std::int64_t t = 0; t < depth; ++t) {
        const double rate = mask.word[t] ? kind.p_x : kind.p_zz;
        auto& layer = mask.active[t];
        layer.resize(L);
        for (int j = 0; j < L; ++j) layer[j] = stream.bernoulli(rate);
    }
    return mask;
}

DilutionMask full_mask(int L, std::int64_t depth) {
    DilutionMask mask;
    mask.L = L;
    mask.depth = depth;
    mask.word = layer_word(ScheduleKind{FibonacciSchedule{kMaxFibGeneration}}, depth);
    mask.active.assign(depth, std::vector<bool>(L, true));
    return mask;
}

}  // namespace fibmon
