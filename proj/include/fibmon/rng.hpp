#pragma once

#include <array>
#include <cstdint>

namespace fibmon {

// Counter-based random stream (Philox-style 4x32, 10 rounds).
//
// A stream is addressed by (master_seed, stream_index); draws advance a
// 64-bit block counter. Streams never share mutable state, so trajectories
// can be scheduled on any worker in any order and still reproduce
// bit-identically.
class CounterStream {
  public:
    CounterStream() : CounterStream(0, 0) {}
    CounterStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_index)),
          stream_hi_(static_cast<std::uint32_t>(stream_index >> 32)),
          block_(0),
          buf_pos_(4) {}

    // Next raw 32-bit word.
    std::uint32_t next_u32() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform double in [0, 1), 53 significant bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // +1 with probability p_plus, else -1 (one draw, shared across backends
    // so that trajectories under a common stream take identical branches).
    int sign(double p_plus) { return uniform() < p_plus ? +1 : -1; }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                        std::uint32_t& lo) {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void refill() {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t x0 = c0, x1 = c1, x2 = stream_lo_, x3 = stream_hi_;
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(kMul0, x0, hi0, lo0);
            mulhilo(kMul1, x2, hi1, lo1);
            std::uint32_t y0 = hi1 ^ x1 ^ k0;
            std::uint32_t y1 = lo1;
            std::uint32_t y2 = hi0 ^ x3 ^ k1;
            std::uint32_t y3 = lo0;
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        buf_ = {x0, x1, x2, x3};
        ++block_;
        buf_pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t block_;
    std::array<std::uint32_t, 4> buf_;
    int buf_pos_;
};

}  // namespace fibmon
