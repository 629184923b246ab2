#include "fibmon/stabilizer.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "fibmon/golden.hpp"

namespace fibmon {

namespace {
constexpr double kLn2 = 0.6931471805599453094;

inline int popcount(std::uint64_t w) { return std::popcount(w); }
}  // namespace

// At most two qubits, so at most two distinct words per row part.
struct StabilizerTableau::PauliOp {
    int n_parts = 0;
    int word[2] = {0, 0};
    std::uint64_t x[2] = {0, 0};
    std::uint64_t z[2] = {0, 0};

    void add(int qubit, bool xbit, bool zbit) {
        const int w = qubit >> 6;
        const std::uint64_t bit = std::uint64_t{1} << (qubit & 63);
        for (int p = 0; p < n_parts; ++p) {
            if (word[p] == w) {
                if (xbit) x[p] |= bit;
                if (zbit) z[p] |= bit;
                return;
            }
        }
        word[n_parts] = w;
        if (xbit) x[n_parts] |= bit;
        if (zbit) z[n_parts] |= bit;
        ++n_parts;
    }
};

StabilizerTableau::StabilizerTableau(int L, bool with_reference)
    : L_(L),
      n_(L + (with_reference ? 1 : 0)),
      words_((L + (with_reference ? 1 : 0) + 63) / 64),
      with_reference_(with_reference) {
    if (L < 2) throw std::invalid_argument("StabilizerTableau: L < 2");
    xs_.assign(std::size_t(2 * n_) * words_, 0);
    zs_.assign(std::size_t(2 * n_) * words_, 0);
    phase_.assign(2 * n_, 0);

    auto set_x = [&](int row, int qubit) {
        row_x(row)[qubit >> 6] |= std::uint64_t{1} << (qubit & 63);
    };
    auto set_z = [&](int row, int qubit) {
        row_z(row)[qubit >> 6] |= std::uint64_t{1} << (qubit & 63);
    };

    if (!with_reference_) {
        // destabilizers Z_i, stabilizers X_i
        for (int i = 0; i < n_; ++i) {
            set_z(i, i);
            set_x(n_ + i, i);
        }
    } else {
        // GHZ_{L+1}: stabilizers Z_i Z_{i+1} (i < n-1) and X_0...X_{n-1};
        // destabilizers X_0..X_i and Z_0.
        for (int i = 0; i < n_ - 1; ++i) {
            set_z(n_ + i, i);
            set_z(n_ + i, i + 1);
            for (int q = 0; q <= i; ++q) set_x(i, q);
        }
        for (int q = 0; q < n_; ++q) set_x(n_ + n_ - 1, q);
        set_z(n_ - 1, 0);
    }
}

StabilizerTableau init_plus_tableau(int L, bool with_reference) {
    return StabilizerTableau(L, with_reference);
}

StabilizerTableau::PauliOp StabilizerTableau::make_op(OpKind kind, int site) const {
    if (site < 0 || site >= L_) throw std::invalid_argument("make_op: bad site");
    PauliOp op;
    if (kind == OpKind::X) {
        op.add(site, true, false);
    } else {
        op.add(site, false, true);
        op.add((site + 1) % L_, false, true);
    }
    return op;
}

bool StabilizerTableau::row_anticommutes(int row, const PauliOp& op) const {
    int parity = 0;
    for (int p = 0; p < op.n_parts; ++p) {
        const int w = op.word[p];
        parity ^= popcount(row_x(row)[w] & op.z[p]) & 1;
        parity ^= popcount(row_z(row)[w] & op.x[p]) & 1;
    }
    return parity != 0;
}

void StabilizerTableau::rowsum(int h, int i) {
    // Phase of R_i * R_h accumulated as an exponent of the imaginary unit.
    int acc = 2 * phase_[h] + 2 * phase_[i];
    std::uint64_t* xh = row_x(h);
    std::uint64_t* zh = row_z(h);
    const std::uint64_t* xi = row_x(i);
    const std::uint64_t* zi = row_z(i);
    for (int w = 0; w < words_; ++w) {
        const std::uint64_t x1 = xi[w], z1 = zi[w];
        const std::uint64_t x2 = xh[w], z2 = zh[w];
        const std::uint64_t plus = (x1 & ~z1 & z2 & x2) | (x1 & z1 & z2 & ~x2) |
                                   (~x1 & z1 & x2 & ~z2);
        const std::uint64_t minus = (x1 & ~z1 & z2 & ~x2) | (x1 & z1 & x2 & ~z2) |
                                    (~x1 & z1 & x2 & z2);
        acc += popcount(plus) - popcount(minus);
        xh[w] ^= x1;
        zh[w] ^= z1;
    }
    acc &= 3;
    assert(acc % 2 == 0);
    phase_[h] = static_cast<std::uint8_t>(acc >> 1);
}

int StabilizerTableau::determined_sign(const PauliOp& op) const {
    // Scratch accumulation of the stabilizer-product representation of op.
    std::vector<std::uint64_t> sx(words_, 0), sz(words_, 0);
    int acc = 0;
    for (int i = 0; i < n_; ++i) {
        if (!row_anticommutes(i, op)) continue;  // destabilizer row i
        const int stab = n_ + i;
        acc += 2 * phase_[stab];
        const std::uint64_t* xi = row_x(stab);
        const std::uint64_t* zi = row_z(stab);
        for (int w = 0; w < words_; ++w) {
            const std::uint64_t x1 = xi[w], z1 = zi[w];
            const std::uint64_t x2 = sx[w], z2 = sz[w];
            const std::uint64_t plus = (x1 & ~z1 & z2 & x2) | (x1 & z1 & z2 & ~x2) |
                                       (~x1 & z1 & x2 & ~z2);
            const std::uint64_t minus = (x1 & ~z1 & z2 & ~x2) |
                                        (x1 & z1 & x2 & ~z2) |
                                        (~x1 & z1 & x2 & z2);
            acc += popcount(plus) - popcount(minus);
            sx[w] ^= x1;
            sz[w] ^= z1;
        }
    }
#ifndef NDEBUG
    for (int p = 0; p < op.n_parts; ++p) {
        assert(sx[op.word[p]] == op.x[p]);
        assert(sz[op.word[p]] == op.z[p]);
    }
#endif
    acc &= 3;
    assert(acc % 2 == 0);
    return acc == 0 ? +1 : -1;
}

StabilizerTableau::MeasureResult StabilizerTableau::project(OpKind kind, int site,
                                                            CounterStream& stream) {
    const PauliOp op = make_op(kind, site);
    int pivot = -1;
    for (int i = n_; i < 2 * n_; ++i) {
        if (row_anticommutes(i, op)) {
            pivot = i;
            break;
        }
    }
    if (pivot < 0) {
        // Determined outcome; repeated measurements change nothing.
        return {determined_sign(op), 1.0, false};
    }
    for (int i = 0; i < 2 * n_; ++i) {
        if (i != pivot && row_anticommutes(i, op)) rowsum(i, pivot);
    }
    // Old stabilizer row becomes the paired destabilizer; op replaces it.
    const int d = pivot - n_;
    for (int w = 0; w < words_; ++w) {
        row_x(d)[w] = row_x(pivot)[w];
        row_z(d)[w] = row_z(pivot)[w];
        row_x(pivot)[w] = 0;
        row_z(pivot)[w] = 0;
    }
    phase_[d] = phase_[pivot];
    for (int p = 0; p < op.n_parts; ++p) {
        row_x(pivot)[op.word[p]] = op.x[p];
        row_z(pivot)[op.word[p]] = op.z[p];
    }
    const int s = stream.sign(0.5);
    phase_[pivot] = s > 0 ? 0 : 1;
    return {s, 0.5, true};
}

double StabilizerTableau::region_entropy(int start, int len) const {
    if (len < 0 || start < 0 || start + len > n_)
        throw std::invalid_argument("region_entropy: bad region");
    if (len == 0) return 0.0;
    // Pack the restricted (X|Z) columns of the n stabilizer rows and rank
    // them over F2.
    const int cols = 2 * len;
    const int rw = (cols + 63) / 64;
    std::vector<std::uint64_t> rows(std::size_t(n_) * rw, 0);
    for (int i = 0; i < n_; ++i) {
        const std::uint64_t* x = row_x(n_ + i);
        const std::uint64_t* z = row_z(n_ + i);
        std::uint64_t* out = rows.data() + std::size_t(i) * rw;
        for (int c = 0; c < len; ++c) {
            const int q = start + c;
            const bool xb = (x[q >> 6] >> (q & 63)) & 1;
            const bool zb = (z[q >> 6] >> (q & 63)) & 1;
            if (xb) out[c >> 6] |= std::uint64_t{1} << (c & 63);
            const int zc = len + c;
            if (zb) out[zc >> 6] |= std::uint64_t{1} << (zc & 63);
        }
    }
    int rank = 0;
    for (int col = 0; col < cols && rank < n_; ++col) {
        const int w = col >> 6;
        const std::uint64_t bit = std::uint64_t{1} << (col & 63);
        int pivot = -1;
        for (int i = rank; i < n_; ++i) {
            if (rows[std::size_t(i) * rw + w] & bit) {
                pivot = i;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (int k = 0; k < rw; ++k)
                std::swap(rows[std::size_t(pivot) * rw + k],
                          rows[std::size_t(rank) * rw + k]);
        for (int i = rank + 1; i < n_; ++i) {
            if (rows[std::size_t(i) * rw + w] & bit)
                for (int k = 0; k < rw; ++k)
                    rows[std::size_t(i) * rw + k] ^= rows[std::size_t(rank) * rw + k];
        }
        ++rank;
    }
    return kLn2 * (rank - len);
}

double StabilizerTableau::coherent_information() const {
    if (!with_reference_)
        throw std::logic_error("coherent_information: no reference qubit");
    const double s_q = region_entropy(0, L_);
    const double s_qr = region_entropy(0, n_);
    return s_q - s_qr;
}

int StabilizerTableau::spin_glass_correlator(int i, int j) const {
    if (i < 0 || i >= L_ || j < 0 || j >= L_ || i == j)
        throw std::invalid_argument("spin_glass_correlator: bad sites");
    PauliOp op;
    op.add(i, false, true);
    op.add(j, false, true);
    for (int r = n_; r < 2 * n_; ++r)
        if (row_anticommutes(r, op)) return 0;
    return determined_sign(op);
}

bool StabilizerTableau::check_invariants() const {
    // Mutual commutation of stabilizer rows.
    for (int i = n_; i < 2 * n_; ++i) {
        for (int j = i + 1; j < 2 * n_; ++j) {
            int parity = 0;
            for (int w = 0; w < words_; ++w) {
                parity ^= popcount(row_x(i)[w] & row_z(j)[w]) & 1;
                parity ^= popcount(row_z(i)[w] & row_x(j)[w]) & 1;
            }
            if (parity) return false;
        }
    }
    // Full rank n over F2: reuse the restricted-rank machinery on the whole
    // system; rank n <=> entropy of the full region equals 0.
    return std::abs(region_entropy(0, n_)) < 1e-12;
}

TrajectoryResult run_clifford_trajectory(const RunConfig& config,
                                         const DilutionMask& mask,
                                         CounterStream& stream,
                                         StabilizerTableau* final_tableau) {
    if (config.protocol != Protocol::Clifford)
        throw std::invalid_argument("run_clifford_trajectory: wrong protocol");
    if (mask.L != config.L || mask.depth != config.depth)
        throw std::invalid_argument("run_clifford_trajectory: mask dims mismatch");
    const int L = config.L;
    const auto cuts = config.effective_cuts();

    StabilizerTableau tab = init_plus_tableau(L, config.with_reference);

    TrajectoryResult result;
    result.series.cuts = cuts;
    result.series.values.resize(cuts.size());

    for (std::int64_t t = 1; t <= config.depth; ++t) {
        const OpKind kind = mask.word[t - 1] ? OpKind::X : OpKind::ZZ;
        const double tau = mask.word[t - 1] ? config.tau_x : config.tau_zz;
        const auto& layer = mask.active[t - 1];
        for (int j = 0; j < L; ++j) {
            if (!layer[j]) continue;
            auto res = tab.project(kind, j, stream);
            if (config.record_outcomes)
                result.record.events.push_back(
                    {t, j, kind, tau, res.outcome, res.probability});
        }
        const bool fib = is_fibonacci_number(t);
        if (t >= config.entropy_start && (!config.fibonacci_only_sampling || fib)) {
            result.series.times.push_back(t);
            result.series.fibonacci_mask.push_back(fib);
            for (std::size_t c = 0; c < cuts.size(); ++c)
                result.series.values[c].push_back(tab.entropy(cuts[c]));
        }
    }
    for (int cut : config.final_cuts) result.final_arc.push_back(tab.entropy(cut));
    if (config.with_reference) result.coherent_info = tab.coherent_information();
    if (config.record_zz)
        result.final_zz = tab.spin_glass_correlator(0, L / 2);
    if (final_tableau) *final_tableau = tab;
    return result;
}

}  // namespace fibmon
