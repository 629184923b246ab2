#pragma once

#include <cstdint>
#include <vector>

#include "fibmon/records.hpp"
#include "fibmon/rng.hpp"
#include "fibmon/schedule.hpp"

namespace fibmon {

// Sign-tracking stabilizer tableau (destabilizer/stabilizer pairs, rows
// bit-packed into 64-bit words). Supports the projective X / ZZ dynamics of
// protocol III at L up to ~512 plus an optional GHZ-encoded reference qubit.
class StabilizerTableau {
  public:
    // Plain |+...+>^L, or the joint GHZ code state of chain + reference
    // (the reference is qubit L).
    StabilizerTableau(int L, bool with_reference);

    int num_sites() const { return L_; }
    int num_qubits() const { return n_; }
    bool has_reference() const { return with_reference_; }

    struct MeasureResult {
        int outcome;         // +1 / -1
        double probability;  // 1.0 when determined, else 0.5
        bool was_random;
    };

    // Projective measurement of +X_j or +Z_j Z_{j+1 mod L}. Determined
    // operators take the fast path (no tableau update).
    MeasureResult project(OpKind kind, int site, CounterStream& stream);

    // Entropy (nats) of contiguous sites [start, start+len) via the
    // restricted-rank identity S/ln2 = rank(G|_region) - len.
    double region_entropy(int start, int len) const;
    double entropy(int cut) const { return region_entropy(0, cut); }

    // S(rho_Q) - S(rho_QR), both terms evaluated by restricted rank.
    double coherent_information() const;

    // +s if s * Z_i Z_j is a stabilizer, 0 if the operator is indeterminate.
    int spin_glass_correlator(int i, int j) const;

    // Invariants: mutual commutation of stabilizer rows and full rank.
    bool check_invariants() const;

  private:
    struct PauliOp;  // sparse 1- or 2-qubit operator

    PauliOp make_op(OpKind kind, int site) const;
    bool row_anticommutes(int row, const PauliOp& op) const;
    void rowsum(int h, int i);                 // R_h := R_i * R_h
    int determined_sign(const PauliOp& op) const;

    std::uint64_t* row_x(int r) { return xs_.data() + std::size_t(r) * words_; }
    std::uint64_t* row_z(int r) { return zs_.data() + std::size_t(r) * words_; }
    const std::uint64_t* row_x(int r) const {
        return xs_.data() + std::size_t(r) * words_;
    }
    const std::uint64_t* row_z(int r) const {
        return zs_.data() + std::size_t(r) * words_;
    }

    int L_;
    int n_;       // qubit count (L or L+1)
    int words_;   // 64-bit words per row part
    bool with_reference_;
    std::vector<std::uint64_t> xs_, zs_;  // 2n rows: destab 0..n-1, stab n..2n-1
    std::vector<std::uint8_t> phase_;     // sign bits per row
};

StabilizerTableau init_plus_tableau(int L, bool with_reference);

// Protocol III trajectory over a dilution realization. Outcome randomness is
// drawn from `stream`; the entropy series is outcome-independent for a fixed
// mask. `final_tableau`, when non-null, receives the end-of-run tableau.
TrajectoryResult run_clifford_trajectory(const RunConfig& config,
                                         const DilutionMask& mask,
                                         CounterStream& stream,
                                         StabilizerTableau* final_tableau = nullptr);

}  // namespace fibmon
