#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fibmon/records.hpp"
#include "fibmon/rng.hpp"

namespace fibmon {

// Dense pure-state simulator for small chains (L <= 14). Serves as the
// ground-truth oracle for the Gaussian and stabilizer backends and computes
// the reference-qubit coherent information for Born trajectories.
//
// Basis convention: qubit j is bit j of the amplitude index, the optional
// reference qubit is bit L. Z|0> = +|0>.
class PureState {
  public:
    static constexpr int kMaxSites = 14;

    PureState(int L, bool with_reference);

    int num_sites() const { return L_; }
    bool has_reference() const { return has_reference_; }
    int num_qubits() const { return L_ + (has_reference_ ? 1 : 0); }
    const std::vector<std::complex<double>>& amplitudes() const { return amp_; }
    std::vector<std::complex<double>>& amplitudes() { return amp_; }

    double norm() const;
    // Accumulated log-norm discarded by renormalize(); trajectory weight
    // bookkeeping for post-selected runs.
    double log_weight() const { return log_weight_; }
    void normalize();

    // Multiplies amplitudes by e^{alpha s O}, O = X_j or Z_j Z_{j+1 mod L}.
    // Leaves the state unnormalized.
    void apply_kraus(OpKind kind, int site, double alpha, int s);

    // Squared-norm weights of the two projector branches (1 +- O)/2 of the
    // *normalized* state; w_plus + w_minus = 1.
    std::pair<double, double> branch_weights(OpKind kind, int site) const;

    double expectation(OpKind kind, int site) const;
    double x_expectation(int site) const;
    double zz_correlator(int i, int j) const;
    double parity_expectation() const;

    // von Neumann entropy (nats) of sites [0, l); the reference qubit, if
    // present, always belongs to the traced-out side.
    double entanglement_entropy(int l) const;

    // Entropy of the full chain with the reference traced out.
    double chain_entropy() const;

    // I_c = S(rho_Q) - S(rho_QR); the trajectory state is pure on chain +
    // reference, so the subtrahend vanishes identically.
    double coherent_information() const;

  private:
    int L_;
    bool has_reference_;
    std::vector<std::complex<double>> amp_;
    double log_weight_ = 0.0;
};

PureState init_plus(int L, bool with_reference);

// Samples the outcome from the exact branch norms, applies the Kraus factor
// and renormalizes. One uniform draw per call.
BornStepResult born_step(PureState& state, OpKind kind, int site, double tau,
                         KrausConvention conv, CounterStream& stream);

// Protocols I and II at oracle scale. Gate order matches the Gaussian
// backend exactly (X layers: sites ascending; ZZ layers: bonds ascending),
// so a shared stream reproduces the same outcome sequence.
TrajectoryResult run_statevector_trajectory(const RunConfig& config,
                                            CounterStream& stream);

}  // namespace fibmon
