#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibmon {

enum class OpKind : std::uint8_t { X = 0, ZZ = 1 };

enum class Protocol { PostSelected, Born, Clifford, Percolation };

// Eq.-(1) literal Kraus M ~ e^{tau s O} samples with tanh(2 tau); the
// half-tau variant reproduces the End-Matter p(s) = (1 + s tanh(tau)<O>)/2.
enum class KrausConvention { ExponentTau, ExponentHalfTau };

// Effective exponent entering e^{alpha s O}.
inline double kraus_exponent(double tau, KrausConvention conv) {
    return conv == KrausConvention::ExponentTau ? tau : 0.5 * tau;
}

// Per-layer entanglement entropies (nats) for a set of cuts.
struct EntropySeries {
    std::vector<std::int64_t> times;          // layer indices, 1-based
    std::vector<int> cuts;                    // cut lengths l
    std::vector<std::vector<double>> values;  // values[cut][time]
    std::vector<bool> fibonacci_mask;         // marks Fibonacci times

    void check_consistent() const {
        if (values.size() != cuts.size())
            throw std::runtime_error("EntropySeries: cut/value size mismatch");
        for (const auto& v : values)
            if (v.size() != times.size())
                throw std::runtime_error("EntropySeries: ragged value rows");
        if (fibonacci_mask.size() != times.size())
            throw std::runtime_error("EntropySeries: mask size mismatch");
    }
};

struct MeasurementEvent {
    std::int64_t layer;  // 1-based
    int site;            // site for X, left site of the bond for ZZ
    OpKind kind;
    double tau;
    int outcome;         // +1 / -1
    double probability;  // Born probability of the sampled outcome
};

struct MeasurementRecord {
    std::vector<MeasurementEvent> events;
};

// p = 1 - e^{-tau} and its inverse; the round trip is exact to 1e-12 by
// construction (expm1/log1p pair).
inline double tau_to_p(double tau) {
    if (tau < 0) throw std::invalid_argument("tau_to_p: tau must be >= 0");
    return -std::expm1(-tau);
}
inline double p_to_tau(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p_to_tau: p outside [0,1]");
    return -std::log1p(-p);
}

struct RunConfig {
    Protocol protocol = Protocol::PostSelected;
    int L = 16;
    std::int64_t depth = 89;
    double tau_x = 0.3;   // clifford/percolation interconvert via p = 1-e^{-tau}
    double tau_zz = 0.5;
    int n_trajectories = 1;
    std::uint64_t master_seed = 1;
    KrausConvention convention = KrausConvention::ExponentTau;
    std::vector<int> cuts;                // per-layer cuts; empty -> half cut only
    std::vector<int> final_cuts;          // recorded once at the final layer
    bool record_outcomes = false;
    bool fibonacci_only_sampling = false; // record entropies at Fibonacci times only
    std::int64_t entropy_start = 1;       // first layer with entropy recording
    bool with_reference = false;          // GHZ-encoded reference qubit (I_c)
    bool record_zz = false;               // final <Z_0 Z_{L/2}> per trajectory
    int threads = 0;                      // 0 -> hardware concurrency

    double p_x() const { return tau_to_p(tau_x); }
    double p_zz() const { return tau_to_p(tau_zz); }
    std::vector<int> effective_cuts() const {
        return cuts.empty() ? std::vector<int>{L / 2} : cuts;
    }
};

struct BornStepResult {
    int outcome;
    double probability;
};

struct TrajectoryResult {
    EntropySeries series;
    std::vector<double> final_arc;  // aligned with RunConfig::final_cuts
    double coherent_info = std::nan("");
    double final_zz = std::nan("");
    double log_weight = 0.0;
    MeasurementRecord record;
};

}  // namespace fibmon
