#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "fibmon/records.hpp"
#include "fibmon/rng.hpp"

namespace fibmon {

// Born-averaged entanglement arc of one system size.
struct Arc {
    int L = 0;
    std::vector<int> cuts;
    std::vector<double> values;  // nats
    std::vector<double> errors;  // standard errors; may be empty
};

struct FitResult {
    double value = 0.0;
    double error = 0.0;
};

// Least-squares slope of S vs ln[(L/pi) sin(pi l/L)] times 3, restricted to
// the bulk window l in [4, L-4].
FitResult fit_cent(const Arc& arc);

// Slope of the omega = 0 Fourier amplitude vs ln L, times 3 (same
// normalization as fit_cent). Points are (L, amplitude) pairs.
FitResult zero_freq_scaling(const std::vector<std::pair<int, double>>& points);

struct CollapseCurve {
    double size = 0.0;           // system size L
    std::vector<double> x;       // tuning parameter
    std::vector<double> y;       // observable
    std::vector<double> err;     // standard errors
};

struct CollapseResult {
    double tau_c = 0.0;
    double nu = 0.0;
    double cost = 0.0;
    double tau_c_err = 0.0;
    double nu_err = 0.0;
};

// Finite-size-scaling collapse: minimizes the local-master-curve deviation
// of rescaled points (x - tau_c) L^{1/nu} over (tau_c, nu) via grid search
// plus refinement; errors from 200 parametric bootstrap resamples.
CollapseResult fss_collapse(const std::vector<CollapseCurve>& curves,
                            std::pair<double, double> tau_range,
                            std::pair<double, double> nu_range,
                            int bootstrap_resamples = 200,
                            std::uint64_t bootstrap_seed = 7);

// Collapse cost at a fixed (tau_c, nu); exposed for the optimality property.
double collapse_cost(const std::vector<CollapseCurve>& curves, double tau_c,
                     double nu);

struct FourierSpectrum {
    std::vector<double> omega;                       // DFT grid in [-pi, pi)
    std::vector<std::complex<double>> amplitude;     // (1/W) sum s(t) e^{-iwt}
    std::vector<std::int64_t> peak_n;                // golden harmonics
    std::vector<double> peak_omega;                  // 2 pi n / phi mod 2pi
    std::vector<std::complex<double>> peak_amplitude;
    double mean = 0.0;  // omega = 0 amplitude
    std::int64_t window_start = 0, window_end = 0;
};

// Direct windowed transform of a signal sampled at consecutive integer
// times [t_a, t_b]; evaluates the regular DFT grid and the golden-ratio
// harmonics n = 1..n_peaks exactly.
FourierSpectrum fourier_spectrum(const std::vector<double>& signal,
                                 std::int64_t t_a, std::int64_t t_b,
                                 int n_peaks = 10,
                                 const std::vector<std::int64_t>& extra_n = {});

// Windowed slice of an EntropySeries cut (requires consecutive times).
FourierSpectrum fourier_spectrum(const EntropySeries& series, int cut_index,
                                 std::int64_t t_a, std::int64_t t_b,
                                 int n_peaks = 10,
                                 const std::vector<std::int64_t>& extra_n = {});

enum class PeakSubset { Fibonacci, All };

// Log-log power-law fit amplitude ~ n^{-alpha}. The Fibonacci subset fits
// the Fibonacci-indexed peaks directly; All fits the upper envelope
// (octave-bin maxima).
FitResult peak_powerlaw(const std::vector<std::pair<std::int64_t, double>>& peaks,
                        PeakSubset subset);

struct KindStats {
    std::int64_t n_events = 0;
    double p_plus = 0.0;
    double p_plus_err = 0.0;
    // consecutive same-kind layers at the same site (reported default)
    std::int64_t n_pairs = 0;
    double p_same = 0.0;
    double p_same_err = 0.0;
    // directly adjacent layers only (gap 1; the "11" factors for X)
    std::int64_t n_pairs_adjacent = 0;
    double p_same_adjacent = 0.0;
};

// Outcome statistics per operator kind over an ensemble of records.
std::map<OpKind, KindStats> record_stats(
    const std::vector<MeasurementRecord>& records);

// Weighted least-squares slope/intercept helper (weights 1/err^2; falls
// back to unweighted with residual variance when errors are absent).
struct LineFit {
    double slope = 0.0, intercept = 0.0;
    double slope_err = 0.0, intercept_err = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& err = {});

}  // namespace fibmon
