#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fibmon/records.hpp"

namespace fibmon {

inline constexpr const char* kVersion = "0.1.0";

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);
std::string to_string(KrausConvention c);
KrausConvention convention_from_string(const std::string& s);

struct EnsembleSummary {
    std::vector<std::int64_t> times;
    std::vector<bool> fibonacci_mask;
    std::vector<int> cuts;
    std::vector<std::vector<double>> mean;     // [cut][time]
    std::vector<std::vector<double>> stderr_;  // [cut][time]

    std::vector<int> final_cuts;
    std::vector<double> final_mean, final_stderr;
    std::vector<double> final_span_prob;  // P(value > 0) per final cut

    double coherent_info_mean = std::nan("");
    double coherent_info_stderr = 0.0;
    double zz_mean = std::nan("");
    double zz_stderr = 0.0;
    double abs_zz_mean = std::nan("");
    double abs_zz_stderr = 0.0;

    int n_trajectories = 0;
    double wall_seconds = 0.0;
};

struct EnsembleResult {
    RunConfig config;
    EnsembleSummary summary;
    // populated only when requested; trajectory index == vector index
    std::vector<TrajectoryResult> trajectories;
};

// Executes n_trajectories with per-trajectory counter streams
// stream(master_seed, index). Workers share nothing mutable; reductions run
// in trajectory-index order, so results are identical for any thread count.
EnsembleResult run_ensemble(const RunConfig& config, bool keep_trajectories = false);

// Runs one indexed trajectory on the backend selected by the protocol.
TrajectoryResult run_indexed_trajectory(const RunConfig& config,
                                        std::uint64_t index);

struct SweepAxis {
    std::string param;  // tau_x | tau_zz | p_x | p_zz
    std::vector<double> values;
};

struct SweepCell {
    double tau_x = 0.0, tau_zz = 0.0;
    EnsembleSummary summary;
};

struct SweepResult {
    RunConfig base;
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells;  // row-major over axes
};

// Cartesian grid over one or two axes; every cell reuses the same master
// seed (shared streams across cells).
SweepResult sweep(const RunConfig& base, const std::vector<SweepAxis>& axes);

// Output files: manifest.json, summary.csv, and trajectories.ndjson when
// trajectories were kept. Floats carry 17 significant digits.
void write_ensemble_outputs(const std::string& dir, const EnsembleResult& result,
                            const std::string& command_line);
void write_sweep_outputs(const std::string& dir, const SweepResult& result,
                         const std::string& command_line);

struct SummaryRow {
    std::string kind;
    int cut = 0;
    std::int64_t time = 0;
    double mean = 0.0, stderr_ = 0.0;
    std::int64_t n = 0;
    std::map<std::string, double> params;  // sweep axes, when present
};

std::vector<SummaryRow> read_summary_csv(const std::string& path);

// Reads kept trajectories back (entropy series + records).
std::vector<TrajectoryResult> read_trajectories_ndjson(const std::string& path);

}  // namespace fibmon
