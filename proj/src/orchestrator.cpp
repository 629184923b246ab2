#include "fibmon/orchestrator.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "fibmon/gaussian.hpp"
#include "fibmon/golden.hpp"
#include "fibmon/percolation.hpp"
#include "fibmon/schedule.hpp"
#include "fibmon/stabilizer.hpp"
#include "fibmon/statevector.hpp"

namespace fibmon {

using nlohmann::json;

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::PostSelected: return "postselected";
        case Protocol::Born: return "born";
        case Protocol::Clifford: return "clifford";
        case Protocol::Percolation: return "percolation";
    }
    return "unknown";
}

Protocol protocol_from_string(const std::string& s) {
    if (s == "postselected") return Protocol::PostSelected;
    if (s == "born") return Protocol::Born;
    if (s == "clifford") return Protocol::Clifford;
    if (s == "percolation") return Protocol::Percolation;
    throw std::invalid_argument("unknown protocol: " + s);
}

std::string to_string(KrausConvention c) {
    return c == KrausConvention::ExponentTau ? "exponent-tau" : "exponent-half-tau";
}

KrausConvention convention_from_string(const std::string& s) {
    if (s == "exponent-tau") return KrausConvention::ExponentTau;
    if (s == "exponent-half-tau") return KrausConvention::ExponentHalfTau;
    throw std::invalid_argument("unknown kraus convention: " + s);
}

namespace {

TrajectoryResult run_percolation_trajectory(const RunConfig& config,
                                            CounterStream& stream) {
    DilutionMask mask = realize_dilution({config.p_x(), config.p_zz()}, config.L,
                                         config.depth, stream);
    BondLattice lattice = build_lattice(mask);
    TrajectoryResult result;
    const auto cuts =
        config.final_cuts.empty() ? config.effective_cuts() : config.final_cuts;
    for (int cut : cuts) result.final_arc.push_back(final_entropy_proxy(lattice, cut));
    return result;
}

struct MeanErr {
    double mean = std::nan("");
    double err = 0.0;
};

MeanErr reduce(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    double s = 0.0;
    for (double x : xs) s += x;
    const double mean = s / xs.size();
    double s2 = 0.0;
    for (double x : xs) s2 += (x - mean) * (x - mean);
    const double n = static_cast<double>(xs.size());
    return {mean, xs.size() > 1 ? std::sqrt(s2 / (n - 1) / n) : 0.0};
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

TrajectoryResult run_indexed_trajectory(const RunConfig& config,
                                        std::uint64_t index) {
    CounterStream stream(config.master_seed, index);
    switch (config.protocol) {
        case Protocol::PostSelected:
        case Protocol::Born:
            if (config.with_reference) {
                if (config.L > PureState::kMaxSites)
                    throw std::invalid_argument(
                        "reference-qubit runs need L <= 14 (statevector backend)");
                return run_statevector_trajectory(config, stream);
            }
            if (config.L > 1024)
                throw std::invalid_argument("gaussian backend limited to L <= 1024");
            return run_gaussian_trajectory(config, stream);
        case Protocol::Clifford: {
            DilutionMask mask = realize_dilution(
                {config.p_x(), config.p_zz()}, config.L, config.depth, stream);
            return run_clifford_trajectory(config, mask, stream);
        }
        case Protocol::Percolation:
            return run_percolation_trajectory(config, stream);
    }
    throw std::logic_error("run_indexed_trajectory: unhandled protocol");
}

EnsembleResult run_ensemble(const RunConfig& config, bool keep_trajectories) {
    if (config.n_trajectories < 1)
        throw std::invalid_argument("run_ensemble: n_trajectories < 1");
    if (config.depth < 1) throw std::invalid_argument("run_ensemble: depth < 1");
    const auto t0 = std::chrono::steady_clock::now();
    const int n = config.n_trajectories;

    std::vector<TrajectoryResult> results(n);
    int nthreads = config.threads > 0
                       ? config.threads
                       : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, n));

    std::atomic<int> next{0};
    std::vector<std::string> worker_errors(nthreads);
    auto worker = [&](int wid) {
        try {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                results[i] = run_indexed_trajectory(config, i);
        } catch (const std::exception& e) {
            worker_errors[wid] = e.what();
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : worker_errors)
        if (!err.empty()) throw std::runtime_error("trajectory failed: " + err);

    EnsembleResult out;
    out.config = config;
    auto& sum = out.summary;
    sum.n_trajectories = n;

    // Index-ordered reductions.
    if (!results[0].series.times.empty()) {
        sum.times = results[0].series.times;
        sum.fibonacci_mask = results[0].series.fibonacci_mask;
        sum.cuts = results[0].series.cuts;
        const std::size_t nc = sum.cuts.size(), nt = sum.times.size();
        sum.mean.assign(nc, std::vector<double>(nt, 0.0));
        sum.stderr_.assign(nc, std::vector<double>(nt, 0.0));
        for (std::size_t c = 0; c < nc; ++c) {
            for (std::size_t t = 0; t < nt; ++t) {
                std::vector<double> vals;
                vals.reserve(n);
                for (int i = 0; i < n; ++i)
                    vals.push_back(results[i].series.values[c][t]);
                auto me = reduce(vals);
                sum.mean[c][t] = me.mean;
                sum.stderr_[c][t] = me.err;
            }
        }
    }

    const std::size_t nf = results[0].final_arc.size();
    if (nf > 0) {
        sum.final_cuts = config.final_cuts.empty() && config.protocol == Protocol::Percolation
                             ? config.effective_cuts()
                             : config.final_cuts;
        for (std::size_t c = 0; c < nf; ++c) {
            std::vector<double> vals;
            vals.reserve(n);
            int span = 0;
            for (int i = 0; i < n; ++i) {
                vals.push_back(results[i].final_arc[c]);
                if (results[i].final_arc[c] > 1e-12) ++span;
            }
            auto me = reduce(vals);
            sum.final_mean.push_back(me.mean);
            sum.final_stderr.push_back(me.err);
            sum.final_span_prob.push_back(static_cast<double>(span) / n);
        }
    }

    if (!std::isnan(results[0].coherent_info)) {
        std::vector<double> vals;
        for (int i = 0; i < n; ++i) vals.push_back(results[i].coherent_info);
        auto me = reduce(vals);
        sum.coherent_info_mean = me.mean;
        sum.coherent_info_stderr = me.err;
    }
    if (!std::isnan(results[0].final_zz)) {
        std::vector<double> vals, avals;
        for (int i = 0; i < n; ++i) {
            vals.push_back(results[i].final_zz);
            avals.push_back(std::abs(results[i].final_zz));
        }
        auto me = reduce(vals);
        auto ame = reduce(avals);
        sum.zz_mean = me.mean;
        sum.zz_stderr = me.err;
        sum.abs_zz_mean = ame.mean;
        sum.abs_zz_stderr = ame.err;
    }

    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (keep_trajectories) out.trajectories = std::move(results);
    return out;
}

SweepResult sweep(const RunConfig& base, const std::vector<SweepAxis>& axes) {
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("sweep: need one or two axes");
    auto apply = [](RunConfig cfg, const std::string& param, double v) {
        if (param == "tau_x") cfg.tau_x = v;
        else if (param == "tau_zz") cfg.tau_zz = v;
        else if (param == "p_x") cfg.tau_x = p_to_tau(v);
        else if (param == "p_zz") cfg.tau_zz = p_to_tau(v);
        else throw std::invalid_argument("sweep: unknown axis " + param);
        return cfg;
    };
    SweepResult out;
    out.base = base;
    out.axes = axes;
    const auto& a0 = axes[0];
    const std::vector<double> single{0.0};
    const auto& a1_vals = axes.size() == 2 ? axes[1].values : single;
    for (double v0 : a0.values) {
        for (double v1 : a1_vals) {
            RunConfig cfg = apply(base, a0.param, v0);
            if (axes.size() == 2) cfg = apply(cfg, axes[1].param, v1);
            SweepCell cell;
            cell.tau_x = cfg.tau_x;
            cell.tau_zz = cfg.tau_zz;
            cell.summary = run_ensemble(cfg).summary;
            out.cells.push_back(std::move(cell));
        }
    }
    return out;
}

namespace {

json config_to_json(const RunConfig& c) {
    return json{{"protocol", to_string(c.protocol)},
                {"L", c.L},
                {"depth", c.depth},
                {"tau_x", c.tau_x},
                {"tau_zz", c.tau_zz},
                {"p_x", c.p_x()},
                {"p_zz", c.p_zz()},
                {"n_trajectories", c.n_trajectories},
                {"master_seed", c.master_seed},
                {"kraus_convention", to_string(c.convention)},
                {"cuts", c.cuts},
                {"final_cuts", c.final_cuts},
                {"record_outcomes", c.record_outcomes},
                {"fibonacci_only_sampling", c.fibonacci_only_sampling},
                {"entropy_start", c.entropy_start},
                {"with_reference", c.with_reference},
                {"record_zz", c.record_zz}};
}

void write_manifest(const std::string& dir, const RunConfig& config,
                    const std::string& command_line, double wall_seconds,
                    const std::vector<std::string>& outputs,
                    const std::string& status) {
    json m{{"tool", "fibmon"},
           {"version", kVersion},
           {"command", command_line},
           {"config", config_to_json(config)},
           {"status", status},
           {"wall_seconds", wall_seconds},
           {"outputs", outputs}};
    std::ofstream f(dir + "/manifest.json");
    f << m.dump(2) << "\n";
}

void append_summary_rows(std::ostream& os, const EnsembleSummary& sum,
                         const std::string& param_prefix) {
    const auto row = [&](const std::string& kind, int cut, std::int64_t time,
                         double mean, double err, std::int64_t n) {
        os << param_prefix << kind << "," << cut << "," << time << ","
           << fmt17(mean) << "," << fmt17(err) << "," << n << "\n";
    };
    for (std::size_t c = 0; c < sum.cuts.size(); ++c)
        for (std::size_t t = 0; t < sum.times.size(); ++t)
            row("entropy", sum.cuts[c], sum.times[t], sum.mean[c][t],
                sum.stderr_[c][t], sum.n_trajectories);
    for (std::size_t c = 0; c < sum.final_cuts.size(); ++c) {
        row("final_entropy", sum.final_cuts[c], -1, sum.final_mean[c],
            sum.final_stderr[c], sum.n_trajectories);
        row("span_prob", sum.final_cuts[c], -1, sum.final_span_prob[c], 0.0,
            sum.n_trajectories);
    }
    if (!std::isnan(sum.coherent_info_mean))
        row("coherent_info", 0, -1, sum.coherent_info_mean,
            sum.coherent_info_stderr, sum.n_trajectories);
    if (!std::isnan(sum.zz_mean)) {
        row("zz", 0, -1, sum.zz_mean, sum.zz_stderr, sum.n_trajectories);
        row("abs_zz", 0, -1, sum.abs_zz_mean, sum.abs_zz_stderr,
            sum.n_trajectories);
    }
}

}  // namespace

void write_ensemble_outputs(const std::string& dir, const EnsembleResult& result,
                            const std::string& command_line) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> outputs{"summary.csv"};
    {
        std::ofstream f(dir + "/summary.csv");
        f << "kind,cut,time,mean,stderr,n\n";
        append_summary_rows(f, result.summary, "");
        if (!f) throw std::runtime_error("write_ensemble_outputs: summary failed");
    }
    if (!result.trajectories.empty()) {
        outputs.push_back("trajectories.ndjson");
        std::ofstream f(dir + "/trajectories.ndjson");
        for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
            const auto& tr = result.trajectories[i];
            json rec{{"index", i}};
            if (!tr.series.times.empty()) {
                rec["times"] = tr.series.times;
                rec["cuts"] = tr.series.cuts;
                rec["values"] = tr.series.values;
            }
            if (!tr.final_arc.empty()) {
                rec["final_cuts"] = result.config.final_cuts;
                rec["final_arc"] = tr.final_arc;
            }
            if (!std::isnan(tr.coherent_info)) rec["coherent_info"] = tr.coherent_info;
            if (!std::isnan(tr.final_zz)) rec["final_zz"] = tr.final_zz;
            if (tr.log_weight != 0.0) rec["log_weight"] = tr.log_weight;
            if (!tr.record.events.empty()) {
                json evs = json::array();
                for (const auto& ev : tr.record.events)
                    evs.push_back({ev.layer, ev.site,
                                   ev.kind == OpKind::X ? "x" : "zz", ev.tau,
                                   ev.outcome, ev.probability});
                rec["record"] = evs;
            }
            f << rec.dump() << "\n";
        }
        if (!f) throw std::runtime_error("write_ensemble_outputs: ndjson failed");
    }
    write_manifest(dir, result.config, command_line, result.summary.wall_seconds,
                   outputs, "complete");
}

void write_sweep_outputs(const std::string& dir, const SweepResult& result,
                         const std::string& command_line) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir + "/summary.csv");
    f << "tau_x,tau_zz,p_x,p_zz,kind,cut,time,mean,stderr,n\n";
    double wall = 0.0;
    for (const auto& cell : result.cells) {
        std::ostringstream prefix;
        prefix << fmt17(cell.tau_x) << "," << fmt17(cell.tau_zz) << ","
               << fmt17(tau_to_p(cell.tau_x)) << "," << fmt17(tau_to_p(cell.tau_zz))
               << ",";
        append_summary_rows(f, cell.summary, prefix.str());
        wall += cell.summary.wall_seconds;
    }
    if (!f) throw std::runtime_error("write_sweep_outputs: summary failed");
    write_manifest(dir, result.base, command_line, wall, {"summary.csv"},
                   "complete");
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_summary_csv: cannot open " + path);
    std::string header;
    std::getline(f, header);
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::vector<SummaryRow> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        SummaryRow row;
        for (const auto& col : cols) {
            if (!std::getline(ss, field, ','))
                throw std::runtime_error("read_summary_csv: short row");
            if (col == "kind") row.kind = field;
            else if (col == "cut") row.cut = std::stoi(field);
            else if (col == "time") row.time = std::stoll(field);
            else if (col == "mean") row.mean = std::stod(field);
            else if (col == "stderr") row.stderr_ = std::stod(field);
            else if (col == "n") row.n = std::stoll(field);
            else row.params[col] = std::stod(field);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TrajectoryResult> read_trajectories_ndjson(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_trajectories_ndjson: cannot open " + path);
    std::vector<TrajectoryResult> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json rec = json::parse(line);
        TrajectoryResult tr;
        if (rec.contains("times")) {
            tr.series.times = rec["times"].get<std::vector<std::int64_t>>();
            tr.series.cuts = rec["cuts"].get<std::vector<int>>();
            tr.series.values = rec["values"].get<std::vector<std::vector<double>>>();
            tr.series.fibonacci_mask.resize(tr.series.times.size());
            for (std::size_t i = 0; i < tr.series.times.size(); ++i)
                tr.series.fibonacci_mask[i] = is_fibonacci_number(tr.series.times[i]);
        }
        if (rec.contains("final_arc"))
            tr.final_arc = rec["final_arc"].get<std::vector<double>>();
        if (rec.contains("coherent_info"))
            tr.coherent_info = rec["coherent_info"].get<double>();
        if (rec.contains("final_zz")) tr.final_zz = rec["final_zz"].get<double>();
        if (rec.contains("record")) {
            for (const auto& ev : rec["record"]) {
                MeasurementEvent e;
                e.layer = ev[0].get<std::int64_t>();
                e.site = ev[1].get<int>();
                e.kind = ev[2].get<std::string>() == "x" ? OpKind::X : OpKind::ZZ;
                e.tau = ev[3].get<double>();
                e.outcome = ev[4].get<int>();
                e.probability = ev[5].get<double>();
                tr.record.events.push_back(e);
            }
        }
        out.push_back(std::move(tr));
    }
    return out;
}

}  // namespace fibmon
