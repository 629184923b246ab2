#include "fibmon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fibmon/golden.hpp"

namespace fibmon {

namespace {
constexpr double kPi = std::numbers::pi;

double gaussian_deviate(CounterStream& stream) {
    // Box-Muller; one deviate per call keeps draw accounting simple.
    double u1 = stream.uniform();
    while (u1 <= 0.0) u1 = stream.uniform();
    const double u2 = stream.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}
}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& err) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 points");
    const bool weighted =
        err.size() == x.size() &&
        std::all_of(err.begin(), err.end(), [](double e) { return e > 0.0; });
    const std::size_t n = x.size();
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weighted ? 1.0 / (err[i] * err[i]) : 1.0;
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
        swxx += w * x[i] * x[i];
        swxy += w * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (std::abs(det) < 1e-300 || det <= 0.0)
        throw std::runtime_error("fit_line: degenerate abscissas");
    LineFit fit;
    fit.slope = (sw * swxy - swx * swy) / det;
    fit.intercept = (swxx * swy - swx * swxy) / det;
    double var_scale = 1.0;
    if (!weighted) {
        // Residual variance as the noise estimate.
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - fit.slope * x[i] - fit.intercept;
            ss += r * r;
        }
        var_scale = n > 2 ? ss / static_cast<double>(n - 2) : 0.0;
    }
    fit.slope_err = std::sqrt(var_scale * sw / det);
    fit.intercept_err = std::sqrt(var_scale * swxx / det);
    return fit;
}

FitResult fit_cent(const Arc& arc) {
    if (arc.cuts.size() != arc.values.size())
        throw std::invalid_argument("fit_cent: cut/value mismatch");
    std::vector<double> x, y, e;
    for (std::size_t i = 0; i < arc.cuts.size(); ++i) {
        const int l = arc.cuts[i];
        if (l < 4 || l > arc.L - 4) continue;  // boundary cutoff
        x.push_back(std::log(arc.L / kPi * std::sin(kPi * l / arc.L)));
        y.push_back(arc.values[i]);
        if (arc.errors.size() == arc.cuts.size()) e.push_back(arc.errors[i]);
    }
    if (x.size() < 6) throw std::invalid_argument("fit_cent: < 6 bulk cuts");
    LineFit fit = fit_line(x, y, e);
    return {3.0 * fit.slope, 3.0 * fit.slope_err};
}

FitResult zero_freq_scaling(const std::vector<std::pair<int, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("zero_freq_scaling: need >= 3 sizes");
    std::vector<double> x, y;
    for (const auto& [L, amp] : points) {
        x.push_back(std::log(static_cast<double>(L)));
        y.push_back(amp);
    }
    LineFit fit = fit_line(x, y);
    return {3.0 * fit.slope, 3.0 * fit.slope_err};
}

namespace {

struct RescaledPoint {
    double u, y, err;
    std::size_t curve;
};

// Local linear master-curve prediction from the bracketing points of the
// other curves (Houdayer-Hartmann style quality function).
double cost_impl(const std::vector<CollapseCurve>& curves, double tau_c,
                 double nu, bool* overlapped) {
    const double inv_nu = 1.0 / nu;
    std::vector<std::vector<RescaledPoint>> rescaled(curves.size());
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& curve = curves[c];
        const double scale = std::pow(curve.size, inv_nu);
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            const double e =
                curve.err.size() == curve.x.size() ? curve.err[i] : 0.0;
            rescaled[c].push_back({(curve.x[i] - tau_c) * scale, curve.y[i], e, c});
        }
        std::sort(rescaled[c].begin(), rescaled[c].end(),
                  [](const auto& a, const auto& b) { return a.u < b.u; });
    }
    double cost = 0.0;
    int count = 0;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        for (const auto& p : rescaled[c]) {
            // Bracketing neighbors from every other curve.
            std::vector<RescaledPoint> nbrs;
            for (std::size_t o = 0; o < curves.size(); ++o) {
                if (o == c) continue;
                const auto& arr = rescaled[o];
                auto it = std::lower_bound(
                    arr.begin(), arr.end(), p.u,
                    [](const RescaledPoint& a, double u) { return a.u < u; });
                if (it == arr.begin() || it == arr.end()) continue;
                nbrs.push_back(*(it - 1));
                nbrs.push_back(*it);
            }
            if (nbrs.size() < 2) continue;
            std::vector<double> xs, ys, es;
            for (const auto& q : nbrs) {
                xs.push_back(q.u);
                ys.push_back(q.y);
                es.push_back(q.err > 0.0 ? q.err : 1.0);
            }
            // Weighted local line through the neighbors.
            double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double w = 1.0 / (es[i] * es[i]);
                sw += w;
                swx += w * xs[i];
                swy += w * ys[i];
                swxx += w * xs[i] * xs[i];
                swxy += w * xs[i] * ys[i];
            }
            const double det = sw * swxx - swx * swx;
            double yhat, var;
            if (std::abs(det) < 1e-12 * sw * swxx || swxx == 0.0) {
                yhat = swy / sw;  // degenerate abscissas: weighted mean
                var = 1.0 / sw;
            } else {
                const double b = (sw * swxy - swx * swy) / det;
                const double a = (swxx * swy - swx * swxy) / det;
                yhat = a + b * p.u;
                var = (swxx - 2.0 * p.u * swx + p.u * p.u * sw) / det;
            }
            const double e2 = (p.err > 0.0 ? p.err * p.err : 1.0) + var;
            cost += (p.y - yhat) * (p.y - yhat) / e2;
            ++count;
        }
    }
    if (overlapped) *overlapped = count > 0;
    return count > 0 ? cost / count : std::numeric_limits<double>::infinity();
}

std::pair<double, double> minimize_collapse(const std::vector<CollapseCurve>& curves,
                                            std::pair<double, double> tau_range,
                                            std::pair<double, double> nu_range) {
    double t_lo = tau_range.first, t_hi = tau_range.second;
    double n_lo = nu_range.first, n_hi = nu_range.second;
    double best_t = 0.5 * (t_lo + t_hi), best_n = 0.5 * (n_lo + n_hi);
    double best = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 4; ++round) {
        const int grid = round == 0 ? 41 : 21;
        for (int i = 0; i < grid; ++i) {
            const double t = t_lo + (t_hi - t_lo) * i / (grid - 1);
            for (int j = 0; j < grid; ++j) {
                const double nu = n_lo + (n_hi - n_lo) * j / (grid - 1);
                if (nu <= 0.0) continue;
                const double cost = cost_impl(curves, t, nu, nullptr);
                if (cost < best) {
                    best = cost;
                    best_t = t;
                    best_n = nu;
                }
            }
        }
        const double t_w = 0.25 * (t_hi - t_lo), n_w = 0.25 * (n_hi - n_lo);
        t_lo = best_t - t_w;
        t_hi = best_t + t_w;
        n_lo = std::max(1e-3, best_n - n_w);
        n_hi = best_n + n_w;
    }
    return {best_t, best_n};
}

}  // namespace

double collapse_cost(const std::vector<CollapseCurve>& curves, double tau_c,
                     double nu) {
    return cost_impl(curves, tau_c, nu, nullptr);
}

CollapseResult fss_collapse(const std::vector<CollapseCurve>& curves,
                            std::pair<double, double> tau_range,
                            std::pair<double, double> nu_range,
                            int bootstrap_resamples, std::uint64_t bootstrap_seed) {
    if (curves.size() < 2)
        throw std::invalid_argument("fss_collapse: need >= 2 system sizes");
    bool overlapped = false;
    cost_impl(curves, 0.5 * (tau_range.first + tau_range.second),
              0.5 * (nu_range.first + nu_range.second), &overlapped);
    if (!overlapped)
        throw std::runtime_error("fss_collapse: no overlap after rescaling");

    auto [tau_c, nu] = minimize_collapse(curves, tau_range, nu_range);
    CollapseResult result;
    result.tau_c = tau_c;
    result.nu = nu;
    result.cost = cost_impl(curves, tau_c, nu, nullptr);

    if (bootstrap_resamples > 0) {
        double st = 0, st2 = 0, sn = 0, sn2 = 0;
        for (int r = 0; r < bootstrap_resamples; ++r) {
            CounterStream stream(bootstrap_seed, r);
            std::vector<CollapseCurve> resampled = curves;
            for (auto& curve : resampled)
                for (std::size_t i = 0; i < curve.y.size(); ++i) {
                    const double e =
                        curve.err.size() == curve.y.size() ? curve.err[i] : 0.0;
                    curve.y[i] += e * gaussian_deviate(stream);
                }
            auto [t_b, n_b] = minimize_collapse(resampled, tau_range, nu_range);
            st += t_b;
            st2 += t_b * t_b;
            sn += n_b;
            sn2 += n_b * n_b;
        }
        const double m = bootstrap_resamples;
        result.tau_c_err = std::sqrt(std::max(0.0, st2 / m - (st / m) * (st / m)));
        result.nu_err = std::sqrt(std::max(0.0, sn2 / m - (sn / m) * (sn / m)));
    }
    return result;
}

FourierSpectrum fourier_spectrum(const std::vector<double>& signal,
                                 std::int64_t t_a, std::int64_t t_b, int n_peaks,
                                 const std::vector<std::int64_t>& extra_n) {
    const std::int64_t w_len = t_b - t_a + 1;
    if (w_len < 64) throw std::invalid_argument("fourier_spectrum: window < 64");
    if (static_cast<std::int64_t>(signal.size()) != w_len)
        throw std::invalid_argument("fourier_spectrum: signal/window mismatch");

    FourierSpectrum spec;
    spec.window_start = t_a;
    spec.window_end = t_b;
    double mean = 0.0;
    for (double v : signal) mean += v;
    spec.mean = mean / static_cast<double>(w_len);

    auto transform_at = [&](double omega) {
        std::complex<double> acc = 0.0;
        for (std::int64_t t = t_a; t <= t_b; ++t) {
            const double v = signal[t - t_a];
            acc += v * std::exp(std::complex<double>(0.0, -omega * t));
        }
        return acc / static_cast<double>(w_len);
    };

    spec.omega.reserve(w_len);
    spec.amplitude.reserve(w_len);
    for (std::int64_t k = 0; k < w_len; ++k) {
        double om = 2.0 * kPi * k / static_cast<double>(w_len);
        if (om >= kPi) om -= 2.0 * kPi;  // compactify to [-pi, pi)
        spec.omega.push_back(om);
        spec.amplitude.push_back(transform_at(om));
    }

    std::vector<std::int64_t> ns;
    for (int n = 1; n <= n_peaks; ++n) ns.push_back(n);
    for (std::int64_t n : extra_n)
        if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
    for (std::int64_t n : ns) {
        double om = std::fmod(2.0 * kPi * static_cast<double>(n) / kPhi, 2.0 * kPi);
        if (om >= kPi) om -= 2.0 * kPi;
        spec.peak_n.push_back(n);
        spec.peak_omega.push_back(om);
        spec.peak_amplitude.push_back(transform_at(om));
    }
    return spec;
}

FourierSpectrum fourier_spectrum(const EntropySeries& series, int cut_index,
                                 std::int64_t t_a, std::int64_t t_b, int n_peaks,
                                 const std::vector<std::int64_t>& extra_n) {
    series.check_consistent();
    if (cut_index < 0 || cut_index >= static_cast<int>(series.cuts.size()))
        throw std::invalid_argument("fourier_spectrum: bad cut index");
    std::vector<double> signal;
    signal.reserve(t_b - t_a + 1);
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const std::int64_t t = series.times[i];
        if (t < t_a || t > t_b) continue;
        if (!signal.empty() || t == t_a) {
            if (t != t_a + static_cast<std::int64_t>(signal.size()))
                throw std::invalid_argument(
                    "fourier_spectrum: series not consecutive over window");
            signal.push_back(series.values[cut_index][i]);
        }
    }
    return fourier_spectrum(signal, t_a, t_b, n_peaks, extra_n);
}

FitResult peak_powerlaw(const std::vector<std::pair<std::int64_t, double>>& peaks,
                        PeakSubset subset) {
    std::vector<std::pair<double, double>> pts;  // (n, amplitude)
    if (subset == PeakSubset::Fibonacci) {
        for (const auto& [n, a] : peaks)
            if (is_fibonacci_number(n)) pts.emplace_back(static_cast<double>(n), a);
    } else {
        // Upper envelope: octave-bin maxima.
        std::map<int, std::pair<double, double>> bins;
        for (const auto& [n, a] : peaks) {
            if (n < 1) continue;
            const int bin = static_cast<int>(std::floor(std::log2(double(n))));
            auto it = bins.find(bin);
            if (it == bins.end() || a > it->second.second)
                bins[bin] = {static_cast<double>(n), a};
        }
        for (const auto& [bin, pt] : bins) pts.push_back(pt);
    }
    if (pts.size() < 4)
        throw std::invalid_argument("peak_powerlaw: < 4 usable peaks");
    std::vector<double> x, y;
    for (const auto& [n, a] : pts) {
        if (a <= 0.0) throw std::invalid_argument("peak_powerlaw: non-positive amp");
        x.push_back(std::log(n));
        y.push_back(std::log(a));
    }
    LineFit fit = fit_line(x, y);
    return {-fit.slope, fit.slope_err};
}

std::map<OpKind, KindStats> record_stats(
    const std::vector<MeasurementRecord>& records) {
    if (records.empty()) throw std::invalid_argument("record_stats: empty ensemble");
    struct Acc {
        std::int64_t n = 0, plus = 0;
        std::int64_t pairs = 0, same = 0;
        std::int64_t pairs_adj = 0, same_adj = 0;
    };
    std::map<OpKind, Acc> acc;
    // last outcome/layer per (site, kind) within one record
    for (const auto& rec : records) {
        std::map<std::pair<int, int>, std::pair<std::int64_t, int>> last;
        for (const auto& ev : rec.events) {
            auto& a = acc[ev.kind];
            ++a.n;
            if (ev.outcome > 0) ++a.plus;
            const auto key = std::make_pair(ev.site, static_cast<int>(ev.kind));
            auto it = last.find(key);
            if (it != last.end()) {
                const auto [prev_layer, prev_s] = it->second;
                if (ev.layer > prev_layer) {
                    ++a.pairs;
                    if (ev.outcome == prev_s) ++a.same;
                    if (ev.layer == prev_layer + 1) {
                        ++a.pairs_adj;
                        if (ev.outcome == prev_s) ++a.same_adj;
                    }
                }
            }
            last[key] = {ev.layer, ev.outcome};
        }
    }
    std::map<OpKind, KindStats> out;
    for (const auto& [kind, a] : acc) {
        KindStats st;
        st.n_events = a.n;
        st.p_plus = a.n > 0 ? double(a.plus) / a.n : 0.0;
        st.p_plus_err = a.n > 0 ? std::sqrt(st.p_plus * (1 - st.p_plus) / a.n) : 0.0;
        st.n_pairs = a.pairs;
        st.p_same = a.pairs > 0 ? double(a.same) / a.pairs : 0.0;
        st.p_same_err =
            a.pairs > 0 ? std::sqrt(st.p_same * (1 - st.p_same) / a.pairs) : 0.0;
        st.n_pairs_adjacent = a.pairs_adj;
        st.p_same_adjacent = a.pairs_adj > 0 ? double(a.same_adj) / a.pairs_adj : 0.0;
        out[kind] = st;
    }
    return out;
}

}  // namespace fibmon
