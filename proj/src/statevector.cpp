#include "fibmon/statevector.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "fibmon/golden.hpp"
#include "fibmon/schedule.hpp"

namespace fibmon {

PureState::PureState(int L, bool with_reference)
    : L_(L), has_reference_(with_reference) {
    if (L < 1 || L > kMaxSites)
        throw std::invalid_argument("PureState: L outside [1, 14]");
    amp_.assign(std::size_t{1} << num_qubits(), {0.0, 0.0});
}

PureState init_plus(int L, bool with_reference) {
    PureState state(L, with_reference);
    auto& amp = state.amplitudes();
    if (!with_reference) {
        // |++...+> has uniform amplitudes in the Z basis.
        const double a = std::pow(2.0, -0.5 * L);
        for (auto& c : amp) c = a;
    } else {
        // Joint GHZ of chain and reference: (|0...0>|0> + |1...1>|1>)/sqrt(2).
        const std::size_t ones = (std::size_t{1} << (L + 1)) - 1;
        amp[0] = M_SQRT1_2;
        amp[ones] = M_SQRT1_2;
    }
    return state;
}

double PureState::norm() const {
    double n2 = 0.0;
    for (const auto& c : amp_) n2 += std::norm(c);
    return std::sqrt(n2);
}

void PureState::normalize() {
    const double n = norm();
    if (n <= 0.0) throw std::runtime_error("PureState: zero-norm state");
    log_weight_ += std::log(n);
    const double inv = 1.0 / n;
    for (auto& c : amp_) c *= inv;
}

void PureState::apply_kraus(OpKind kind, int site, double alpha, int s) {
    if (alpha < 0.0) throw std::invalid_argument("apply_kraus: negative strength");
    if (site < 0 || site >= L_) throw std::invalid_argument("apply_kraus: bad site");
    const double ch = std::cosh(alpha), sh = std::sinh(alpha) * s;
    const std::size_t n = amp_.size();
    if (kind == OpKind::X) {
        const std::size_t bit = std::size_t{1} << site;
        for (std::size_t b = 0; b < n; ++b) {
            if (b & bit) continue;
            const auto lo = amp_[b], hi = amp_[b | bit];
            amp_[b] = ch * lo + sh * hi;
            amp_[b | bit] = ch * hi + sh * lo;
        }
    } else {
        const int site2 = (site + 1) % L_;
        const std::size_t bi = std::size_t{1} << site;
        const std::size_t bj = std::size_t{1} << site2;
        const double up = std::exp(alpha * s), down = std::exp(-alpha * s);
        for (std::size_t b = 0; b < n; ++b) {
            const bool zi = (b & bi) == 0, zj = (b & bj) == 0;
            amp_[b] *= (zi == zj) ? up : down;
        }
    }
}

std::pair<double, double> PureState::branch_weights(OpKind kind, int site) const {
    const std::size_t n = amp_.size();
    double w_plus = 0.0, total = 0.0;
    if (kind == OpKind::X) {
        const std::size_t bit = std::size_t{1} << site;
        for (std::size_t b = 0; b < n; ++b) {
            if (b & bit) continue;
            const auto plus = 0.5 * (amp_[b] + amp_[b | bit]);
            w_plus += 2.0 * std::norm(plus);
            total += std::norm(amp_[b]) + std::norm(amp_[b | bit]);
        }
    } else {
        const int site2 = (site + 1) % L_;
        const std::size_t bi = std::size_t{1} << site;
        const std::size_t bj = std::size_t{1} << site2;
        for (std::size_t b = 0; b < n; ++b) {
            const double w = std::norm(amp_[b]);
            const bool zi = (b & bi) == 0, zj = (b & bj) == 0;
            if (zi == zj) w_plus += w;
            total += w;
        }
    }
    if (total <= 0.0) throw std::runtime_error("branch_weights: zero-norm state");
    return {w_plus / total, 1.0 - w_plus / total};
}

double PureState::expectation(OpKind kind, int site) const {
    auto [wp, wm] = branch_weights(kind, site);
    return wp - wm;
}

double PureState::x_expectation(int site) const {
    return expectation(OpKind::X, site);
}

double PureState::zz_correlator(int i, int j) const {
    if (i < 0 || i >= L_ || j < 0 || j >= L_)
        throw std::invalid_argument("zz_correlator: bad sites");
    const std::size_t bi = std::size_t{1} << i;
    const std::size_t bj = std::size_t{1} << j;
    double acc = 0.0, total = 0.0;
    for (std::size_t b = 0; b < amp_.size(); ++b) {
        const double w = std::norm(amp_[b]);
        const bool zi = (b & bi) == 0, zj = (b & bj) == 0;
        acc += (zi == zj) ? w : -w;
        total += w;
    }
    return acc / total;
}

double PureState::parity_expectation() const {
    const std::size_t flip = (std::size_t{1} << L_) - 1;  // chain bits only
    std::complex<double> acc = 0.0;
    double total = 0.0;
    for (std::size_t b = 0; b < amp_.size(); ++b) {
        acc += std::conj(amp_[b]) * amp_[b ^ flip];
        total += std::norm(amp_[b]);
    }
    return acc.real() / total;
}

namespace {

// Entropy of the reduced state on the low `row_bits` bits of the index.
double reduced_entropy(const std::vector<std::complex<double>>& amp,
                       int row_bits, int col_bits) {
    const std::size_t rows = std::size_t{1} << row_bits;
    const std::size_t cols = std::size_t{1} << col_bits;
    // Diagonalize the smaller Gram matrix; both share nonzero spectrum.
    Eigen::MatrixXcd m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r)
            m(r, c) = amp[r + (c << row_bits)];
    Eigen::MatrixXcd gram;
    if (rows <= cols)
        gram = m * m.adjoint();
    else
        gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram,
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("reduced_entropy: eigensolver failed");
    double total = 0.0;
    for (double lam : solver.eigenvalues()) total += std::max(lam, 0.0);
    double s = 0.0;
    for (double lam : solver.eigenvalues()) {
        const double p = std::max(lam, 0.0) / total;
        if (p > 1e-14) s -= p * std::log(p);
    }
    return s;
}

}  // namespace

double PureState::entanglement_entropy(int l) const {
    if (l < 1 || l >= L_)
        throw std::invalid_argument("entanglement_entropy: cut outside (0, L)");
    return reduced_entropy(amp_, l, num_qubits() - l);
}

double PureState::chain_entropy() const {
    if (!has_reference_)
        throw std::logic_error("chain_entropy: requires a reference qubit");
    return reduced_entropy(amp_, L_, 1);
}

double PureState::coherent_information() const {
    if (!has_reference_)
        throw std::logic_error("coherent_information: requires a reference qubit");
    // rho_QR is the full trajectory pure state: S(rho_QR) = 0.
    return chain_entropy() - 0.0;
}

BornStepResult born_step(PureState& state, OpKind kind, int site, double tau,
                         KrausConvention conv, CounterStream& stream) {
    const double alpha = kraus_exponent(tau, conv);
    auto [w_plus, w_minus] = state.branch_weights(kind, site);
    const double np = std::exp(2.0 * alpha) * w_plus + std::exp(-2.0 * alpha) * w_minus;
    const double nm = std::exp(-2.0 * alpha) * w_plus + std::exp(2.0 * alpha) * w_minus;
    const double p_plus = np / (np + nm);
    const int s = stream.sign(p_plus);
    const double p = s > 0 ? p_plus : 1.0 - p_plus;
    if (p <= 0.0)
        throw std::runtime_error("born_step: sampled a zero-norm branch");
    state.apply_kraus(kind, site, alpha, s);
    state.normalize();
    return {s, p};
}

TrajectoryResult run_statevector_trajectory(const RunConfig& config,
                                            CounterStream& stream) {
    if (config.protocol != Protocol::PostSelected &&
        config.protocol != Protocol::Born)
        throw std::invalid_argument("run_statevector_trajectory: wrong protocol");
    const int L = config.L;
    const bool born = config.protocol == Protocol::Born;
    const auto cuts = config.effective_cuts();

    PureState state = init_plus(L, config.with_reference);
    Word word = layer_word(ScheduleKind{FibonacciSchedule{}}, config.depth);

    TrajectoryResult result;
    result.series.cuts = cuts;
    result.series.values.resize(cuts.size());

    for (std::int64_t t = 1; t <= config.depth; ++t) {
        const OpKind kind = word[t - 1] ? OpKind::X : OpKind::ZZ;
        const double tau = word[t - 1] ? config.tau_x : config.tau_zz;
        for (int j = 0; j < L; ++j) {
            if (born) {
                auto res = born_step(state, kind, j, tau, config.convention, stream);
                if (config.record_outcomes)
                    result.record.events.push_back(
                        {t, j, kind, tau, res.outcome, res.probability});
            } else {
                state.apply_kraus(kind, j, kraus_exponent(tau, config.convention), +1);
                state.normalize();
            }
        }
        const bool fib = is_fibonacci_number(t);
        if (t >= config.entropy_start && (!config.fibonacci_only_sampling || fib)) {
            result.series.times.push_back(t);
            result.series.fibonacci_mask.push_back(fib);
            for (std::size_t c = 0; c < cuts.size(); ++c)
                result.series.values[c].push_back(state.entanglement_entropy(cuts[c]));
        }
    }
    for (int cut : config.final_cuts)
        result.final_arc.push_back(state.entanglement_entropy(cut));
    if (config.with_reference) result.coherent_info = state.coherent_information();
    if (config.record_zz) result.final_zz = state.zz_correlator(0, L / 2);
    result.log_weight = state.log_weight();
    return result;
}

}  // namespace fibmon
