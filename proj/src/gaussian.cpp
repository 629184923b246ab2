#include "fibmon/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fibmon/golden.hpp"

namespace fibmon {

MajoranaCovariance::MajoranaCovariance(int L) : L_(L) {
    if (L < 2) throw std::invalid_argument("MajoranaCovariance: L < 2");
    gamma_ = Eigen::MatrixXd::Zero(2 * L, 2 * L);
}

MajoranaCovariance init_x_polarized(int L) {
    MajoranaCovariance state(L);
    auto& g = state.gamma();
    for (int j = 0; j < L; ++j) {
        g(2 * j, 2 * j + 1) = 1.0;   // <X_j> = 1
        g(2 * j + 1, 2 * j) = -1.0;
    }
    return state;
}

std::pair<int, int> MajoranaCovariance::majorana_pair(OpKind kind, int site) const {
    if (site < 0 || site >= L_)
        throw std::invalid_argument("majorana_pair: bad site");
    if (kind == OpKind::X) return {2 * site, 2 * site + 1};
    if (site < L_ - 1) return {2 * site + 1, 2 * site + 2};
    return {0, 2 * L_ - 1};  // periodic bond, even parity sector
}

void MajoranaCovariance::weak_measure_pair(int a, int b, double alpha, int s) {
    if (a == b) throw std::invalid_argument("weak_measure_pair: a == b");
    if (alpha < 0.0) throw std::invalid_argument("weak_measure_pair: alpha < 0");
    const int n = 2 * L_;
    const double lambda = s * std::tanh(2.0 * alpha);
    const double mu = 1.0 / std::cosh(2.0 * alpha);
    const double g_ab = gamma_(a, b);
    const double denom = 1.0 + lambda * g_ab;
    if (denom < 1e-14)
        throw std::runtime_error("weak_measure_pair: zero-probability branch");

    const Eigen::VectorXd u = gamma_.col(a);
    const Eigen::VectorXd v = gamma_.col(b);
    gamma_.noalias() += (lambda / denom) * (v * u.transpose() - u * v.transpose());

    const double row_scale = mu / denom;
    for (int l = 0; l < n; ++l) {
        gamma_(a, l) = -row_scale * u(l);
        gamma_(l, a) = row_scale * u(l);
        gamma_(b, l) = -row_scale * v(l);
        gamma_(l, b) = row_scale * v(l);
    }
    const double g_new = (g_ab + lambda) / denom;
    gamma_(a, b) = g_new;
    gamma_(b, a) = -g_new;
    gamma_(a, a) = 0.0;
    gamma_(b, b) = 0.0;
}

double MajoranaCovariance::purity_defect() const {
    const int n = 2 * L_;
    Eigen::MatrixXd gg = gamma_ * gamma_.transpose();
    gg -= Eigen::MatrixXd::Identity(n, n);
    return gg.cwiseAbs().maxCoeff();
}

void MajoranaCovariance::reorthogonalize() {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        gamma_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
    gamma_ = 0.5 * (polar - polar.transpose());
}

double MajoranaCovariance::region_entropy(int start, int len) const {
    if (len < 1 || len >= L_ || start < 0 || start + len > L_)
        throw std::invalid_argument("region_entropy: bad region");
    const int m = 2 * len;
    Eigen::MatrixXd block = gamma_.block(2 * start, 2 * start, m, m);
    // Eigenvalues of the antisymmetric block come in +- i nu pairs;
    // -block^2 is symmetric PSD with each nu^2 doubled.
    Eigen::MatrixXd sq = -block * block;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sq,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("region_entropy: eigensolver failed");
    double s = 0.0;
    for (double nu2 : solver.eigenvalues()) {
        if (nu2 > 1.0 + 1e-4)
            throw std::runtime_error("region_entropy: eigenvalue beyond purity bound");
        double nu = std::sqrt(std::clamp(nu2, 0.0, 1.0));
        const double p = 0.5 * (1.0 + nu);
        double h = 0.0;
        if (p > 1e-15 && p < 1.0 - 1e-15)
            h = -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
        s += 0.5 * h;  // spectrum doubled
    }
    return s;
}

double pfaffian(Eigen::MatrixXd a) {
    const int n = static_cast<int>(a.rows());
    if (n % 2 != 0) return 0.0;
    double pf = 1.0;
    for (int k = 0; k < n - 1; k += 2) {
        // pivot: largest |a(k, i)| for i > k
        int ip = k + 1;
        double best = std::abs(a(k, k + 1));
        for (int i = k + 2; i < n; ++i) {
            if (std::abs(a(k, i)) > best) {
                best = std::abs(a(k, i));
                ip = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (ip != k + 1) {
            a.row(k + 1).swap(a.row(ip));
            a.col(k + 1).swap(a.col(ip));
            pf = -pf;
        }
        const double pivot = a(k, k + 1);
        pf *= pivot;
        if (k + 2 < n) {
            for (int i = k + 2; i < n; ++i) {
                for (int j = k + 2; j < n; ++j) {
                    a(i, j) -=
                        (a(k, i) * a(k + 1, j) - a(k + 1, i) * a(k, j)) / pivot;
                }
            }
        }
    }
    return pf;
}

double MajoranaCovariance::zz_correlator(int i, int j) const {
    if (i < 0 || j <= i || j >= L_)
        throw std::invalid_argument("zz_correlator: need 0 <= i < j < L");
    // Z_i Z_j = prod of bond operators; Wick-contracts to the Pfaffian of
    // Gamma restricted to Majorana indices [2i+1, 2j].
    const int m = 2 * (j - i);
    Eigen::MatrixXd block = gamma_.block(2 * i + 1, 2 * i + 1, m, m);
    double pf = pfaffian(std::move(block));
    if (!std::isfinite(pf))
        throw std::runtime_error("zz_correlator: pfaffian over/underflow");
    return pf;
}

BornStepResult born_step(MajoranaCovariance& state, OpKind kind, int site,
                         double tau, KrausConvention conv, CounterStream& stream) {
    const double alpha = kraus_exponent(tau, conv);
    auto [a, b] = state.majorana_pair(kind, site);
    const double expect = std::clamp(state.gamma()(a, b), -1.0, 1.0);
    const double p_plus =
        std::clamp(0.5 * (1.0 + std::tanh(2.0 * alpha) * expect), 0.0, 1.0);
    const int s = stream.sign(p_plus);
    const double p = s > 0 ? p_plus : 1.0 - p_plus;
    state.weak_measure_pair(a, b, alpha, s);
    return {s, p};
}

TrajectoryResult run_gaussian_trajectory(const RunConfig& config,
                                         CounterStream& stream) {
    if (config.protocol != Protocol::PostSelected &&
        config.protocol != Protocol::Born)
        throw std::invalid_argument("run_gaussian_trajectory: wrong protocol");
    const int L = config.L;
    const bool born = config.protocol == Protocol::Born;
    const auto cuts = config.effective_cuts();

    MajoranaCovariance state = init_x_polarized(L);
    Word word = layer_word(ScheduleKind{FibonacciSchedule{}}, config.depth);

    TrajectoryResult result;
    result.series.cuts = cuts;
    result.series.values.resize(cuts.size());

    constexpr int kReorthEvery = 50;
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
                auto [a, b] = state.majorana_pair(kind, j);
                state.weak_measure_pair(a, b,
                                        kraus_exponent(tau, config.convention), +1);
            }
        }
        if (t % kReorthEvery == 0) state.reorthogonalize();

        const bool fib = is_fibonacci_number(t);
        if (t >= config.entropy_start && (!config.fibonacci_only_sampling || fib)) {
            result.series.times.push_back(t);
            result.series.fibonacci_mask.push_back(fib);
            for (std::size_t c = 0; c < cuts.size(); ++c)
                result.series.values[c].push_back(state.entropy(cuts[c]));
        }
    }
    for (int cut : config.final_cuts)
        result.final_arc.push_back(state.entropy(cut));
    if (config.record_zz) result.final_zz = state.zz_correlator(0, L / 2);
    return result;
}

}  // namespace fibmon
