#include "fibmon/analytics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fibmon/golden.hpp"

namespace fibmon {

namespace {

constexpr double kPi = std::numbers::pi;

double sigma_max(const Eigen::Matrix2cd& a) {
    // Largest singular value from the Frobenius norm and determinant.
    const double t = a.squaredNorm();
    const double d = std::abs(a.determinant());
    const double disc = std::max(0.0, t * t - 4.0 * d * d);
    return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

struct ScaledProduct {
    Eigen::Matrix2cd mat;
    double log_scale;

    double log_sigma_max() const { return log_scale + std::log(sigma_max(mat)); }
};

// Renormalized per-generation products A_k ~ M(w_k); the recursion
// M(w_{k+1}) = M(w_{k-1}) M(w_k) follows from w_{k+1} = w_k w_{k-2}-style
// concatenation with w_k applied first in time.
std::vector<ScaledProduct> generation_products(double k, double tau_x,
                                               double tau_zz, int n) {
    const Eigen::Matrix2cd mx = momentum_transfer(k, tau_x, OpKind::X);
    const Eigen::Matrix2cd mzz = momentum_transfer(k, tau_zz, OpKind::ZZ);
    std::vector<ScaledProduct> prods;
    prods.reserve(n + 1);
    prods.push_back({mx, 0.0});        // M(w_0), w_0 = "1"
    if (n >= 1) prods.push_back({mzz * mx, 0.0});  // M(w_1), w_1 = "10"
    for (int g = 2; g <= n; ++g) {
        Eigen::Matrix2cd m = prods[g - 2].mat * prods[g - 1].mat;
        double scale = m.cwiseAbs().maxCoeff();
        if (scale <= 0.0) throw std::runtime_error("generation_products: null product");
        m /= scale;
        prods.push_back(
            {m, prods[g - 2].log_scale + prods[g - 1].log_scale + std::log(scale)});
    }
    return prods;
}

}  // namespace

Eigen::Matrix2cd momentum_transfer(double k, double tau, OpKind kind) {
    if (tau < 0.0) throw std::invalid_argument("momentum_transfer: tau < 0");
    const double ch = std::cosh(2.0 * tau), sh = std::sinh(2.0 * tau);
    Eigen::Matrix2cd m;
    const std::complex<double> i(0.0, 1.0);
    if (kind == OpKind::X) {
        // e^{-2 tau sy}
        m << ch, i * sh, -i * sh, ch;
    } else {
        // e^{i k/2 sz} e^{2 tau sy} e^{-i k/2 sz}
        m << ch, -i * sh * std::exp(i * k), i * sh * std::exp(-i * k), ch;
    }
    return m;
}

RelaxationRate relaxation_spectrum(double k, double tau_x, double tau_zz, int n) {
    if (n < 2 || n > kMaxFibGeneration)
        throw std::invalid_argument("relaxation_spectrum: generation outside [2,40]");
    const auto prods = generation_products(k, tau_x, tau_zz, n);
    const double f_n = static_cast<double>(fibonacci(n + 2));
    const double f_prev = static_cast<double>(fibonacci(n));  // |w_{n-2}|
    const double ln_n = prods[n].log_sigma_max();
    const double ln_prev = prods[n - 2].log_sigma_max();
    return {ln_n / f_n, (ln_n - ln_prev) / (f_n - f_prev)};
}

double relaxation_spectrum_sequential(double k, double tau_x, double tau_zz, int n) {
    if (n < 0 || n > 24)
        throw std::invalid_argument(
            "relaxation_spectrum_sequential: generation outside [0,24]");
    const Eigen::Matrix2cd mx = momentum_transfer(k, tau_x, OpKind::X);
    const Eigen::Matrix2cd mzz = momentum_transfer(k, tau_zz, OpKind::ZZ);
    const Word w = fib_word(n);
    Eigen::Matrix2cd prod = Eigen::Matrix2cd::Identity();
    double log_scale = 0.0;
    std::int64_t count = 0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        prod = (w[t] ? mx : mzz) * prod;  // later layers act from the left
        if (++count % 32 == 0) {
            const double scale = prod.cwiseAbs().maxCoeff();
            prod /= scale;
            log_scale += std::log(scale);
        }
    }
    return (log_scale + std::log(sigma_max(prod))) / static_cast<double>(w.size());
}

double gap_root(double tau_zz, int generation, double tol) {
    if (tau_zz <= 0.0) throw std::invalid_argument("gap_root: tau_zz <= 0");
    // Gamma_0(tau_x) is V-shaped; bisect on the sign of the local slope.
    auto gamma0 = [&](double tau_x) {
        return relaxation_spectrum(0.0, tau_x, tau_zz, generation).rate;
    };
    double lo = 1e-12, hi = 2.0 * tau_zz;
    const double dstep = 1e-7 * tau_zz;
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double slope = gamma0(mid + dstep) - gamma0(mid - dstep);
        if (slope > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> effective_couplings(Protocol protocol, double tau_x,
                                              double tau_zz) {
    if (tau_x < 0.0 || tau_zz < 0.0)
        throw std::invalid_argument("effective_couplings: negative strength");
    switch (protocol) {
        case Protocol::PostSelected:
            return {tau_x / kPhi, tau_zz / (kPhi * kPhi)};
        case Protocol::Born:
            return {tau_x / std::sqrt(kPhi), tau_zz / kPhi};
        default:
            throw std::invalid_argument("effective_couplings: weak protocols only");
    }
}

double born_critical_line(double tau_zz) {
    if (tau_zz < 0.0) throw std::invalid_argument("born_critical_line: tau_zz < 0");
    return (tau_zz + tau_zz * tau_zz * tau_zz / (8.0 * kPhi * kPhi)) /
           std::sqrt(kPhi);
}

double postselected_critical_line(double tau_zz) {
    if (tau_zz < 0.0)
        throw std::invalid_argument("postselected_critical_line: tau_zz < 0");
    return tau_zz / kPhi;
}

int drive_signal(std::int64_t t) {
    if (t < 1) throw std::invalid_argument("drive_signal: t must be >= 1");
    const long double phi = 1.61803398874989484820458683436563811772L;
    const long double a = std::floor(static_cast<long double>(t + 1) / phi);
    const long double b = std::floor(static_cast<long double>(t) / phi);
    return static_cast<int>(a - b);
}

std::complex<double> fourier_coefficient(std::int64_t n) {
    if (n == 0) return {1.0 / kPhi, 0.0};
    const double arg = static_cast<double>(n) * kPi / (kPhi * kPhi);
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, -arg));
    return phase * std::sin(arg) / (static_cast<double>(n) * kPi);
}

std::complex<double> broadened_spectrum(double omega, int n_max, int m_max) {
    if (n_max < 1 || m_max < 0)
        throw std::invalid_argument("broadened_spectrum: bad truncation");
    std::complex<double> total = 0.0;
    for (std::int64_t n = -n_max; n <= n_max; ++n) {
        const double alpha = omega + 2.0 * kPi * n / kPhi;
        std::complex<double> kernel = -0.5;
        for (int m = -m_max; m <= m_max; ++m) {
            const double da = alpha - 2.0 * kPi * m;
            if (std::abs(da) < 1e-9)
                throw std::domain_error("broadened_spectrum: pole proximity");
            kernel += std::complex<double>(0.0, alpha) /
                      (alpha * alpha - 4.0 * kPi * kPi * m * m);
        }
        total += fourier_coefficient(n) * kernel;
    }
    return total;
}

MagnusStats magnus_couplings(const MeasurementRecord& record, const Word& word,
                             int L) {
    if (L < 1) throw std::invalid_argument("magnus_couplings: bad L");
    const std::int64_t depth = static_cast<std::int64_t>(word.size());
    // Outcome table s_j(n); protocols I/II measure every site every layer.
    std::vector<std::vector<int>> s(L, std::vector<int>(depth, 0));
    for (const auto& ev : record.events) {
        if (ev.layer < 1 || ev.layer > depth || ev.site < 0 || ev.site >= L)
            throw std::invalid_argument("magnus_couplings: event outside record");
        s[ev.site][ev.layer - 1] = ev.outcome;
    }
    MagnusStats stats;
    stats.s_x.resize(L);
    stats.s_zz.resize(L);
    stats.r_xz.resize(L);
    const double t = static_cast<double>(depth);
    for (int j = 0; j < L; ++j) {
        double sum_x = 0.0, sum_zz = 0.0, r = 0.0;
        double prefix = 0.0, prefix_w = 0.0;  // sum s_m and sum s_m w_m, m < n
        for (std::int64_t n = 0; n < depth; ++n) {
            const double sn = s[j][n];
            const double wn = word[n] ? 1.0 : 0.0;
            sum_x += wn * sn;
            sum_zz += (1.0 - wn) * sn;
            r += sn * (wn * prefix - prefix_w);
            prefix += sn;
            prefix_w += sn * wn;
        }
        stats.s_x[j] = std::sqrt(kPhi) / t * sum_x;
        stats.s_zz[j] = kPhi / t * sum_zz;
        stats.r_xz[j] = r / t;
    }
    return stats;
}

}  // namespace fibmon
