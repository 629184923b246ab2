#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "fibmon/records.hpp"
#include "fibmon/schedule.hpp"

namespace fibmon {

// Single-particle transfer matrices in particle-hole space:
//   M_zz(k) = e^{i k/2 sz} e^{2 tau sy} e^{-i k/2 sz},  M_x = e^{-2 tau sy}.
// Each elementary factor has unit determinant.
Eigen::Matrix2cd momentum_transfer(double k, double tau, OpKind kind);

struct RelaxationRate {
    double rate;          // (1/f) ln sigma_max of M(w_n), f = |w_n|
    double rate_refined;  // two-generation difference estimator (same parity)
};

// Lyapunov rate of the Fibonacci product at generation n (n <= 40), via the
// word recursion with per-step renormalization.
RelaxationRate relaxation_spectrum(double k, double tau_x, double tau_zz, int n);

// Sequential evaluation (renormalized every 32 factors); used to
// cross-validate the recursion route on small generations.
double relaxation_spectrum_sequential(double k, double tau_x, double tau_zz, int n);

// Root of the k=0 gap over tau_x at fixed tau_zz (bisection on the slope
// sign of the V-shaped Gamma_0). Converges to tau_zz/phi with generation.
double gap_root(double tau_zz, int generation, double tol = 1e-9);

// (tau_x/phi, tau_zz/phi^2) for the post-selected protocol,
// (tau_x/sqrt(phi), tau_zz/phi) for Born.
std::pair<double, double> effective_couplings(Protocol protocol, double tau_x,
                                              double tau_zz);

// tau_x(tau_zz) = (tau_zz + tau_zz^3/(8 phi^2)) / sqrt(phi).
double born_critical_line(double tau_zz);

// tau_x(tau_zz) = tau_zz / phi.
double postselected_critical_line(double tau_zz);

// floor((t+1)/phi) - floor(t/phi); the t-th symbol of the infinite
// Fibonacci word (1-based).
int drive_signal(std::int64_t t);

// Closed-form Fourier coefficient of the periodized drive:
// F_n = (1/(n pi)) e^{-i n pi / phi^2} sin(n pi / phi^2); F_0 = 1/phi.
std::complex<double> fourier_coefficient(std::int64_t n);

// Integer-time spectrum: sum_n F_n (-1/2 + sum_m Delta_m(omega + omega_n)),
// Delta_m(a) = i a / (a^2 - (2 pi m)^2), omega_n = 2 pi n / phi.
// Truncation error ~ O(1/n_max) + O(|F|/m_max).
std::complex<double> broadened_spectrum(double omega, int n_max, int m_max);

// Magnus-expansion outcome averages for one trajectory record:
//   S_x,j  = (sqrt(phi)/t) sum_n w_n s_j(n)
//   S_zz,j = (phi/t) sum_n (1 - w_n) s_j(n)
//   R_xz,j = (1/t) sum_{n > m} s_j(n) s_j(m) (w_n - w_m)
struct MagnusStats {
    std::vector<double> s_x;
    std::vector<double> s_zz;
    std::vector<double> r_xz;
};

MagnusStats magnus_couplings(const MeasurementRecord& record, const Word& word,
                             int L);

}  // namespace fibmon
