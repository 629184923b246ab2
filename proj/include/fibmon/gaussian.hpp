#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "fibmon/records.hpp"
#include "fibmon/rng.hpp"
#include "fibmon/schedule.hpp"

namespace fibmon {

// Pure fermionic Gaussian trajectory state of the Jordan-Wigner chain,
// represented by the 2L x 2L real antisymmetric Majorana covariance
// Gamma_ab = <(i/2)[gamma_a, gamma_b]>.
//
// Mapping (sites 0-based): X_j = i g_{2j} g_{2j+1},
// Z_j Z_{j+1} = i g_{2j+1} g_{2j+2} for j < L-1. The periodic bond carries
// the parity-sector sign: Z_{L-1} Z_0 = i g_0 g_{2L-1} in the even sector
// reached from |++...+> (calibrated against the statevector oracle).
class MajoranaCovariance {
  public:
    explicit MajoranaCovariance(int L);

    int num_sites() const { return L_; }
    const Eigen::MatrixXd& gamma() const { return gamma_; }
    Eigen::MatrixXd& gamma() { return gamma_; }

    // Ordered Majorana pair (a, b) with O = i g_a g_b for the given gate.
    std::pair<int, int> majorana_pair(OpKind kind, int site) const;

    double expectation(OpKind kind, int site) const {
        auto [a, b] = majorana_pair(kind, site);
        return gamma_(a, b);
    }

    // Conditional Gaussian update for the Kraus factor e^{alpha s (i g_a g_b)}:
    //   lambda = s tanh(2 alpha), D = 1 + lambda G_ab, mu = sech(2 alpha)
    //   G'_kl = G_kl + (lambda/D)(G_kb G_la - G_ka G_lb)   k,l outside {a,b}
    //   G'_al = (mu/D) G_al, G'_bl = (mu/D) G_bl, G'_ab = (G_ab + lambda)/D.
    void weak_measure_pair(int a, int b, double alpha, int s);

    // Max |(Gamma Gamma^T - 1)_ij|; pure states keep this at numerical noise.
    double purity_defect() const;

    // Nearest orthogonal antisymmetric matrix (polar factor, then exact
    // antisymmetrization). Called periodically to absorb drift.
    void reorthogonalize();

    // Entropy (nats) of contiguous sites [start, start+len).
    double region_entropy(int start, int len) const;
    double entropy(int cut) const { return region_entropy(0, cut); }

    // <Z_i Z_j> (i < j) via the Pfaffian of the Majorana string block.
    double zz_correlator(int i, int j) const;

  private:
    int L_;
    Eigen::MatrixXd gamma_;
};

MajoranaCovariance init_x_polarized(int L);

// Samples s from p(s) = (1 + s tanh(2 alpha) <O>)/2 and applies the update.
BornStepResult born_step(MajoranaCovariance& state, OpKind kind, int site,
                         double tau, KrausConvention conv, CounterStream& stream);

// Pfaffian of a real antisymmetric matrix (skew elimination with pivoting).
double pfaffian(Eigen::MatrixXd a);

// Protocols I and II. Post-selected trajectories force s = +1 and consume no
// randomness; Born trajectories draw once per measurement.
TrajectoryResult run_gaussian_trajectory(const RunConfig& config,
                                         CounterStream& stream);

}  // namespace fibmon
