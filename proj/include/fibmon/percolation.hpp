#pragma once

#include <cstdint>
#include <vector>

#include "fibmon/records.hpp"
#include "fibmon/rng.hpp"
#include "fibmon/schedule.hpp"

namespace fibmon {

// Space-time bond lattice of a protocol-III realization: an active ZZ slot
// glues the world lines of neighboring sites at that layer, an active X slot
// cuts the site's world line. Clusters are tracked with a streaming
// union-find over live world-line segments, so memory stays proportional to
// the number of cuts rather than L x T.
class BondLattice {
  public:
    BondLattice(int L, std::int64_t depth);

    // Applies one layer. `kind` follows the word (X layer or ZZ layer);
    // `active[j]` marks slot j (site for X, left bond site for ZZ).
    void apply_layer(OpKind kind, const std::vector<bool>& active);

    // Cluster label of site j's final world-line segment.
    int final_label(int j);

    int num_sites() const { return L_; }

  private:
    int find(int a);
    void unite(int a, int b);

    int L_;
    std::int64_t depth_;
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<int> frontier_;  // live segment per site
};

BondLattice build_lattice(const DilutionMask& mask);

// ln2 x number of clusters holding final-time sites on both sides of the
// periodic bipartition {[0, cut), [cut, L)}. Matches the stabilizer entropy
// exactly for shared realizations.
double final_entropy_proxy(BondLattice& lattice, int cut);

// Analytic self-dual critical line p_zz(p_x) = 1 - (1 - p_x)^phi.
double critical_line_p(double p_x);

struct PercolationSweepResult {
    std::vector<double> mean;    // per cut: Born-placement-averaged proxy
    std::vector<double> stderr_; // standard error of the mean
    std::vector<double> span_probability;  // P(proxy > 0) per cut
    int n_realizations = 0;
};

// Ensemble of dilution realizations at (p_x, p_zz) evaluated on `cuts`.
PercolationSweepResult sweep_percolation(int L, std::int64_t depth, double p_x,
                                         double p_zz, const std::vector<int>& cuts,
                                         int n_realizations,
                                         std::uint64_t master_seed,
                                         std::uint64_t stream_offset = 0);

}  // namespace fibmon
