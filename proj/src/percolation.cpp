#include "fibmon/percolation.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fibmon/golden.hpp"

namespace fibmon {

namespace {
constexpr double kLn2 = 0.6931471805599453094;
}

BondLattice::BondLattice(int L, std::int64_t depth) : L_(L), depth_(depth) {
    if (L < 2) throw std::invalid_argument("BondLattice: L < 2");
    parent_.resize(L);
    size_.assign(L, 1);
    frontier_.resize(L);
    for (int j = 0; j < L; ++j) {
        parent_[j] = j;
        frontier_[j] = j;
    }
}

int BondLattice::find(int a) {
    int root = a;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[a] != root) {
        int next = parent_[a];
        parent_[a] = root;
        a = next;
    }
    return root;
}

void BondLattice::unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
}

void BondLattice::apply_layer(OpKind kind, const std::vector<bool>& active) {
    if (static_cast<int>(active.size()) != L_)
        throw std::invalid_argument("apply_layer: slot count mismatch");
    if (kind == OpKind::X) {
        for (int j = 0; j < L_; ++j) {
            if (!active[j]) continue;
            // Fresh world-line segment above the cut.
            const int id = static_cast<int>(parent_.size());
            parent_.push_back(id);
            size_.push_back(1);
            frontier_[j] = id;
        }
    } else {
        for (int j = 0; j < L_; ++j) {
            if (!active[j]) continue;
            unite(frontier_[j], frontier_[(j + 1) % L_]);
        }
    }
}

int BondLattice::final_label(int j) { return find(frontier_[j]); }

BondLattice build_lattice(const DilutionMask& mask) {
    BondLattice lattice(mask.L, mask.depth);
    for (std::int64_t t = 0; t < mask.depth; ++t)
        lattice.apply_layer(mask.word[t] ? OpKind::X : OpKind::ZZ, mask.active[t]);
    return lattice;
}

double final_entropy_proxy(BondLattice& lattice, int cut) {
    const int L = lattice.num_sites();
    if (cut < 1 || cut >= L)
        throw std::invalid_argument("final_entropy_proxy: bad cut");
    // in-flag = 1, out-flag = 2 per cluster root
    std::unordered_map<int, int> flags;
    for (int j = 0; j < L; ++j)
        flags[lattice.final_label(j)] |= (j < cut) ? 1 : 2;
    int straddling = 0;
    for (const auto& [root, f] : flags)
        if (f == 3) ++straddling;
    return kLn2 * straddling;
}

double critical_line_p(double p_x) {
    if (p_x < 0.0 || p_x > 1.0)
        throw std::invalid_argument("critical_line_p: p_x outside [0,1]");
    return 1.0 - std::pow(1.0 - p_x, kPhi);
}

PercolationSweepResult sweep_percolation(int L, std::int64_t depth, double p_x,
                                         double p_zz, const std::vector<int>& cuts,
                                         int n_realizations,
                                         std::uint64_t master_seed,
                                         std::uint64_t stream_offset) {
    if (n_realizations < 1)
        throw std::invalid_argument("sweep_percolation: need realizations");
    PercolationSweepResult out;
    out.n_realizations = n_realizations;
    out.mean.assign(cuts.size(), 0.0);
    out.stderr_.assign(cuts.size(), 0.0);
    out.span_probability.assign(cuts.size(), 0.0);
    std::vector<double> sum(cuts.size(), 0.0), sum2(cuts.size(), 0.0);
    std::vector<double> span(cuts.size(), 0.0);
    const DilutedFibonacciSchedule kind{p_x, p_zz};
    for (int r = 0; r < n_realizations; ++r) {
        CounterStream stream(master_seed, stream_offset + r);
        DilutionMask mask = realize_dilution(kind, L, depth, stream);
        BondLattice lattice = build_lattice(mask);
        for (std::size_t c = 0; c < cuts.size(); ++c) {
            const double s = final_entropy_proxy(lattice, cuts[c]);
            sum[c] += s;
            sum2[c] += s * s;
            if (s > 0.0) span[c] += 1.0;
        }
    }
    for (std::size_t c = 0; c < cuts.size(); ++c) {
        const double n = n_realizations;
        out.mean[c] = sum[c] / n;
        const double var = std::max(0.0, sum2[c] / n - out.mean[c] * out.mean[c]);
        out.stderr_[c] = std::sqrt(var / n);
        out.span_probability[c] = span[c] / n;
    }
    return out;
}

}  // namespace fibmon
