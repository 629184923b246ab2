#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "fibmon/analytics.hpp"
#include "fibmon/stabilizer.hpp"
#include "fibmon/statevector.hpp"

using namespace fibmon;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_CASE("plus-state tableau: generators and first measurements") {
    auto tab = init_plus_tableau(3, false);
    CHECK(tab.check_invariants());
    CounterStream stream(1, 0);
    // X_1 on |+++> is determined +1
    auto r = tab.project(OpKind::X, 1, stream);
    CHECK(r.outcome == +1);
    CHECK(r.probability == 1.0);
    CHECK_FALSE(r.was_random);

    // Z_0 Z_1 on |+++>: random sign, entropy ln 2 across the first cut
    auto r2 = tab.project(OpKind::ZZ, 0, stream);
    CHECK(r2.probability == 0.5);
    CHECK(r2.was_random);
    CHECK(tab.entropy(1) == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(tab.check_invariants());

    // re-measuring the same op: same outcome, no state change
    auto r3 = tab.project(OpKind::ZZ, 0, stream);
    CHECK(r3.outcome == r2.outcome);
    CHECK(r3.probability == 1.0);
    CHECK(tab.entropy(1) == doctest::Approx(kLn2).epsilon(1e-12));
}

TEST_CASE("GHZ + reference tableau") {
    auto tab = init_plus_tableau(2, true);
    CHECK(tab.check_invariants());
    // stabilizer group of (|000> + |111>)/sqrt(2): every bipartition ln 2
    CHECK(tab.region_entropy(0, 1) == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(tab.region_entropy(0, 2) == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(tab.coherent_information() == doctest::Approx(kLn2).epsilon(1e-12));

    // deterministic correlators of the GHZ state
    CHECK(tab.spin_glass_correlator(0, 1) == +1);

    // projective X on all chain sites decouples the reference
    CounterStream stream(2, 0);
    tab.project(OpKind::X, 0, stream);
    tab.project(OpKind::X, 1, stream);
    CHECK(tab.coherent_information() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spin glass correlator states") {
    auto plus = init_plus_tableau(4, false);
    CHECK(plus.spin_glass_correlator(0, 2) == 0);

    // glue the whole ring: random GHZ with sign structure from outcomes
    CounterStream stream(5, 3);
    std::vector<int> outcomes;
    for (int j = 0; j < 3; ++j)
        outcomes.push_back(plus.project(OpKind::ZZ, j, stream).outcome);
    const int c02 = plus.spin_glass_correlator(0, 2);
    CHECK(c02 == outcomes[0] * outcomes[1]);
    CHECK(std::abs(plus.spin_glass_correlator(1, 3)) == 1);
}

TEST_CASE("deep ZZ-only ensemble realizes SW-SSB order") {
    // [|<ZZ>|] = 1 while [<ZZ>] = 0 within 3 sigma over 1000 trajectories
    const int n = 1000;
    double sum = 0.0, abs_sum = 0.0;
    for (int rep = 0; rep < n; ++rep) {
        auto tab = init_plus_tableau(8, false);
        CounterStream stream(777, rep);
        for (int layer = 0; layer < 4; ++layer)
            for (int j = 0; j < 8; ++j) tab.project(OpKind::ZZ, j, stream);
        const int c = tab.spin_glass_correlator(1, 5);
        sum += c;
        abs_sum += std::abs(c);
    }
    CHECK(abs_sum / n == doctest::Approx(1.0));
    CHECK(std::abs(sum / n) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("oracle equivalence: projective branch weights and entropies") {
    // The statevector follows the tableau's outcomes; the tableau's
    // determinism/randomness must match the oracle branch weights, and all
    // cut entropies must agree exactly.
    const int L = 7;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto tab = init_plus_tableau(L, false);
        auto sv = init_plus(L, false);
        CounterStream mask_stream(4000 + seed, 0);
        CounterStream outcome_stream(5000 + seed, 0);
        auto mask = realize_dilution({0.7, 0.8}, L, 21, mask_stream);
        for (std::int64_t t = 0; t < mask.depth; ++t) {
            const OpKind kind = mask.word[t] ? OpKind::X : OpKind::ZZ;
            for (int j = 0; j < L; ++j) {
                if (!mask.active[t][j]) continue;
                auto r = tab.project(kind, j, outcome_stream);
                auto [wp, wm] = sv.branch_weights(kind, j);
                const double w_s = r.outcome > 0 ? wp : wm;
                if (r.was_random) {
                    CHECK(w_s == doctest::Approx(0.5).epsilon(1e-10));
                } else {
                    CHECK(w_s == doctest::Approx(1.0).epsilon(1e-10));
                }
                sv.apply_kraus(kind, j, 25.0, r.outcome);
                sv.normalize();
            }
            for (int l = 1; l < L; ++l)
                CHECK(tab.entropy(l) ==
                      doctest::Approx(sv.entanglement_entropy(l)).epsilon(1e-9));
        }
        CHECK(tab.check_invariants());
    }
}

TEST_CASE("outcome frequencies on a fixed pattern (distribution check)") {
    // Z0Z1 then X0 then Z0Z1 on |+++>: each random with p = 1/2; 8 sign
    // histories should be uniform within 4 sigma over 10^4 samples.
    const int n = 10000;
    std::map<int, int> hist;
    for (int rep = 0; rep < n; ++rep) {
        auto tab = init_plus_tableau(3, false);
        CounterStream stream(31337, rep);
        const int s1 = tab.project(OpKind::ZZ, 0, stream).outcome;
        const int s2 = tab.project(OpKind::X, 0, stream).outcome;
        const int s3 = tab.project(OpKind::ZZ, 0, stream).outcome;
        hist[(s1 > 0) * 4 + (s2 > 0) * 2 + (s3 > 0)]++;
    }
    const double expect = n / 8.0;
    const double sigma = std::sqrt(n * (1.0 / 8) * (7.0 / 8));
    for (const auto& [key, count] : hist)
        CHECK(std::abs(count - expect) < 4.0 * sigma);
    CHECK(hist.size() == 8);
}

TEST_CASE("entropy series is outcome-independent for a fixed realization") {
    RunConfig cfg;
    cfg.protocol = Protocol::Clifford;
    cfg.L = 12;
    cfg.depth = 55;
    cfg.tau_x = p_to_tau(0.6);
    cfg.tau_zz = p_to_tau(0.5);
    cfg.cuts = {3, 6};
    CounterStream mask_stream(99, 0);
    auto mask = realize_dilution({0.6, 0.5}, 12, 55, mask_stream);
    CounterStream s1(1, 11), s2(2, 22);
    auto r1 = run_clifford_trajectory(cfg, mask, s1);
    auto r2 = run_clifford_trajectory(cfg, mask, s2);
    CHECK(r1.series.values == r2.series.values);
}

TEST_CASE("fully packed circuit: entropy tracks the dual of the drive signal") {
    // With 1 = X layer and 0 = ZZ layer from |++...+>, the half-cut entropy
    // after layer t is ln2 * (1 - w_t): GHZ after ZZ layers, product after
    // X layers.
    RunConfig cfg;
    cfg.protocol = Protocol::Clifford;
    cfg.L = 10;
    cfg.depth = 89;
    cfg.tau_x = p_to_tau(1.0 - 1e-15);
    cfg.tau_zz = p_to_tau(1.0 - 1e-15);
    auto mask = full_mask(10, 89);
    CounterStream stream(3, 0);
    auto res = run_clifford_trajectory(cfg, mask, stream);
    for (std::size_t i = 0; i < res.series.times.size(); ++i) {
        const std::int64_t t = res.series.times[i];
        const double expect = kLn2 * (1 - drive_signal(t));
        CHECK(res.series.values[0][i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("p_zz = 0 kills the entropy after the first X layer") {
    RunConfig cfg;
    cfg.protocol = Protocol::Clifford;
    cfg.L = 8;
    cfg.depth = 34;
    cfg.tau_x = p_to_tau(0.9);
    cfg.tau_zz = 0.0;
    CounterStream stream(8, 1);
    auto mask = realize_dilution({0.9, 0.0}, 8, 34, stream);
    auto res = run_clifford_trajectory(cfg, mask, stream);
    for (double v : res.series.values[0]) CHECK(v == 0.0);
}

TEST_CASE("tableau invariants hold after long diluted runs") {
    RunConfig cfg;
    cfg.protocol = Protocol::Clifford;
    cfg.L = 24;
    cfg.depth = 144;
    cfg.tau_x = p_to_tau(0.45);
    cfg.tau_zz = p_to_tau(0.55);
    cfg.entropy_start = 144;
    CounterStream stream(123, 7);
    auto mask = realize_dilution({0.45, 0.55}, 24, 144, stream);
    StabilizerTableau final_tab(2, false);
    run_clifford_trajectory(cfg, mask, stream, &final_tab);
    CHECK(final_tab.num_sites() == 24);
    CHECK(final_tab.check_invariants());
}
