#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fibmon/gaussian.hpp"
#include "fibmon/golden.hpp"
#include "fibmon/statevector.hpp"

using namespace fibmon;

namespace {
constexpr double kLn2 = 0.6931471805599453;

// Drives both backends through the same Born steps with a shared stream.
struct PairedRun {
    PureState sv;
    MajoranaCovariance cov;
    CounterStream sv_stream;
    CounterStream cov_stream;

    PairedRun(int L, std::uint64_t seed)
        : sv(init_plus(L, false)),
          cov(init_x_polarized(L)),
          sv_stream(seed, 0),
          cov_stream(seed, 0) {}
};
}  // namespace

TEST_CASE("x-polarized initial covariance") {
    auto st = init_x_polarized(2);
    CHECK(st.gamma()(0, 1) == 1.0);
    CHECK(st.gamma()(1, 0) == -1.0);
    CHECK(st.gamma()(2, 3) == 1.0);
    CHECK(std::abs(st.gamma()(0, 2)) == 0.0);
    for (int j = 0; j < 2; ++j)
        CHECK(st.expectation(OpKind::X, j) == doctest::Approx(1.0));
    auto big = init_x_polarized(8);
    for (int l = 1; l < 8; ++l) CHECK(std::abs(big.entropy(l)) < 1e-12);
    CHECK(big.purity_defect() < 1e-14);
}

TEST_CASE("weak measurement basics") {
    auto st = init_x_polarized(4);
    auto before = st.gamma();
    st.weak_measure_pair(2, 3, 0.0, +1);  // tau = 0: no change
    CHECK((st.gamma() - before).cwiseAbs().maxCoeff() < 1e-15);

    // eigenstate is unchanged for any strength
    st.weak_measure_pair(2, 3, 1.7, +1);
    CHECK((st.gamma() - before).cwiseAbs().maxCoeff() < 1e-12);

    // update rule for the measured pair
    auto fresh = init_x_polarized(4);
    auto [a, b] = fresh.majorana_pair(OpKind::ZZ, 1);
    fresh.weak_measure_pair(a, b, 0.5, -1);
    CHECK(fresh.gamma()(a, b) == doctest::Approx(-std::tanh(1.0)).epsilon(1e-12));
    CHECK(fresh.purity_defect() < 1e-12);
}

TEST_CASE("projective ZZ drives the pair correlator to s") {
    auto st = init_x_polarized(4);
    auto [a, b] = st.majorana_pair(OpKind::ZZ, 0);
    st.weak_measure_pair(a, b, 30.0, +1);
    CHECK(st.gamma()(a, b) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(st.entropy(1) == doctest::Approx(kLn2).epsilon(1e-9));
}

TEST_CASE("oracle equivalence: expectations, probabilities, outcomes, entropies") {
    const int L = 8;
    const double tau_x = 0.35, tau_zz = 0.52;
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        PairedRun run(L, seed);
        Word word = layer_word(ScheduleKind{FibonacciSchedule{}}, 34);
        for (std::int64_t t = 1; t <= 34; ++t) {
            const OpKind kind = word[t - 1] ? OpKind::X : OpKind::ZZ;
            const double tau = word[t - 1] ? tau_x : tau_zz;
            for (int j = 0; j < L; ++j) {
                const double e_sv = run.sv.expectation(kind, j);
                const double e_cov = run.cov.expectation(kind, j);
                CHECK(e_sv == doctest::Approx(e_cov).epsilon(1e-9));
                auto r_sv = born_step(run.sv, kind, j, tau,
                                      KrausConvention::ExponentTau, run.sv_stream);
                auto r_cov = born_step(run.cov, kind, j, tau,
                                       KrausConvention::ExponentTau, run.cov_stream);
                REQUIRE(r_sv.outcome == r_cov.outcome);
                CHECK(r_sv.probability ==
                      doctest::Approx(r_cov.probability).epsilon(1e-10));
            }
            for (int l = 1; l < L; ++l)
                CHECK(run.sv.entanglement_entropy(l) ==
                      doctest::Approx(run.cov.entropy(l)).epsilon(1e-9));
        }
    }
}

TEST_CASE("zz correlator matches the oracle on random trajectories") {
    const int L = 8;
    PairedRun run(L, 21);
    Word word = layer_word(ScheduleKind{FibonacciSchedule{}}, 21);
    for (std::int64_t t = 1; t <= 21; ++t) {
        const OpKind kind = word[t - 1] ? OpKind::X : OpKind::ZZ;
        for (int j = 0; j < L; ++j) {
            born_step(run.sv, kind, j, 0.4, KrausConvention::ExponentTau,
                      run.sv_stream);
            born_step(run.cov, kind, j, 0.4, KrausConvention::ExponentTau,
                      run.cov_stream);
        }
        for (int i = 0; i < L - 1; ++i)
            for (int j = i + 1; j < L; ++j)
                CHECK(run.sv.zz_correlator(i, j) ==
                      doctest::Approx(run.cov.zz_correlator(i, j))
                          .epsilon(1e-8)
                          .scale(1.0));
    }
}

TEST_CASE("product state has vanishing zz correlator; deep ZZ evolution -> +1") {
    auto st = init_x_polarized(6);
    CHECK(std::abs(st.zz_correlator(1, 4)) < 1e-10);
    RunConfig cfg;
    cfg.protocol = Protocol::PostSelected;
    cfg.L = 6;
    cfg.depth = 55;
    cfg.tau_x = 0.0;
    cfg.tau_zz = 2.0;
    cfg.record_zz = true;
    cfg.entropy_start = 55;
    CounterStream stream(1, 0);
    auto res = run_gaussian_trajectory(cfg, stream);
    CHECK(res.final_zz == doctest::Approx(1.0).epsilon(1e-8));
    // cat state: half-cut entropy ln 2
    CHECK(res.series.values[0].back() == doctest::Approx(kLn2).epsilon(1e-8));
}

TEST_CASE("pure X dynamics keeps entropy at zero") {
    RunConfig cfg;
    cfg.protocol = Protocol::PostSelected;
    cfg.L = 8;
    cfg.depth = 100;
    cfg.tau_x = 0.7;
    cfg.tau_zz = 0.0;
    CounterStream stream(1, 0);
    auto res = run_gaussian_trajectory(cfg, stream);
    CHECK(std::abs(res.series.values[0].back()) < 1e-10);
}

TEST_CASE("antisymmetry and purity survive many random steps") {
    auto st = init_x_polarized(8);
    CounterStream stream(314, 0);
    for (int step = 0; step < 10000; ++step) {
        const OpKind kind = stream.bernoulli(0.5) ? OpKind::X : OpKind::ZZ;
        const int site = int(stream.uniform() * 8);
        born_step(st, kind, site, 0.1 + stream.uniform(),
                  KrausConvention::ExponentTau, stream);
        if (step % 400 == 0) st.reorthogonalize();
    }
    CHECK((st.gamma() + st.gamma().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    st.reorthogonalize();
    CHECK(st.purity_defect() < 1e-8);
}

TEST_CASE("global parity (pfaffian sign) is constant along trajectories") {
    auto st = init_x_polarized(6);
    const double sign0 = pfaffian(st.gamma()) > 0 ? 1.0 : -1.0;
    CounterStream stream(159, 0);
    for (int step = 0; step < 300; ++step) {
        const OpKind kind = stream.bernoulli(0.5) ? OpKind::X : OpKind::ZZ;
        born_step(st, kind, int(stream.uniform() * 6), 0.6,
                  KrausConvention::ExponentTau, stream);
        const double pf = pfaffian(st.gamma());
        CHECK(pf * sign0 > 0.0);
        CHECK(std::abs(std::abs(pf) - 1.0) < 1e-6);
    }
}

TEST_CASE("pfaffian on known matrices") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    auto set = [&](int i, int j, double v) {
        a(i, j) = v;
        a(j, i) = -v;
    };
    set(0, 1, 2.0);
    set(2, 3, 3.0);
    CHECK(pfaffian(a) == doctest::Approx(6.0).epsilon(1e-14));
    set(0, 2, 1.5);
    set(1, 3, 0.5);
    set(0, 3, -1.0);
    set(1, 2, 2.5);
    // pf = a01 a23 - a02 a13 + a03 a12
    CHECK(pfaffian(a) ==
          doctest::Approx(2.0 * 3.0 - 1.5 * 0.5 + (-1.0) * 2.5).epsilon(1e-12));
    // pf(A)^2 = det(A)
    CHECK(pfaffian(a) * pfaffian(a) == doctest::Approx(a.determinant()).epsilon(1e-10));
}

TEST_CASE("entropy converges at late Fibonacci times in the gapped phases") {
    // Consecutive Fibonacci times alternate in the type of the layer they
    // end on (w_k ends in X for even k, ZZ for odd k), so the Cauchy check
    // applies between Fibonacci times of equal parity.
    for (auto [tx, tz] : {std::pair{0.8, 0.4}, std::pair{0.2, 0.9}}) {
        RunConfig cfg;
        cfg.protocol = Protocol::PostSelected;
        cfg.L = 32;
        cfg.depth = 377;
        cfg.tau_x = tx;
        cfg.tau_zz = tz;
        cfg.fibonacci_only_sampling = true;
        CounterStream stream(7, 0);
        auto res = run_gaussian_trajectory(cfg, stream);
        const auto& v = res.series.values[0];
        REQUIRE(v.size() >= 5);
        CHECK(std::abs(v[v.size() - 1] - v[v.size() - 3]) < 1e-2);
        CHECK(std::abs(v[v.size() - 2] - v[v.size() - 4]) < 1e-2);
    }
}
