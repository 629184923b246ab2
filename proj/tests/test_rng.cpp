#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fibmon/rng.hpp"

using namespace fibmon;

TEST_CASE("streams are deterministic and splittable") {
    CounterStream a(123, 5), b(123, 5), c(123, 6);
    bool identical = true, differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        identical = identical && (x == b.next_u64());
        differs = differs || (x != c.next_u64());
    }
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("uniform moments") {
    CounterStream s(99, 0);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(var - 1.0 / 12.0) < 5e-3);
}

TEST_CASE("cross-correlation of outcome bits between streams") {
    // Stream-independence contract: < 3 sigma binomial over 1e6 bits.
    const int n = 1000000;
    CounterStream s1(2024, 1), s2(2024, 2);
    std::int64_t agree = 0;
    for (int i = 0; i < n; ++i) {
        const bool b1 = s1.bernoulli(0.5);
        const bool b2 = s2.bernoulli(0.5);
        if (b1 == b2) ++agree;
    }
    const double sigma = std::sqrt(0.25 * n);
    CHECK(std::abs(double(agree) - 0.5 * n) < 3.0 * sigma);
}

TEST_CASE("block counter does not repeat across buffer refills") {
    CounterStream s(5, 5);
    std::vector<std::uint64_t> vals;
    for (int i = 0; i < 64; ++i) vals.push_back(s.next_u64());
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            CHECK(vals[i] != vals[j]);
}

TEST_CASE("sign draws match bernoulli threshold semantics") {
    CounterStream a(77, 0), b(77, 0);
    for (int i = 0; i < 1000; ++i) {
        const double p = (i % 100) / 100.0;
        const int s = a.sign(p);
        const bool hit = b.uniform() < p;
        CHECK(s == (hit ? +1 : -1));
    }
}
