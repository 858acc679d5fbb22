#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>

#include "iqbench/rng.hpp"

using namespace iqbench;

TEST_CASE("identical seeds give identical streams") {
    Rng a(123), b(123);
    for (int k = 0; k < 1000; ++k) CHECK(a.next_u64() == b.next_u64());
    Rng c(123), d(124);
    bool differ = false;
    for (int k = 0; k < 10; ++k) differ |= c.next_u64() != d.next_u64();
    CHECK(differ);
}

TEST_CASE("derive_seed separates stages and is stable") {
    CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("below(n) is unbiased enough and in range") {
    Rng rng(11);
    std::array<int, 5> counts{};
    for (int k = 0; k < 50000; ++k) {
        const auto v = rng.below(5);
        REQUIRE(v < 5);
        ++counts[v];
    }
    for (const int c : counts) {
        CHECK(c > 9200);   // expectation 10000, +-8 sigma
        CHECK(c < 10800);
    }
    CHECK(rng.below(0) == 0);
    CHECK(rng.below(1) == 0);
}

TEST_CASE("normal has the right first two moments") {
    Rng rng(13);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);       // sigma/sqrt(n) ~ 0.003
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("shuffle is a permutation and deterministic") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;

    Rng a(3), b(3);
    a.shuffle(v);
    b.shuffle(w);
    CHECK(v == w);
    CHECK(std::set<int>(v.begin(), v.end()).size() == 50);

    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(50);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted == expect);
}

TEST_CASE("shuffle visits permutations roughly uniformly") {
    // 3 elements -> 6 permutations; chi-square-ish sanity band.
    std::map<std::array<int, 3>, int> counts;
    for (int trial = 0; trial < 6000; ++trial) {
        std::vector<int> v{0, 1, 2};
        Rng rng(static_cast<std::uint64_t>(trial) + 1000);
        rng.shuffle(v);
        ++counts[{v[0], v[1], v[2]}];
    }
    REQUIRE(counts.size() == 6);
    for (const auto& [perm, c] : counts) {
        CHECK(c > 800);   // expectation 1000
        CHECK(c < 1200);
    }
}
