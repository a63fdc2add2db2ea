#include "rpower/arith.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace rpower;

TEST(Isqrt, Examples)
{
    EXPECT_EQ(isqrt(0), 0);
    EXPECT_EQ(isqrt(16), 4);
    EXPECT_EQ(isqrt(15), 3);
    EXPECT_EQ(isqrt(1), 1);
}

TEST(Iroot, Examples)
{
    EXPECT_EQ(iroot(243, 5), 3);
    EXPECT_EQ(iroot(244, 5), 3);
    EXPECT_EQ(iroot(1, 7), 1);
    EXPECT_EQ(iroot(0, 3), 0);
    EXPECT_EQ(iroot(1000, 1), 1000);
    EXPECT_THROW(iroot(10, 0), std::invalid_argument);
}

TEST(Iroot, MatchesOracleBelowTwentyThousand)
{
    for (std::uint64_t n = 0; n <= 20000; ++n) {
        ASSERT_EQ(isqrt(from_u64(n)), from_u64(oracle::floor_root(n, 2))) << n;
        for (unsigned k = 1; k <= 20; ++k)
            ASSERT_EQ(iroot(from_u64(n), k), from_u64(oracle::floor_root(n, k))) << n << " " << k;
    }
}

TEST(Iroot, FloorContractOnLargeValues)
{
    std::mt19937_64 rng(7);
    gmp_randclass g(gmp_randinit_default);
    g.seed(11);
    for (int i = 0; i < 300; ++i) {
        const Natural n = g.get_z_bits(1 + rng() % 512);
        const unsigned k = 1 + rng() % 40;
        const Natural x = iroot(n, k);
        ASSERT_LE(pow(x, k), n);
        ASSERT_GT(pow(x + 1, k), n);
    }
}

TEST(Iroot, ExactPowersAndNeighbours)
{
    for (unsigned k = 2; k <= 9; ++k)
        for (std::uint64_t b : {2ull, 3ull, 10ull, 12345ull, 99991ull}) {
            const Natural n = pow(from_u64(b), k);
            EXPECT_EQ(iroot(n, k), b);
            EXPECT_EQ(iroot(n - 1, k), b - 1);
            EXPECT_EQ(iroot(n + 1, k), b);
        }
}

TEST(CeilRoot, Contract)
{
    for (std::uint64_t n = 1; n < 3000; ++n)
        for (unsigned den : {1u, 4u, 27u, 64u})
            for (unsigned k = 1; k <= 4; ++k) {
                const Natural x = ceil_root(from_u64(n), den, k);
                ASSERT_GE(pow(x, k) * den, n);
                ASSERT_LT(pow(x - 1, k) * den, n);
            }
}

TEST(IsRPower, Examples)
{
    EXPECT_EQ(is_r_power(1024, 2), Natural(32));
    EXPECT_EQ(is_r_power(1000, 3), Natural(10));
    EXPECT_FALSE(is_r_power(1001, 3));
    EXPECT_EQ(is_r_power(1, 5), Natural(1));
}

TEST(Gcd, Examples)
{
    EXPECT_EQ(gcd(12, 18), 6);
    EXPECT_EQ(gcd(7, 0), 7);
    EXPECT_EQ(gcd(35, 64), 1);
    EXPECT_EQ(gcd(0, 0), 0);
    EXPECT_EQ(gcd_u64(0, 0), 0u);
    EXPECT_EQ(gcd_u64(84, 36), 12u);
}

TEST(Conversions, RoundTrip)
{
    for (std::uint64_t v : {0ull, 1ull, 0xffffffffull, 0x100000000ull, ~0ull}) {
        EXPECT_TRUE(fits_u64(from_u64(v)));
        EXPECT_EQ(to_u64(from_u64(v)), v);
    }
    EXPECT_FALSE(fits_u64(pow2(64)));
    EXPECT_THROW(to_u64(pow2(64)), std::overflow_error);
    for (i128 v : {i128(0), i128(-1), i128(1) << 100, -(i128(1) << 120) + 7})
        EXPECT_TRUE(to_i128(from_i128(v)) == v);
}

TEST(CoprimePairs, Examples)
{
    using V = std::vector<CoprimePair>;
    EXPECT_EQ(coprime_pairs(2, 2), (V{{1, 1}, {1, 2}, {2, 1}}));
    EXPECT_EQ(coprime_pairs(3, 1), (V{{1, 1}, {2, 1}, {3, 1}}));
    const RatioBounds strict{Ratio{1, 1}, Ratio{8, 1}, false};
    EXPECT_EQ(coprime_pairs(8, 1, strict), (V{{2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 1}}));
    const RatioBounds closed{Ratio{1, 1}, Ratio{8, 1}, true};
    EXPECT_EQ(coprime_pairs(8, 1, closed).size(), 8u);
    EXPECT_THROW(coprime_pairs(0, 3), std::invalid_argument);
}

TEST(CoprimePairs, ExhaustiveAgainstFilteredDoubleLoop)
{
    const std::vector<RatioBounds> bounds{
        {},
        {Ratio{1, 1}, Ratio{8, 1}, false},
        {Ratio{1, 1}, Ratio{8, 1}, true},
        {Ratio{2, 3}, Ratio{7, 2}, false},
        {std::nullopt, Ratio{5, 4}, false},
    };
    for (std::uint64_t am : {1ull, 7ull, 64ull, 200ull})
        for (std::uint64_t bm : {1ull, 13ull, 200ull})
            for (const auto& bd : bounds) {
                std::vector<CoprimePair> expect;
                for (std::uint64_t a = 1; a <= am; ++a)
                    for (std::uint64_t b = 1; b <= bm; ++b) {
                        if (std::gcd(a, b) != 1)
                            continue;
                        // compare a/b against the bounds by cross-multiplying
                        if (bd.lo) {
                            const auto l = a * bd.lo->den, rgt = b * bd.lo->num;
                            if (bd.inclusive ? l < rgt : l <= rgt)
                                continue;
                        }
                        if (bd.hi) {
                            const auto l = a * bd.hi->den, rgt = b * bd.hi->num;
                            if (bd.inclusive ? l > rgt : l >= rgt)
                                continue;
                        }
                        expect.push_back({a, b});
                    }
                ASSERT_EQ(coprime_pairs(am, bm, bd), expect) << am << " " << bm;
            }
}

TEST(Farey, ApproximationBound)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 3000; ++i) {
        const Natural num = from_u64(1 + rng() % 1'000'000'000);
        const Natural den = from_u64(1 + rng() % 1'000'000);
        const Natural order = from_u64(1 + rng() % 5000);
        const Fraction f = farey_approximation(num, den, order);
        ASSERT_GE(f.b, 1);
        ASSERT_LE(f.b, order);
        ASSERT_EQ(gcd(f.a, f.b), 1);
        // |num/den - a/b| <= 1/((order+1) b)  <=>  |num b - a den| (order+1) <= den
        Natural diff = num * f.b - f.a * den;
        if (diff < 0)
            diff = -diff;
        ASSERT_LE(diff * (order + 1), den) << num << "/" << den << " order " << order;
    }
}
