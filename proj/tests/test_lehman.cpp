#include "rpower/lehman.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rpower;

namespace {

Natural random_prime(gmp_randclass& g, unsigned bits)
{
    Natural v = g.get_z_bits(bits);
    v |= Natural(1) << (bits - 1);
    mpz_nextprime(v.get_mpz_t(), v.get_mpz_t());
    return v;
}

bool contains(const std::vector<Candidate>& cs, const Natural& u)
{
    for (const auto& c : cs)
        if (c.u == u)
            return true;
    return false;
}

} // namespace

TEST(WindowParams, Examples)
{
    EXPECT_EQ(window_params(539, 2, 0).b_max, 4);
    EXPECT_EQ(window_params(pow2(16), 2, 0).b_max, 16);
    const Window w = window_params(539, 2, 0);
    // 2^(7/2) 539^(1/8) / (2 sqrt 6) = 5.07
    EXPECT_GE(w.gap_bound(2, 3), 5);
    EXPECT_EQ(w.gap_bound(2, 3), 6);
    EXPECT_EQ(w.a_max, 8);
}

TEST(WindowParams, BoundsAgainstFloatingPoint)
{
    for (unsigned r = 2; r <= 4; ++r)
        for (const char* n : {"539", "99991", "1000000007", "123456789012345678901"}) {
            const Natural N(n);
            const double lgN = lg(N);
            for (unsigned j = 0; j <= max_window_index(N, r); ++j) {
                const Window w = window_params(N, r, j);
                const double B = std::exp2(lgN / (r + 2) - (2.0 * r + 1) * j / 3);
                EXPECT_NEAR(w.b_max.get_d(), std::floor(B), 1.0);
                EXPECT_GE(w.b_max, 1);
                const double a_real = std::exp2((r + 2.0) * j / 3 + r + 1);
                EXPECT_GE(w.a_max.get_d(), std::ceil(a_real) - 1e-6);
                EXPECT_LE(w.a_max.get_d(), std::ceil(a_real) + 1);
                for (auto [a, b] : {std::pair{1ull, 1ull}, {3ull, 2ull}, {7ull, 5ull}}) {
                    const double U = std::pow(r, r + 1.5) * std::exp2(lgN / (2 * (r + 2)) + (1.0 - r) * j / 6 - 1) /
                                     std::sqrt(double(a * b));
                    const double got = w.gap_bound(a, b).get_d();
                    EXPECT_GE(got, U * (1 - 1e-12));
                    EXPECT_LE(got, U + 2);
                }
            }
        }
}

TEST(WindowParams, Errors)
{
    EXPECT_THROW(window_params(539, 2, max_window_index(Natural(539), 2) + 1), std::out_of_range);
    EXPECT_THROW(window_params(539, 1, 0), std::invalid_argument);
    EXPECT_THROW(window_params(7, 3, 0), std::invalid_argument);
    EXPECT_THROW(window_params(1, 2, 0), std::invalid_argument);
}

TEST(UCandidates, Examples)
{
    EXPECT_EQ(g_floor(75, 2, {2, 1}), 15);
    const auto c75 = u_candidates(75, 2, {2, 1}, window_params(75, 2, 0));
    ASSERT_GE(c75.size(), 2u);
    EXPECT_EQ(c75[0].u, 15);
    EXPECT_EQ(c75[1].u, 16);

    EXPECT_EQ(g_floor(539, 2, {2, 3}), 63);
    const auto c539 = u_candidates(539, 2, {2, 3}, window_params(539, 2, 0));
    EXPECT_TRUE(contains(c539, 64));
    EXPECT_EQ(c539.size(), 8u); // k = 0 .. 6 + 1
    for (const auto& c : c539) {
        EXPECT_EQ(c.g_floor, 63);
        EXPECT_LE(c.u, c.g_floor + 7);
    }
}

TEST(Detect, Examples)
{
    // 8 is not a square and the trial range [2, 8^(1/4)] is empty
    const auto d8 = detect(8, 2);
    ASSERT_TRUE(d8.factor);
    EXPECT_TRUE(*d8.factor == 2 || *d8.factor == 4);

    const auto d539 = detect(539, 2);
    ASSERT_TRUE(d539.factor);
    EXPECT_EQ(d539.stage, DetectOutcome::Stage::lehman);
    EXPECT_TRUE(*d539.factor == 7 || *d539.factor == 11 || *d539.factor == 49 || *d539.factor == 77);

    const auto d = detect(10403, 2);
    EXPECT_TRUE(d.r_power_free());

    EXPECT_EQ(detect(1024, 2).stage, DetectOutcome::Stage::power_test);
    EXPECT_EQ(detect(3 * 1000003, 2).stage, DetectOutcome::Stage::trial_division);
}

TEST(Detect, Errors)
{
    EXPECT_THROW(detect(1, 2), std::invalid_argument);
    EXPECT_THROW(detect(100, 1), std::invalid_argument);
    EXPECT_THROW(detect(100, 7), std::invalid_argument);
    EXPECT_NO_THROW(detect(128, 7));
}

TEST(Detect, SoundOnEveryN)
{
    for (std::uint64_t n = 4; n <= 3000; ++n)
        for (unsigned r = 2; r <= 4 && r + 1 <= bit_length(from_u64(n)); ++r) {
            const auto out = detect(from_u64(n), r);
            if (out.factor) {
                ASSERT_GT(*out.factor, 1);
                ASSERT_LT(*out.factor, n);
                ASSERT_EQ(n % to_u64(*out.factor), 0u);
            } else {
                ASSERT_FALSE(oracle::r_power_divisor(n, r)) << n << " r=" << r;
            }
        }
}

TEST(Detect, FilterDoesNotChangeTheAnswer)
{
    std::mt19937_64 rng(67);
    const auto primes = oracle::primes_in(100, 3000);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t p = primes[rng() % primes.size()], q = primes[rng() % primes.size()];
        const Natural N = Natural(p) * p * q;
        DetectOptions with, without;
        without.use_filter = false;
        const auto a = detect(N, 2, with), b = detect(N, 2, without);
        EXPECT_EQ(a.factor.has_value(), b.factor.has_value()) << N;
    }
}

TEST(Detect, ThreadCountDoesNotChangeTheResult)
{
    std::mt19937_64 rng(71);
    const auto primes = oracle::primes_in(1000, 20000);
    for (int i = 0; i < 30; ++i) {
        const std::uint64_t p = primes[rng() % primes.size()], q = primes[rng() % primes.size()];
        const Natural N = Natural(p) * p * q;
        const auto one = detect(N, 2);
        DetectOptions opt;
        opt.threads = 3;
        const auto three = detect(N, 2, opt);
        ASSERT_EQ(one.factor, three.factor) << N;
        if (one.hit) {
            EXPECT_EQ(one.hit->j, three.hit->j);
            EXPECT_EQ(one.hit->pair, three.hit->pair);
        }
    }
}

TEST(Detect, WindowGuaranteeOnConstructedInstances)
{
    gmp_randclass g(gmp_randinit_default);
    g.seed(73);
    std::mt19937_64 rng(73);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        const unsigned r = 2 + i % 2;
        const unsigned pbits = 8 + rng() % 33;
        const Natural p = random_prime(g, pbits);
        // q > N^(1/(r+2)) and p > N^(1/(r+2)) mean p^r < q^(r+1) and q < p^2
        const unsigned qbits = static_cast<unsigned>(std::ceil(double(pbits) * r / (r + 1))) + 1 +
                               rng() % std::max(1u, pbits - static_cast<unsigned>(std::ceil(double(pbits) * r / (r + 1))));
        const Natural q = random_prime(g, qbits);
        if (q == p)
            continue;
        const Natural N = pow(p, r) * q;
        if (!(pow(p, r + 2) > N && pow(q, r + 2) > N))
            continue;
        // p in [2^j N^(1/(r+2)), 2^(j+1) N^(1/(r+2))), i.e. 2^(j(r+2)) N <= p^(r+2)
        unsigned j = 0;
        while (pow(p, r + 2) >= N << ((j + 1) * (r + 2)))
            ++j;
        ASSERT_LE(j, max_window_index(N, r)) << N;
        const Window w = window_params(N, r, j);
        ASSERT_GE(w.b_max, 1);
        const Fraction f = farey_approximation(p, q, w.b_max);
        ASSERT_GE(f.a, 1) << "p=" << p << " q=" << q;
        ASSERT_LE(f.a, w.a_max) << "p=" << p << " q=" << q << " j=" << j;
        const CoprimePair pair{to_u64(f.a), to_u64(f.b)};
        const Natural u = f.a * q + r * f.b * p;
        const Natural g0 = g_floor(N, r, pair);
        ASSERT_GE(u, g0);
        ASSERT_LE(u, g0 + w.gap_bound(pair.a, pair.b) + 1) << "p=" << p << " q=" << q;
        const auto factor = try_candidate(N, r, Candidate{pair, u, g0}, j);
        ASSERT_TRUE(factor) << "p=" << p << " q=" << q;
        ++checked;
    }
    EXPECT_GT(checked, 200);
}

TEST(Detect, IterationBoundOnSmallPrimes)
{
    for (const char* n : {"10007", "1000003", "100000007"}) {
        const Natural N(n);
        SearchCounters c;
        DetectOptions opt;
        opt.counters = &c;
        EXPECT_TRUE(detect(N, 2, opt).r_power_free());
        EXPECT_LE(double(c.inner_iterations()), 660.0 * std::pow(N.get_d(), 0.25)) << n;
    }
}

TEST(DecideRPowerFull, Examples)
{
    auto v = decide_r_power_full(539, 2);
    EXPECT_TRUE(v.has_power);
    EXPECT_EQ(v.witness, Natural(7));
    EXPECT_FALSE(decide_r_power_full(30, 2).has_power);
    for (unsigned r = 2; r <= 12; ++r) {
        v = decide_r_power_full(pow2(r), r);
        EXPECT_TRUE(v.has_power);
        EXPECT_EQ(v.witness, Natural(2));
    }
    EXPECT_FALSE(decide_r_power_full(5, 9).has_power);
}

TEST(DecideRPowerFull, MatchesOracleUpToFourThousand)
{
    for (std::uint64_t n = 2; n <= 4000; ++n)
        for (unsigned r = 2; r <= 4; ++r) {
            const auto v = decide_r_power_full(from_u64(n), r);
            ASSERT_EQ(v.has_power, oracle::r_power_divisor(n, r).has_value()) << n << " r=" << r;
            if (v.has_power) {
                ASSERT_EQ(from_u64(n) % pow(*v.witness, r), 0);
            }
        }
}

TEST(DecideRPowerFull, LargeStructuredInputs)
{
    const Natural p("1000003"), q("999983"), s("10007");
    EXPECT_TRUE(decide_r_power_full(p * p * q, 2).has_power);
    EXPECT_FALSE(decide_r_power_full(p * q * s, 2).has_power);
    EXPECT_TRUE(decide_r_power_full(s * s * s * q, 3).has_power);
    EXPECT_FALSE(decide_r_power_full(s * s * q, 3).has_power);
    const auto v = decide_r_power_full(p * p * q * q * s, 2);
    ASSERT_TRUE(v.has_power);
    EXPECT_EQ((p * p * q * q * s) % (*v.witness * *v.witness), 0);
}
