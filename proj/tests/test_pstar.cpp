#include "rpower/pstar.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace rpower;

TEST(Primality, SmallValuesMatchSieve)
{
    const auto s = oracle::sieve(200000);
    for (std::uint64_t n = 0; n <= 200000; ++n)
        ASSERT_EQ(is_prime_u64(n), s[n]) << n;
}

TEST(Primality, KnownLargeValues)
{
    EXPECT_TRUE(is_prime_u64(18446744073709551557ull));
    EXPECT_FALSE(is_prime_u64(18446744073709551559ull));
    // strong pseudoprime to bases 2..11
    EXPECT_FALSE(is_prime_u64(3825123056546413051ull));
    EXPECT_FALSE(is_prime_u64(3215031751ull));
    EXPECT_TRUE(is_probable_prime(Natural("170141183460469231731687303715884105727")));
    EXPECT_FALSE(is_probable_prime(Natural("170141183460469231731687303715884105729")));
}

TEST(GenInstance, Invariants)
{
    for (unsigned j : {6u, 9u, 12u, 21u})
        for (std::uint64_t s = 0; s < 25; ++s) {
            const auto inst = gen_instance(j, s);
            EXPECT_TRUE(is_probable_prime(inst.p));
            EXPECT_TRUE(is_probable_prime(inst.q));
            EXPECT_LT(inst.q, inst.p);
            EXPECT_LT(inst.p, 8 * inst.q);
            EXPECT_EQ(inst.N, inst.p * inst.p * inst.q);
            // the same condition stated through N alone
            EXPECT_GT(pow(inst.p, 3), inst.N);
            EXPECT_LT(pow(inst.p, 3), 8 * inst.N);
            const Natural ten_j = pow(Natural(10), j);
            EXPECT_LE(pow(inst.q, 3), ten_j);
            EXPECT_GE(64 * pow(inst.q, 3), ten_j);
        }
    EXPECT_THROW(gen_instance(5, 1), std::invalid_argument);
}

TEST(GenInstance, Deterministic)
{
    const auto a = gen_instance(21, 12345), b = gen_instance(21, 12345), c = gen_instance(21, 12346);
    EXPECT_EQ(a.N, b.N);
    EXPECT_EQ(a.p, b.p);
    EXPECT_NE(a.N, c.N);
}

TEST(GenInstance, DigitCountStaysNearJ)
{
    // 10^j / 64 < N < 64 * 10^j
    for (unsigned j : {12u, 18u})
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto digits = gen_instance(j, s).N.get_str().size();
            EXPECT_GE(digits + 1, j);
            EXPECT_LE(digits, j + 2);
        }
}

TEST(InstanceFile, RoundTrip)
{
    std::vector<PStarInstance> v{gen_instance(12, 1), gen_instance(15, 2)};
    std::stringstream ss;
    write_instances(ss, v);
    const auto back = read_instances(ss);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].N, v[i].N);
        EXPECT_EQ(back[i].p, v[i].p);
        EXPECT_EQ(back[i].q, v[i].q);
        EXPECT_EQ(back[i].seed, v[i].seed);
    }
    std::stringstream blind("847\n");
    const auto b = read_instances(blind);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].N, 847);
}

TEST(PStarSolve, Examples)
{
    auto s = pstar_solve(847);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->p, 11);
    EXPECT_EQ(s->q, 7);
    s = pstar_solve(103 * 103 * 101);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->p, 103);
    EXPECT_EQ(s->q, 101);
    EXPECT_FALSE(pstar_solve(1000003));
    EXPECT_FALSE(pstar_solve(539)); // 7^2 11 has q > p
}

TEST(PStarSolve, CompositeShapesSolveToo)
{
    // p = 35, q = 33: q < p < 8q, neither prime
    const auto s = pstar_solve(35 * 35 * 33);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->p, 35);
    EXPECT_EQ(s->q, 33);
}

TEST(PStarSolve, RoundTripAndOptions)
{
    for (unsigned j : {9u, 12u, 15u})
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto inst = gen_instance(j, seed);
            const auto s = pstar_solve(inst.N);
            ASSERT_TRUE(s) << inst.N;
            EXPECT_EQ(s->p, inst.p);
            EXPECT_EQ(s->q, inst.q);
            PStarOptions loose;
            loose.tight_gap = false;
            loose.use_filter = false;
            loose.threads = 2;
            const auto t = pstar_solve(inst.N, loose);
            ASSERT_TRUE(t);
            EXPECT_EQ(t->p, inst.p);
            PStarOptions small_b;
            small_b.b_override = Natural(2);
            const auto u = pstar_solve(inst.N, small_b);
            ASSERT_TRUE(u);
            EXPECT_EQ(u->p, inst.p);
        }
}

TEST(PStarSolve, CandidateCountNeverUnderestimates)
{
    for (unsigned j : {12u, 15u, 18u, 21u})
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const auto inst = gen_instance(j, seed);
            const Natural B = pstar_default_order(inst.N);
            const Fraction f = farey_approximation(inst.p, inst.q, B);
            ASSERT_GE(f.a, f.b);
            ASSERT_LE(f.a, 8 * f.b);
            const CoprimePair pair{to_u64(f.a), to_u64(f.b)};
            const Natural u = f.a * inst.q + 2 * f.b * inst.p;
            const Natural g0 = g_floor(inst.N, 2, pair);
            ASSERT_GE(u, g0);
            const Natural gap = u - g0;
            EXPECT_LE(gap, pstar_gap(inst.N, B, true)(pair.a, pair.b) + 1) << inst.N;
            EXPECT_LE(gap, pstar_gap(inst.N, B, false)(pair.a, pair.b) + 1) << inst.N;
            // the root 2 b p sits within L of rho = 2u/3
            Natural dist = 2 * f.b * inst.p - (2 * u) / 3;
            if (dist < 0)
                dist = -dist;
            EXPECT_LE(dist, pstar_root_bound(inst.N, B)) << inst.N;
        }
}

TEST(PStarFromFactor, RecoversFromAnyFactor)
{
    const Natural p = 103, q = 101, N = p * p * q;
    for (const Natural& g : std::vector<Natural>{p, q, p * p, p * q})
        EXPECT_EQ(pstar_from_factor(N, g)->p, p);
    EXPECT_FALSE(pstar_from_factor(539, 7));
}
