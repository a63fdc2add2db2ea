#pragma once

// Problem P*: N = p^2 q with q < p < 8q, equivalently N^(1/3) < p < 2 N^(1/3).
//
// The ratio window pins p/q in (1, 8), so one Lehman window suffices:
// Farey order B ~ N^(1/9), pairs with b <= a <= 8b, and per pair about
// N^(1/3) / (B^2 sqrt(ab)) candidates u. Also: the seeded instance
// generator and the primality test it uses.

#include "rpower/arith.hpp"
#include "rpower/cubicfilter.hpp"
#include "rpower/instrument.hpp"
#include "rpower/lehman.hpp"
#include "rpower/rootfind.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rpower {

// --- primality -----------------------------------------------------------

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1)
            r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace detail

/// Miller-Rabin with the first twelve prime bases; exact for all 64-bit n.
inline bool is_prime_u64(std::uint64_t n)
{
    static constexpr std::array<std::uint64_t, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2)
        return false;
    for (std::uint64_t p : bases) {
        if (n % p == 0)
            return n == p;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : bases) {
        std::uint64_t x = detail::powmod(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

/// Exact below 2^64; above that GMP's Baillie-PSW plus Miller-Rabin rounds.
inline bool is_probable_prime(const Natural& n)
{
    if (fits_u64(n))
        return is_prime_u64(to_u64(n));
    return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

// --- instances -----------------------------------------------------------

struct PStarInstance {
    Natural N;
    Natural p;
    Natural q;
    std::uint64_t seed = 0;
};

/// Uniform integer in [lo, hi] by rejection on 64-bit words from mt19937_64.
inline Natural uniform_natural(std::mt19937_64& rng, const Natural& lo, const Natural& hi)
{
    if (hi < lo)
        throw std::invalid_argument("uniform_natural: empty range");
    const Natural span = hi - lo + 1;
    const std::size_t bits = bit_length(span);
    const std::size_t words = (bits + 63) / 64;
    std::vector<std::uint64_t> buf(words);
    for (;;) {
        for (auto& w : buf)
            w = rng();
        if (bits % 64 != 0)
            buf.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
        Natural v;
        mpz_import(v.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
        if (v < span)
            return lo + v;
    }
}

inline Natural uniform_prime(std::mt19937_64& rng, const Natural& lo, const Natural& hi, unsigned max_tries)
{
    for (unsigned t = 0; t < max_tries; ++t) {
        Natural v = uniform_natural(rng, lo, hi);
        if (is_probable_prime(v))
            return v;
    }
    throw std::runtime_error("uniform_prime: no prime found in " + to_decimal(lo) + ".." + to_decimal(hi));
}

/// q uniform prime in [ceil(10^(j/3) / 4), floor(10^(j/3))], p uniform prime
/// in (q, 8q), N = p^2 q. Deterministic in the seed.
inline PStarInstance gen_instance(unsigned digits, std::uint64_t seed)
{
    if (digits < 6)
        throw std::invalid_argument("gen_instance: need at least 6 digits");
    std::mt19937_64 rng(seed);
    const Natural ten_j = pow(Natural(10), digits);
    const Natural q_hi = iroot(ten_j, 3);
    const Natural q_lo = ceil_root(ten_j, 64, 3);
    constexpr unsigned kTries = 1'000'000;
    PStarInstance inst;
    inst.seed = seed;
    inst.q = uniform_prime(rng, q_lo, q_hi, kTries);
    inst.p = uniform_prime(rng, inst.q + 1, 8 * inst.q - 1, kTries);
    inst.N = inst.p * inst.p * inst.q;
    return inst;
}

/// One instance per line: `N p q seed` (p and q may be omitted).
inline void write_instances(std::ostream& os, const std::vector<PStarInstance>& instances)
{
    for (const auto& inst : instances)
        os << inst.N.get_str() << ' ' << inst.p.get_str() << ' ' << inst.q.get_str() << ' ' << inst.seed << '\n';
}

inline std::vector<PStarInstance> read_instances(std::istream& is)
{
    std::vector<PStarInstance> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#')
            continue;
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;)
            tok.push_back(t);
        PStarInstance inst;
        try {
            if (tok.size() != 1 && tok.size() != 2 && tok.size() != 4)
                throw std::invalid_argument("field count");
            inst.N = Natural(tok[0], 10);
            if (tok.size() == 2) {
                inst.seed = std::stoull(tok[1]);
            } else if (tok.size() == 4) {
                inst.p = Natural(tok[1], 10);
                inst.q = Natural(tok[2], 10);
                inst.seed = std::stoull(tok[3]);
            }
        } catch (const std::exception&) {
            throw std::runtime_error("instance file line " + std::to_string(lineno) + ": expected `N [p q] seed`");
        }
        out.push_back(inst);
    }
    return out;
}

// --- solver --------------------------------------------------------------

struct PStarOptions {
    std::optional<Natural> b_override;
    /// Per-pair u count from the r = 2 bound (aq + 8bp)/(aq + 2bp) < 4, i.e.
    /// sqrt(2) N^(1/3) / (B^2 sqrt(ab)). Off: the general 2^(5/2) constant.
    bool tight_gap = true;
    bool use_filter = true;
    unsigned threads = 1;
    SearchCounters* counters = nullptr;
};

struct PStarSolution {
    Natural p;
    Natural q;
};

/// Default Farey order: ceil(N^(1/9)).
inline Natural pstar_default_order(const Natural& N) { return ceil_root(N, 1, 9); }

/// ceil((2/3) N^(1/3) / B): bound on |rho - 2bp| when q < N^(1/3).
inline Natural pstar_root_bound(const Natural& N, const Natural& B)
{
    Natural L = ceil_root(8 * N, 27 * pow(B, 3), 3);
    return L < 1 ? Natural(1) : L;
}

/// Per-pair candidate count bound: sqrt(K / (ab)) with K = c N^(2/3) / B^4,
/// c = 2 (tight) or 32.
inline ScaledSqrtBound pstar_gap(const Natural& N, const Natural& B, bool tight)
{
    const unsigned long c = tight ? 2 : 32;
    // (K 2^F)^3 = c^3 N^2 2^(3F) / B^12
    Natural num = pow(Natural(c), 3) * N * N * pow2(3 * ScaledSqrtBound::kFractionBits);
    return ScaledSqrtBound(ceil_root(num, pow(B, 12), 3));
}

/// (p, q) with p^2 q = N and q < p < 8q, recovered from any nontrivial factor.
inline std::optional<PStarSolution> pstar_from_factor(const Natural& N, const Natural& g)
{
    std::vector<Natural> probes{g, N / g, gcd(g, N / g)};
    for (std::size_t i = 0, n = probes.size(); i < n; ++i)
        if (auto s = is_r_power(probes[i], 2))
            probes.push_back(*s);
    for (const auto& p : probes) {
        if (p < 2)
            continue;
        const Natural p2 = p * p;
        if (N % p2 != 0)
            continue;
        const Natural q = N / p2;
        if (q < p && p < 8 * q)
            return PStarSolution{p, q};
    }
    return std::nullopt;
}

namespace detail {

struct PStarHit {
    CoprimePair pair;
    PStarSolution solution;
};

inline std::optional<PStarHit> pstar_scan_pair(const Natural& N, CoprimePair pair, const ScaledSqrtBound& gap,
                                               const Natural& L, const FilterBank* bank, SearchCounters& counters)
{
    const Natural g = g_floor(N, 2, pair);
    const std::uint64_t k_max = to_u64(gap(pair.a, pair.b) + 1);
    const CandidateTester tester(N, 2, pair, L, g + from_u64(k_max));

    std::optional<ResidueCounter> residues;
    std::vector<unsigned> d_res;
    if (bank) {
        residues.emplace(*bank, g);
        d_res = bank->residues(constant_term(N, 2, pair.a, pair.b));
    }
    const i128 g_fast = tester.fast() ? to_i128(g) : 0;
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        ++counters.u_iterations;
        if (residues) {
            const bool ok = bank->passes_residues(residues->residues(), d_res);
            residues->increment();
            if (!ok) {
                ++counters.filter_rejections;
                continue;
            }
        }
        std::optional<Natural> f = tester.fast() ? tester.test_fast(g_fast + static_cast<i128>(k), &counters)
                                                 : tester.test(g + from_u64(k), &counters);
        if (f)
            if (auto sol = pstar_from_factor(N, *f))
                return PStarHit{pair, *sol};
    }
    return std::nullopt;
}

} // namespace detail

/// Recovers (p, q) when N = p^2 q with q < p < 8q; absent otherwise.
/// p and q need not be prime.
inline std::optional<PStarSolution> pstar_solve(const Natural& N, const PStarOptions& options = {})
{
    if (N <= 1)
        throw std::invalid_argument("pstar_solve: N must exceed 1");
    SearchCounters local;
    SearchCounters& counters = options.counters ? *options.counters : local;

    const Natural B = options.b_override ? *options.b_override : pstar_default_order(N);
    if (B < 1)
        throw std::invalid_argument("pstar_solve: B must be positive");
    const ScaledSqrtBound gap = pstar_gap(N, B, options.tight_gap);
    const Natural L = pstar_root_bound(N, B);

    std::optional<FilterBank> bank;
    if (options.use_filter)
        bank.emplace(build_bank(N));
    const FilterBank* bank_ptr = bank ? &*bank : nullptr;

    // a/b lies within 1/(bB) of p/q in (1, 8), which forces 1 <= a/b <= 8.
    const RatioBounds ratio{Ratio{1, 1}, Ratio{8, 1}, true};
    const std::uint64_t b_max = to_u64(B);
    const std::uint64_t a_max = 8 * b_max;
    const unsigned threads = std::max(1u, options.threads);

    std::atomic<std::uint64_t> best_a{std::numeric_limits<std::uint64_t>::max()};
    struct Slot {
        std::optional<detail::PStarHit> hit;
        SearchCounters counters;
    };
    std::vector<Slot> slots(threads);
    auto work = [&](unsigned t) {
        for (std::uint64_t a = 1 + t; a <= a_max; a += threads) {
            if (a > best_a.load(std::memory_order_relaxed))
                return;
            std::optional<detail::PStarHit> found;
            for_each_coprime_denominator(a, b_max, ratio, [&](CoprimePair pair) {
                found = detail::pstar_scan_pair(N, pair, gap, L, bank_ptr, slots[t].counters);
                return !found;
            });
            if (found) {
                slots[t].hit = found;
                std::uint64_t cur = best_a.load();
                while (a < cur && !best_a.compare_exchange_weak(cur, a)) {
                }
                return;
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    work(t);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    const Slot* best = nullptr;
    for (const auto& s : slots) {
        counters += s.counters;
        if (s.hit && (!best || s.hit->pair.a < best->hit->pair.a))
            best = &s;
    }
    if (best)
        return best->hit->solution;
    return std::nullopt;
}

} // namespace rpower
