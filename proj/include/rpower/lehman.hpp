#pragma once

// Generalized Lehman search for r-power divisors.
//
// For N = p^r q with p, q > N^(1/(r+2)), some dyadic window j holds p, and a
// Farey fraction a/b of order floor(B_j) approximating p/q makes
// u = a q + r b p sit just above G = (r+1) (a b^r N)^(1/(r+1)). The search
// walks j, the coprime pairs of the window and the few u above floor(G);
// r b p is then an integer root of x^(r+1) - u x^r + r^r a b^r N.
//
// All real-valued bounds are evaluated exactly in integers. b_max (a Farey
// order) is rounded down; every other bound is rounded up.

#include "rpower/arith.hpp"
#include "rpower/baselines.hpp"
#include "rpower/cubicfilter.hpp"
#include "rpower/instrument.hpp"
#include "rpower/rootfind.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rpower {

/// Upper bound for sqrt(K / (a b)) where K is a positive real known only
/// through S = ceil(K * 2^kFractionBits).
class ScaledSqrtBound {
public:
    static constexpr unsigned long kFractionBits = 64;

    ScaledSqrtBound() = default;
    explicit ScaledSqrtBound(Natural scaled) : scaled_(std::move(scaled)) {}

    const Natural& scaled() const { return scaled_; }

    /// Integer >= sqrt(K / (a b)).
    Natural operator()(std::uint64_t a, std::uint64_t b) const
    {
        const Natural den = from_u64(a) * from_u64(b) * pow2(kFractionBits);
        const Natural t = ceil_div(scaled_, den);
        Natural x = isqrt(t);
        if (x * x < t)
            ++x;
        return x;
    }

private:
    Natural scaled_ = 0;
};

/// Search window of dyadic index j.
struct Window {
    unsigned j = 0;
    Natural b_max;        ///< floor(B), B = N^(1/(r+2)) 2^(-(2r+1) j / 3)
    Natural a_max;        ///< ceil(2^((r+2) j / 3 + r + 1))
    ScaledSqrtBound gap;  ///< gap(a, b) >= r^(r+3/2) N^(1/(2(r+2))) 2^((1-r) j/6 - 1) / sqrt(a b)

    Natural gap_bound(std::uint64_t a, std::uint64_t b) const { return gap(a, b); }
};

inline void check_exponent(const Natural& N, unsigned r)
{
    if (N <= 1)
        throw std::invalid_argument("N must exceed 1");
    if (r < 2)
        throw std::invalid_argument("r must be at least 2");
    if (r + 1 > bit_length(N)) // 2^r > N, i.e. r > lg N
        throw std::invalid_argument("r must not exceed lg N");
}

/// Largest j with 2^(r (r+2) j) <= N, i.e. floor(lg N / (r (r+2))).
inline unsigned max_window_index(const Natural& N, unsigned r)
{
    return static_cast<unsigned>((bit_length(N) - 1) / (static_cast<std::size_t>(r) * (r + 2)));
}

inline Window window_params(const Natural& N, unsigned r, unsigned j)
{
    check_exponent(N, r);
    if (j > max_window_index(N, r))
        throw std::out_of_range("window_params: j outside the search range");
    const unsigned long rr = r;
    Window w;
    w.j = j;
    // B^(3(r+2)) = N^3 / 2^((2r+1)(r+2) j)
    w.b_max = iroot(pow(N, 3) >> ((2 * rr + 1) * (rr + 2) * j), 3 * (rr + 2));
    // a_max^3 >= 2^((r+2) j + 3 (r+1))
    w.a_max = ceil_root(pow2((rr + 2) * j + 3 * (rr + 1)), 1, 3);

    // K = gap^2 a b = r^(2r+3) N^(1/(r+2)) 2^((1-r) j/3 - 2), and
    // (K 2^F)^(3(r+2)) = r^(3(2r+3)(r+2)) N^3 2^(3(r+2)F - 6(r+2) - (r-1)(r+2) j).
    const unsigned long k = 3 * (rr + 2);
    const long two_exp = static_cast<long>(k * ScaledSqrtBound::kFractionBits) - static_cast<long>(6 * (rr + 2)) -
                         static_cast<long>((rr - 1) * (rr + 2) * j);
    Natural num = pow(Natural(r), 3 * (2 * rr + 3) * (rr + 2)) * pow(N, 3);
    Natural den = 1;
    if (two_exp >= 0)
        num <<= static_cast<unsigned long>(two_exp);
    else
        den = pow2(static_cast<unsigned long>(-two_exp));
    w.gap = ScaledSqrtBound(ceil_root(num, den, k));
    return w;
}

/// floor((r+1) (a b^r N)^(1/(r+1))), computed as the (r+1)-th root of
/// (r+1)^(r+1) a b^r N.
inline Natural g_floor(const Natural& N, unsigned r, CoprimePair pair)
{
    const Natural v = pow(Natural(r + 1), r + 1) * from_u64(pair.a) * pow(from_u64(pair.b), r) * N;
    return iroot(v, r + 1);
}

/// u = g_floor + k for k = 0 .. gap_bound(a, b) + 1.
inline std::vector<Candidate> u_candidates(const Natural& N, unsigned r, CoprimePair pair, const Window& w)
{
    const Natural g = g_floor(N, r, pair);
    const Natural last = w.gap_bound(pair.a, pair.b) + 1;
    std::vector<Candidate> out;
    for (Natural k = 0; k <= last; ++k)
        out.push_back(Candidate{pair, g + k, g});
    return out;
}

struct LehmanHit {
    unsigned j = 0;
    CoprimePair pair;
    Natural u;
};

struct DetectOutcome {
    enum class Stage { power_test, trial_division, lehman, none };

    std::optional<Natural> factor; ///< nontrivial factor, absent when N is r-power free
    Stage stage = Stage::none;
    std::optional<LehmanHit> hit;

    bool r_power_free() const { return !factor.has_value(); }
};

struct DetectOptions {
    unsigned threads = 1;
    bool use_filter = true; ///< residue filter, r = 2 only
    SearchCounters* counters = nullptr;
};

namespace detail {

struct PairHit {
    Natural factor;
    Natural u;
};

/// Scans every u candidate of one pair; the first factor wins.
inline std::optional<PairHit> scan_pair(const Natural& N, unsigned r, const Window& w, const Natural& L,
                                        CoprimePair pair, const FilterBank* bank, SearchCounters& counters)
{
    const Natural g = g_floor(N, r, pair);
    const std::uint64_t k_max = to_u64(w.gap_bound(pair.a, pair.b) + 1);
    const CandidateTester tester(N, r, pair, L, g + from_u64(k_max));

    std::optional<ResidueCounter> residues;
    std::vector<unsigned> d_res;
    if (bank) {
        residues.emplace(*bank, g);
        d_res = bank->residues(constant_term(N, r, pair.a, pair.b)); // 4 a b^2 N
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
        std::optional<Natural> f;
        if (tester.fast())
            f = tester.test_fast(g_fast + static_cast<i128>(k), &counters);
        else
            f = tester.test(g + from_u64(k), &counters);
        if (f)
            return PairHit{*f, g + from_u64(k)};
    }
    return std::nullopt;
}

struct WorkerResult {
    std::optional<LehmanHit> hit;
    Natural factor;
    SearchCounters counters;
};

/// Scans a = first, first + stride, ... of window w; stops past `best_a`.
inline void scan_window_slice(const Natural& N, unsigned r, const Window& w, const Natural& L, const FilterBank* bank,
                              std::uint64_t first, std::uint64_t stride, std::atomic<std::uint64_t>& best_a,
                              WorkerResult& out)
{
    const std::uint64_t a_max = to_u64(w.a_max);
    const std::uint64_t b_max = to_u64(w.b_max);
    for (std::uint64_t a = first; a <= a_max; a += stride) {
        if (a > best_a.load(std::memory_order_relaxed))
            return;
        std::optional<PairHit> found;
        CoprimePair where;
        for_each_coprime_denominator(a, b_max, RatioBounds{}, [&](CoprimePair pair) {
            found = scan_pair(N, r, w, L, pair, bank, out.counters);
            where = pair;
            return !found;
        });
        if (found) {
            out.hit = LehmanHit{w.j, where, found->u};
            out.factor = found->factor;
            std::uint64_t cur = best_a.load();
            while (a < cur && !best_a.compare_exchange_weak(cur, a)) {
            }
            return;
        }
    }
}

} // namespace detail

/// Returns a nontrivial factor of N or proves N r-power free.
inline DetectOutcome detect(const Natural& N, unsigned r, const DetectOptions& options = {})
{
    check_exponent(N, r);
    SearchCounters local;
    SearchCounters& counters = options.counters ? *options.counters : local;

    auto check = [&](DetectOutcome out) {
        if (out.factor && !(*out.factor > 1 && *out.factor < N && N % *out.factor == 0))
            throw std::logic_error("detect: invalid factor");
        return out;
    };

    if (auto x = is_r_power(N, r))
        return check({*x, DetectOutcome::Stage::power_test, std::nullopt});

    const Natural trial_bound = iroot(N, r + 2);
    if (trial_bound >= 2) {
        BaselineStats stats;
        auto d = wheel_smallest_divisor(N, DivisorSearchRange(2, to_u64(trial_bound)), &stats);
        counters.trial_steps += stats.steps;
        if (d)
            return check({from_u64(*d), DetectOutcome::Stage::trial_division, std::nullopt});
    }

    std::optional<FilterBank> bank;
    if (r == 2 && options.use_filter)
        bank.emplace(build_bank(N));
    const FilterBank* bank_ptr = bank ? &*bank : nullptr;
    const unsigned threads = std::max(1u, options.threads);

    for (unsigned j = 0; j <= max_window_index(N, r); ++j) {
        const Window w = window_params(N, r, j);
        const Natural L = root_interval_bound(N, r, j);
        std::atomic<std::uint64_t> best_a{std::numeric_limits<std::uint64_t>::max()};
        std::vector<detail::WorkerResult> results(threads);

        if (threads == 1) {
            detail::scan_window_slice(N, r, w, L, bank_ptr, 1, 1, best_a, results[0]);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(threads);
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        detail::scan_window_slice(N, r, w, L, bank_ptr, 1 + t, threads, best_a, results[t]);
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

        const detail::WorkerResult* best = nullptr;
        for (const auto& res : results) {
            counters += res.counters;
            if (res.hit && (!best || res.hit->pair.a < best->hit->pair.a))
                best = &res;
        }
        if (best)
            return check({best->factor, DetectOutcome::Stage::lehman, best->hit});
    }
    return DetectOutcome{};
}

struct RPowerVerdict {
    bool has_power = false;
    std::optional<Natural> witness; ///< d > 1 with d^r | N
};

/// Complete decision "some d >= 2 has d^r | N", by splitting N with detect.
///
/// N is kept as a product of pairwise coprime bases b_i^(e_i). A base with
/// e_i >= r is a witness. Otherwise some prime of b_i must occur at least
/// ceil(r / e_i) times in b_i, which detect settles or splits further.
inline RPowerVerdict decide_r_power_full(const Natural& N, unsigned r, const DetectOptions& options = {})
{
    if (N <= 1)
        throw std::invalid_argument("decide_r_power_full: N must exceed 1");
    if (r < 2)
        throw std::invalid_argument("decide_r_power_full: r must be at least 2");

    struct Piece {
        Natural base;
        unsigned long exp;
        bool settled;
    };
    std::vector<Piece> pieces{{N, 1, false}};

    auto refine = [&] {
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < pieces.size() && !changed; ++i)
                for (std::size_t k = i + 1; k < pieces.size() && !changed; ++k) {
                    const Natural g = gcd(pieces[i].base, pieces[k].base);
                    if (g == 1)
                        continue;
                    Piece merged{g, pieces[i].exp + pieces[k].exp, false};
                    pieces[i] = {pieces[i].base / g, pieces[i].exp, false};
                    pieces[k] = {pieces[k].base / g, pieces[k].exp, false};
                    pieces.push_back(merged);
                    changed = true;
                }
            std::erase_if(pieces, [](const Piece& p) { return p.base == 1; });
        }
    };

    for (;;) {
        refine();
        for (const auto& p : pieces)
            if (p.exp >= r)
                return {true, p.base};
        auto open = std::find_if(pieces.begin(), pieces.end(), [](const Piece& p) { return !p.settled; });
        if (open == pieces.end())
            return {false, std::nullopt};
        const unsigned need = static_cast<unsigned>((r + open->exp - 1) / open->exp);
        if (need + 1 > bit_length(open->base)) { // base < 2^need
            open->settled = true;
            continue;
        }
        DetectOutcome out = detect(open->base, need, options);
        if (!out.factor) {
            open->settled = true;
            continue;
        }
        const Natural f = *out.factor;
        const Natural rest = open->base / f;
        const unsigned long e = open->exp;
        *open = {f, e, false};
        pieces.push_back({rest, e, false});
    }
}

} // namespace rpower
