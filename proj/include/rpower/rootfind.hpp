#pragma once

// Integer root search for f(x) = x^(r+1) - u x^r + r^r a b^r N.
//
// f' vanishes only at 0 and rho = r u / (r+1), so f strictly decreases on
// (0, rho) and strictly increases on (rho, inf). Each branch holds at most
// one positive root and is searched by integer bisection; there is no
// floating point anywhere in here.

#include "rpower/arith.hpp"
#include "rpower/instrument.hpp"

#include <optional>
#include <vector>

namespace rpower {

/// A candidate value u for a q + r b p, attached to its pair.
struct Candidate {
    CoprimePair pair;
    Natural u;
    Natural g_floor; ///< floor((r+1) (a b^r N)^(1/(r+1)))
};

struct CandidatePoly {
    unsigned r = 2;
    Natural u;
    Natural c;       ///< r^r a b^r N
    Natural L = 1;   ///< half-width of the search window around rho

    Natural rho_floor() const { return (r * u) / (r + 1); }
    Natural rho_ceil() const
    {
        Natural num = r * u;
        Natural q = num / (r + 1);
        return (num % (r + 1) == 0) ? q : Natural(q + 1);
    }
};

inline Natural constant_term(const Natural& N, unsigned r, std::uint64_t a, std::uint64_t b)
{
    return pow(Natural(r), r) * from_u64(a) * pow(from_u64(b), r) * N;
}

inline CandidatePoly make_poly(const Natural& N, unsigned r, CoprimePair pair,
                               const Natural& u, const Natural& L)
{
    return CandidatePoly{r, u, constant_term(N, r, pair.a, pair.b), L};
}

namespace detail {

template <class Int>
Int eval_f(unsigned r, const Int& u, const Int& c, const Int& x)
{
    Int p = x;
    for (unsigned i = 1; i < r; ++i)
        p *= x;
    Int d = x - u;
    Int out = p * d;
    out += c;
    return out;
}

template <class Int>
int sign_of(const Int& v)
{
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

/// Searches both monotone branches. Appends exact integer roots to `roots`.
/// Each branch first checks its outer endpoint, then binary-searches the
/// sign change; at most ceil(lg(2L+2)) evaluations per branch.
template <class Int>
void branch_roots(unsigned r, const Int& u, const Int& c, const Int& L,
                  std::vector<Int>& roots, SearchCounters* counters)
{
    std::uint64_t evals = 0;
    auto f = [&](const Int& x) {
        ++evals;
        return eval_f<Int>(r, u, c, x);
    };
    const Int num = Int(r) * u;
    const Int rho_floor = num / Int(r + 1);
    const Int rho_ceil = (num % Int(r + 1) == 0) ? rho_floor : Int(rho_floor + 1);

    // Decreasing branch [max(1, floor(rho) - L), floor(rho)]: need f(lo) >= 0.
    if (rho_floor >= 1) {
        Int lo = rho_floor - L;
        if (lo < 1)
            lo = 1;
        const Int hi = rho_floor;
        Int flo = f(lo);
        if (flo >= 0) {
            // Largest x in [lo, hi] with f(x) >= 0; hi + 1 acts as a sentinel.
            Int l = lo, rr = hi + 1;
            Int fl = flo;
            while (rr - l > 1) {
                Int m = (l + rr) / 2;
                Int fm = f(m);
                if (fm >= 0) {
                    l = m;
                    fl = fm;
                } else {
                    rr = m;
                }
            }
            if (fl == 0)
                roots.push_back(l);
        }
    }

    // Increasing branch [ceil(rho), ceil(rho) + L]: need f(hi) >= 0.
    {
        const Int lo = rho_ceil < 1 ? Int(1) : rho_ceil;
        const Int hi = rho_ceil + L;
        Int fhi = f(hi);
        if (fhi >= 0) {
            // Smallest x in [lo, hi] with f(x) >= 0; lo - 1 acts as a sentinel.
            Int l = lo - 1, rr = hi;
            Int fr = fhi;
            while (rr - l > 1) {
                Int m = (l + rr) / 2;
                Int fm = f(m);
                if (fm >= 0) {
                    rr = m;
                    fr = fm;
                } else {
                    l = m;
                }
            }
            if (fr == 0 && (roots.empty() || roots.back() != rr))
                roots.push_back(rr);
        }
    }

    if (counters) {
        ++counters->root_searches;
        counters->f_evaluations += evals;
    }
}

} // namespace detail

/// Exact value of f at x (may be negative).
inline Natural eval_f(const CandidatePoly& poly, const Natural& x)
{
    return detail::eval_f<Natural>(poly.r, poly.u, poly.c, x);
}

/// Integer upper bound on |rho - r b p| for every admissible pair in window j:
/// ceil((r/(r+1)) N^(1/(r+2)) 2^(-(r-1) j / 3)), clamped to at least 1.
inline Natural root_interval_bound(const Natural& N, unsigned r, unsigned j)
{
    const unsigned long k = 3ul * (r + 2);
    Natural num = pow(Natural(r), k) * pow(N, 3);
    Natural den = pow(Natural(r + 1), k) * pow2(static_cast<unsigned long>(r - 1) * (r + 2) * j);
    Natural L = ceil_root(num, den, k);
    return L < 1 ? Natural(1) : L;
}

/// Positive integer roots of f inside [rho - L, rho + L].
inline std::vector<Natural> window_roots(const CandidatePoly& poly, SearchCounters* counters = nullptr)
{
    std::vector<Natural> roots;
    detail::branch_roots<Natural>(poly.r, poly.u, poly.c, poly.L, roots, counters);
    return roots;
}

/// Turns a root into a nontrivial factor of N when possible. The root is
/// r b p when u = a q + r b p, and u - root is then a q.
inline std::optional<Natural> factor_from_root(const Natural& N, unsigned r, CoprimePair pair,
                                               const Natural& u, const Natural& root)
{
    auto nontrivial = [&](const Natural& g) { return g > 1 && g < N; };
    std::vector<Natural> probes{root};
    const Natural rb = Natural(r) * from_u64(pair.b);
    if (root % rb == 0)
        probes.emplace_back(root / rb);
    if (u > root) {
        Natural other = u - root;
        probes.push_back(other);
        if (other % from_u64(pair.a) == 0)
            probes.emplace_back(other / from_u64(pair.a));
    }
    for (const auto& v : probes) {
        Natural g = gcd(v, N);
        if (nontrivial(g))
            return g;
    }
    return std::nullopt;
}

/// Tests the candidates of one (a, b) pair. Precomputes r^r a b^r N and picks
/// 128-bit arithmetic when every value f can take in the window fits.
class CandidateTester {
public:
    CandidateTester(const Natural& N, unsigned r, CoprimePair pair, const Natural& L,
                    const Natural& u_max)
        : N_(N), r_(r), pair_(pair), c_(constant_term(N, r, pair.a, pair.b)), L_(L)
    {
        const Natural x_max = u_max + L + 1;
        fast_ = bit_length(x_max) * (r + 1) <= 124 && bit_length(c_) <= 124;
        if (fast_) {
            c_fast_ = to_i128(c_);
            L_fast_ = to_i128(L_);
        }
    }

    bool fast() const { return fast_; }

    std::optional<Natural> test(const Natural& u, SearchCounters* counters = nullptr) const
    {
        if (fast_)
            return test_fast(to_i128(u), counters);
        std::vector<Natural> roots;
        detail::branch_roots<Natural>(r_, u, c_, L_, roots, counters);
        for (const auto& x : roots)
            if (auto g = factor_from_root(N_, r_, pair_, u, x))
                return g;
        return std::nullopt;
    }

    /// Requires fast().
    std::optional<Natural> test_fast(i128 u, SearchCounters* counters = nullptr) const
    {
        std::vector<i128> roots;
        detail::branch_roots<i128>(r_, u, c_fast_, L_fast_, roots, counters);
        for (i128 x : roots)
            if (auto g = factor_from_root(N_, r_, pair_, from_i128(u), from_i128(x)))
                return g;
        return std::nullopt;
    }

private:
    Natural N_;
    unsigned r_;
    CoprimePair pair_;
    Natural c_;
    Natural L_;
    bool fast_ = false;
    i128 c_fast_ = 0;
    i128 L_fast_ = 0;
};

/// Tests one candidate with an explicit window half-width L.
inline std::optional<Natural> try_candidate(const Natural& N, unsigned r, const Candidate& cand,
                                            const Natural& L, SearchCounters* counters = nullptr)
{
    CandidateTester tester(N, r, cand.pair, L, cand.u);
    return tester.test(cand.u, counters);
}

/// Tests one candidate of dyadic window j.
inline std::optional<Natural> try_candidate(const Natural& N, unsigned r, const Candidate& cand,
                                            unsigned j, SearchCounters* counters = nullptr)
{
    return try_candidate(N, r, cand, root_interval_bound(N, r, j), counters);
}

} // namespace rpower
