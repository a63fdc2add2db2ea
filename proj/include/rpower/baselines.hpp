#pragma once

// Comparison algorithms: 2-3-5 wheel trial division and Pollard-Strassen
// blocked trial division, both over an explicit divisor interval, plus a
// complete squarefree decision built on either one.

#include "rpower/arith.hpp"
#include "rpower/modpoly.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rpower {

/// Inclusive divisor interval [lo, hi] with 2 <= lo <= hi.
struct DivisorSearchRange {
    std::uint64_t lo = 2;
    std::uint64_t hi = 2;

    DivisorSearchRange() = default;
    DivisorSearchRange(std::uint64_t lo_, std::uint64_t hi_) : lo(lo_), hi(hi_)
    {
        if (lo < 2 || lo > hi)
            throw std::invalid_argument("DivisorSearchRange: need 2 <= lo <= hi");
        if (hi >= (std::uint64_t{1} << 62))
            throw std::invalid_argument("DivisorSearchRange: bound too large to scan");
    }

    std::uint64_t size() const { return hi - lo + 1; }
};

struct BaselineStats {
    std::uint64_t steps = 0;      ///< divisions, plus evaluation points for Pollard-Strassen
    std::uint64_t peak_bytes = 0; ///< Pollard-Strassen polynomial storage
};

inline constexpr std::array<unsigned, 8> kWheelResidues{1, 7, 11, 13, 17, 19, 23, 29};

inline bool divides(std::uint64_t d, const Natural& N)
{
    return mpz_divisible_ui_p(N.get_mpz_t(), d) != 0;
}

/// Smallest n in range dividing N: 2, 3, 5 first, then only n coprime to 30.
/// When lo > 2 a divisor sharing a factor with 30 (say 9) is skipped, so this
/// is the smallest divisor in range only for N coprime to 30 or lo = 2.
inline std::optional<std::uint64_t> wheel_smallest_divisor(const Natural& N, const DivisorSearchRange& range,
                                                           BaselineStats* stats = nullptr)
{
    std::uint64_t steps = 0;
    auto finish = [&](std::optional<std::uint64_t> v) {
        if (stats)
            stats->steps += steps;
        return v;
    };
    for (std::uint64_t p : {2u, 3u, 5u}) {
        if (p < range.lo || p > range.hi)
            continue;
        ++steps;
        if (divides(p, N))
            return finish(p);
    }
    for (std::uint64_t base = range.lo / 30 * 30; base <= range.hi; base += 30) {
        for (unsigned r : kWheelResidues) {
            const std::uint64_t n = base + r;
            if (n < range.lo)
                continue;
            if (n > range.hi)
                break;
            ++steps;
            if (divides(n, N))
                return finish(n);
        }
    }
    return finish(std::nullopt);
}

/// Plain trial division over the range, one divisor per step.
inline std::optional<std::uint64_t> naive_smallest_divisor(const Natural& N, const DivisorSearchRange& range)
{
    for (std::uint64_t n = range.lo; n <= range.hi; ++n)
        if (divides(n, N))
            return n;
    return std::nullopt;
}

/// Pollard-Strassen: with b = ceil(sqrt(range size)), f(x) = prod_{i=1..b} (x + i)
/// evaluated at lo - 1 + k b gives the product of block k mod N. Blocks whose
/// product shares a factor with N are scanned directly, in increasing order.
inline std::optional<std::uint64_t> ps_smallest_divisor(const Natural& N, const DivisorSearchRange& range,
                                                        BaselineStats* stats = nullptr)
{
    if (N < 2)
        throw std::invalid_argument("ps_smallest_divisor: N must exceed 1");
    const std::uint64_t count = range.size();
    std::uint64_t b = to_u64(isqrt(from_u64(count)));
    if (b * b < count)
        ++b;
    const std::uint64_t blocks = (count + b - 1) / b;

    const PolyRing ring(N);
    std::vector<Natural> offsets;
    offsets.reserve(b);
    for (std::uint64_t i = 1; i <= b; ++i)
        offsets.push_back(-from_u64(i)); // roots of x + i
    const ProductTree block_tree(ring, offsets);
    const ModPoly f = block_tree.root();
    const std::size_t block_tree_bytes = block_tree.bytes();

    std::vector<Natural> points;
    points.reserve(blocks);
    for (std::uint64_t k = 0; k < blocks; ++k)
        points.push_back(from_u64(range.lo - 1 + k * b));
    const ProductTree point_tree(ring, points);
    std::size_t eval_bytes = 0;
    const std::vector<Natural> values = multipoint_eval(ring, f, point_tree, &eval_bytes);

    std::uint64_t steps = blocks;
    std::optional<std::uint64_t> found;
    for (std::uint64_t k = 0; k < blocks && !found; ++k) {
        if (gcd(values[k], N) == 1)
            continue;
        const std::uint64_t first = range.lo + k * b;
        const std::uint64_t last = std::min(range.hi, first + b - 1);
        for (std::uint64_t n = first; n <= last; ++n) {
            ++steps;
            if (divides(n, N)) {
                found = n;
                break;
            }
        }
    }
    if (stats) {
        stats->steps += steps;
        const std::uint64_t peak = block_tree_bytes + point_tree.bytes() + eval_bytes;
        stats->peak_bytes = std::max<std::uint64_t>(stats->peak_bytes, peak);
    }
    return found;
}

enum class DivisorEngine { wheel, pollard_strassen };

inline std::optional<std::uint64_t> smallest_divisor(DivisorEngine engine, const Natural& N,
                                                     const DivisorSearchRange& range, BaselineStats* stats = nullptr)
{
    return engine == DivisorEngine::wheel ? wheel_smallest_divisor(N, range, stats)
                                          : ps_smallest_divisor(N, range, stats);
}

struct SquarefreeVerdict {
    bool squarefull = false;
    std::optional<Natural> witness; ///< d > 1 with d^2 | N when squarefull
};

/// Complete squarefree decision.
///
/// Every prime p <= N^(1/3) is stripped from N (the engine supplies the
/// smallest remaining one each round) and p^2 | N is checked on the way.
/// The cofactor M then has no prime factor <= M^(1/3), so M is 1, a prime,
/// a product of two distinct primes, or a prime square: N is squarefull
/// exactly when a stripped prime repeated or M is a square above 1.
/// A small divisor alone proves nothing (105 = 3 5 7 is squarefree).
inline SquarefreeVerdict squarefree_decide(const Natural& N, DivisorEngine engine, BaselineStats* stats = nullptr)
{
    if (N <= 1)
        throw std::invalid_argument("squarefree_decide: N must exceed 1");
    const Natural cube_root = iroot(N, 3);
    Natural M = N;
    std::uint64_t lo = 2;
    for (;;) {
        Natural bound = std::min(cube_root, iroot(M, 3));
        if (bound < 2 || from_u64(lo) > bound)
            break;
        auto d = smallest_divisor(engine, M, DivisorSearchRange(lo, to_u64(bound)), stats);
        if (!d)
            break;
        unsigned multiplicity = 0;
        while (divides(*d, M)) {
            M /= from_u64(*d);
            ++multiplicity;
        }
        if (multiplicity >= 2)
            return {true, from_u64(*d)};
        lo = *d + 1;
    }
    if (M > 1) {
        if (auto s = is_r_power(M, 2))
            return {true, *s};
    }
    return {false, std::nullopt};
}

} // namespace rpower
