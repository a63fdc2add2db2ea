#pragma once

// Exact big-integer kernel: integer roots, perfect powers, gcd and
// coprime-pair enumeration. Everything here is a pure function.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpower {

/// Arbitrary-precision integer. Used for nonnegative quantities throughout;
/// the few signed values (polynomial evaluations) share the same type.
using Natural = mpz_class;

inline Natural pow(const Natural& base, unsigned long exponent)
{
    Natural out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
    return out;
}

inline Natural pow2(unsigned long exponent)
{
    Natural out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, exponent);
    return out;
}

inline std::size_t bit_length(const Natural& n)
{
    return sgn(n) == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2);
}

inline Natural ceil_div(const Natural& num, const Natural& den)
{
    Natural out;
    mpz_cdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

inline std::string to_decimal(const Natural& n) { return n.get_str(10); }

/// Floor square root by Newton iteration from above.
inline Natural isqrt(const Natural& n)
{
    if (sgn(n) < 0)
        throw std::domain_error("isqrt: negative argument");
    if (n < 2)
        return n;
    Natural x = pow2((bit_length(n) + 1) / 2);
    for (;;) {
        Natural y = (x + n / x) >> 1;
        if (y >= x)
            break;
        x = y;
    }
    while (x * x > n)
        --x;
    while ((x + 1) * (x + 1) <= n)
        ++x;
    return x;
}

/// Floor k-th root: the r with r^k <= n < (r+1)^k.
inline Natural iroot(const Natural& n, unsigned long k)
{
    if (k == 0)
        throw std::invalid_argument("iroot: k must be positive");
    if (sgn(n) < 0)
        throw std::domain_error("iroot: negative argument");
    if (k == 1 || n < 2)
        return n;
    const std::size_t bits = bit_length(n);
    if (k >= bits)
        return 1; // 2^k > n

    // 2^ceil(bits/k) is above the root, so the Newton sequence decreases
    // monotonically until it reaches the floor.
    Natural x = pow2((bits + k - 1) / k);
    for (;;) {
        Natural y = ((k - 1) * x + n / pow(x, k - 1)) / k;
        if (y >= x)
            break;
        x = y;
    }
    while (pow(x, k) > n)
        --x;
    while (pow(x + 1, k) <= n)
        ++x;
    return x;
}

/// Smallest x >= 0 with x^k * den >= num (ceiling of (num/den)^(1/k)).
inline Natural ceil_root(const Natural& num, const Natural& den, unsigned long k)
{
    if (sgn(den) <= 0)
        throw std::invalid_argument("ceil_root: denominator must be positive");
    if (sgn(num) <= 0)
        return 0;
    Natural x = iroot(num / den, k);
    while (pow(x, k) * den < num)
        ++x;
    return x;
}

/// The base x with x^r == n, if n is a perfect r-th power.
inline std::optional<Natural> is_r_power(const Natural& n, unsigned long r)
{
    if (r < 1)
        throw std::invalid_argument("is_r_power: r must be positive");
    Natural x = iroot(n, r);
    if (pow(x, r) == n)
        return x;
    return std::nullopt;
}

/// gcd(0, 0) is 0.
inline Natural gcd(const Natural& a, const Natural& b)
{
    Natural out;
    mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b)
{
    while (b != 0) {
        std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline bool fits_u64(const Natural& n)
{
    return sgn(n) >= 0 && bit_length(n) <= 64;
}

inline std::uint64_t to_u64(const Natural& n)
{
    if (!fits_u64(n))
        throw std::overflow_error("value does not fit in 64 bits");
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, n.get_mpz_t());
    return out;
}

inline Natural from_u64(std::uint64_t v)
{
    Natural out;
    mpz_import(out.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
    return out;
}

using i128 = __int128;
using u128 = unsigned __int128;

/// True when |n| < 2^bits (bits <= 127).
inline bool fits_signed_bits(const Natural& n, std::size_t bits)
{
    return mpz_sizeinbase(n.get_mpz_t(), 2) <= bits;
}

inline i128 to_i128(const Natural& n)
{
    if (!fits_signed_bits(n, 126))
        throw std::overflow_error("value does not fit in 126 bits");
    std::uint64_t limbs[2] = {0, 0};
    mpz_export(limbs, nullptr, -1, sizeof(std::uint64_t), 0, 0, n.get_mpz_t());
    i128 mag = static_cast<i128>((static_cast<u128>(limbs[1]) << 64) | limbs[0]);
    return sgn(n) < 0 ? -mag : mag;
}

inline Natural from_i128(i128 v)
{
    const bool neg = v < 0;
    u128 mag = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
    std::uint64_t limbs[2] = {static_cast<std::uint64_t>(mag), static_cast<std::uint64_t>(mag >> 64)};
    Natural out;
    mpz_import(out.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, limbs);
    if (neg)
        out = -out;
    return out;
}

// --- coprime pairs -------------------------------------------------------

struct CoprimePair {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    friend bool operator==(const CoprimePair&, const CoprimePair&) = default;
};

struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
};

/// Optional bounds on a/b. Strict unless `inclusive` is set.
struct RatioBounds {
    std::optional<Ratio> lo;
    std::optional<Ratio> hi;
    bool inclusive = false;
};

namespace detail {

// b range admitted by the bounds for a fixed a, clipped to [1, b_max].
// a/b > lo.num/lo.den  <=>  b < a*lo.den/lo.num
// a/b < hi.num/hi.den  <=>  b > a*hi.den/hi.num
inline std::pair<std::uint64_t, std::uint64_t>
b_window(std::uint64_t a, std::uint64_t b_max, const RatioBounds& bounds)
{
    u128 first = 1, last = b_max;
    if (bounds.lo && bounds.lo->num != 0) {
        const u128 n = static_cast<u128>(a) * bounds.lo->den;
        const u128 d = bounds.lo->num;
        u128 top = bounds.inclusive ? n / d : (n % d == 0 ? n / d - 1 : n / d);
        if (top < last)
            last = top;
    }
    if (bounds.hi) {
        if (bounds.hi->num == 0)
            return {1, 0};
        const u128 n = static_cast<u128>(a) * bounds.hi->den;
        const u128 d = bounds.hi->num;
        u128 bottom = bounds.inclusive ? (n + d - 1) / d : n / d + 1;
        if (bottom > first)
            first = bottom;
    }
    if (first > last)
        return {1, 0};
    return {static_cast<std::uint64_t>(first), static_cast<std::uint64_t>(last)};
}

} // namespace detail

/// Calls fn(pair) for every coprime (a,b) with 1 <= a <= a_max, 1 <= b <= b_max
/// inside the ratio bounds, ordered by a then b. fn returns false to stop.
/// Returns false if stopped early.
template <class Fn>
bool for_each_coprime_pair(std::uint64_t a_max, std::uint64_t b_max,
                           const RatioBounds& bounds, Fn&& fn)
{
    for (std::uint64_t a = 1; a <= a_max; ++a) {
        auto [first, last] = detail::b_window(a, b_max, bounds);
        for (std::uint64_t b = first; b <= last && b >= first; ++b) {
            if (gcd_u64(a, b) != 1)
                continue;
            if (!fn(CoprimePair{a, b}))
                return false;
        }
    }
    return true;
}

/// Same as for_each_coprime_pair restricted to a single numerator.
template <class Fn>
bool for_each_coprime_denominator(std::uint64_t a, std::uint64_t b_max,
                                  const RatioBounds& bounds, Fn&& fn)
{
    auto [first, last] = detail::b_window(a, b_max, bounds);
    for (std::uint64_t b = first; b <= last && b >= first; ++b) {
        if (gcd_u64(a, b) != 1)
            continue;
        if (!fn(CoprimePair{a, b}))
            return false;
    }
    return true;
}

inline std::vector<CoprimePair> coprime_pairs(std::uint64_t a_max, std::uint64_t b_max,
                                              const RatioBounds& bounds = {})
{
    if (a_max < 1 || b_max < 1)
        throw std::invalid_argument("coprime_pairs: a_max and b_max must be >= 1");
    std::vector<CoprimePair> out;
    for_each_coprime_pair(a_max, b_max, bounds, [&](CoprimePair p) {
        out.push_back(p);
        return true;
    });
    return out;
}

/// A fraction a/b with b <= order and |a/b - num/den| <= 1/((order+1) b),
/// found by walking the Stern-Brocot tree down to the two Farey neighbours
/// of num/den. a may be 0 when num/den < 1/(order+1).
struct Fraction {
    Natural a;
    Natural b;
};

inline Fraction farey_approximation(const Natural& num, const Natural& den, const Natural& order)
{
    if (sgn(den) <= 0 || sgn(num) < 0 || order < 1)
        throw std::invalid_argument("farey_approximation: bad arguments");
    const Natural whole = num / den;
    Fraction lo{whole, 1}, hi{whole + 1, 1};
    auto cmp = [&](const Fraction& f) { // sign of x - f
        return sgn(num * f.b - f.a * den);
    };
    for (;;) {
        if (cmp(lo) == 0)
            return lo;
        if (cmp(hi) == 0)
            return hi;
        Fraction mid{lo.a + hi.a, lo.b + hi.b};
        if (mid.b > order)
            return cmp(mid) <= 0 ? lo : hi;
        const int side = cmp(mid);
        if (side == 0)
            return mid;
        if (side < 0) {
            // hi moves toward lo: hi + t*lo stays above x for t < dnum/dden.
            Natural dnum = hi.a * den - num * hi.b;
            Natural dden = num * lo.b - lo.a * den;
            Natural t = (dnum - 1) / dden;
            Natural room = (order - hi.b) / lo.b;
            if (room < t)
                t = room;
            hi.a += t * lo.a;
            hi.b += t * lo.b;
        } else {
            Natural dnum = num * lo.b - lo.a * den;
            Natural dden = hi.a * den - num * hi.b;
            Natural t = (dnum - 1) / dden;
            Natural room = (order - lo.b) / hi.b;
            if (room < t)
                t = room;
            lo.a += t * hi.a;
            lo.b += t * hi.b;
        }
    }
}

} // namespace rpower
