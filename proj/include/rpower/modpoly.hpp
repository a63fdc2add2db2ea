#pragma once

// Dense polynomials over Z/NZ for composite N, product trees and remainder
// trees. Only monic divisors are ever needed, so no inverses mod N occur.
//
// Large products go through Kronecker substitution: coefficients are packed
// into one big integer with enough room per slot that no carries cross
// slots, multiplied by GMP, and unpacked.

#include "rpower/arith.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rpower {

/// Coefficients low degree first, each reduced into [0, N).
struct ModPoly {
    std::vector<Natural> coeffs;

    long degree() const { return static_cast<long>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.empty(); }

    void trim()
    {
        while (!coeffs.empty() && sgn(coeffs.back()) == 0)
            coeffs.pop_back();
    }
};

class PolyRing {
public:
    static constexpr std::size_t kSchoolbookCutoff = 24;
    static constexpr std::size_t kNewtonCutoff = 48;

    explicit PolyRing(Natural modulus) : n_(std::move(modulus))
    {
        if (n_ < 2)
            throw std::invalid_argument("PolyRing: modulus must exceed 1");
    }

    const Natural& modulus() const { return n_; }

    Natural reduce(const Natural& v) const
    {
        Natural out;
        mpz_fdiv_r(out.get_mpz_t(), v.get_mpz_t(), n_.get_mpz_t());
        return out;
    }

    /// x - root
    ModPoly linear(const Natural& root) const
    {
        ModPoly p;
        p.coeffs = {reduce(-root), Natural(1)};
        p.trim();
        return p;
    }

    ModPoly mul(const ModPoly& f, const ModPoly& g) const
    {
        if (f.is_zero() || g.is_zero())
            return {};
        if (std::min(f.coeffs.size(), g.coeffs.size()) <= kSchoolbookCutoff)
            return mul_schoolbook(f, g);
        return mul_kronecker(f, g);
    }

    ModPoly sub(const ModPoly& f, const ModPoly& g) const
    {
        ModPoly out;
        out.coeffs.resize(std::max(f.coeffs.size(), g.coeffs.size()));
        for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
            Natural v = (i < f.coeffs.size() ? f.coeffs[i] : Natural(0)) -
                        (i < g.coeffs.size() ? g.coeffs[i] : Natural(0));
            out.coeffs[i] = reduce(v);
        }
        out.trim();
        return out;
    }

    /// f mod g for monic g.
    ModPoly rem(const ModPoly& f, const ModPoly& g) const
    {
        if (g.is_zero() || g.coeffs.back() != 1)
            throw std::invalid_argument("PolyRing::rem: divisor must be monic");
        const long m = g.degree();
        if (f.degree() < m)
            return f;
        if (m == 0)
            return {};
        const long k = f.degree() - m;
        if (k < static_cast<long>(kNewtonCutoff) || m < static_cast<long>(kNewtonCutoff))
            return rem_schoolbook(f, g);
        return rem_newton(f, g);
    }

    Natural eval(const ModPoly& f, const Natural& x) const
    {
        Natural acc = 0;
        const Natural xr = reduce(x);
        for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) {
            acc = acc * xr + *it;
            acc = reduce(acc);
        }
        return acc;
    }

    /// Bytes held by the coefficients of p.
    static std::size_t bytes(const ModPoly& p)
    {
        std::size_t total = 0;
        for (const auto& c : p.coeffs)
            total += sizeof(Natural) + mpz_size(c.get_mpz_t()) * sizeof(mp_limb_t);
        return total;
    }

private:
    ModPoly mul_schoolbook(const ModPoly& f, const ModPoly& g) const
    {
        ModPoly out;
        out.coeffs.assign(f.coeffs.size() + g.coeffs.size() - 1, Natural(0));
        for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
            if (sgn(f.coeffs[i]) == 0)
                continue;
            for (std::size_t j = 0; j < g.coeffs.size(); ++j)
                mpz_addmul(out.coeffs[i + j].get_mpz_t(), f.coeffs[i].get_mpz_t(),
                           g.coeffs[j].get_mpz_t());
        }
        for (auto& c : out.coeffs)
            c = reduce(c);
        out.trim();
        return out;
    }

    ModPoly mul_kronecker(const ModPoly& f, const ModPoly& g) const
    {
        const std::size_t shorter = std::min(f.coeffs.size(), g.coeffs.size());
        const std::size_t slot_bits = 2 * bit_length(n_) + bit_length(Natural(static_cast<unsigned long>(shorter))) + 1;
        const std::size_t slot = (slot_bits + 63) / 64;

        const Natural a = pack(f, slot);
        const Natural b = pack(g, slot);
        Natural prod = a * b;

        const std::size_t len = f.coeffs.size() + g.coeffs.size() - 1;
        std::vector<std::uint64_t> words(len * slot + 1, 0);
        std::size_t count = 0;
        mpz_export(words.data(), &count, -1, sizeof(std::uint64_t), 0, 0, prod.get_mpz_t());

        ModPoly out;
        out.coeffs.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            Natural c;
            mpz_import(c.get_mpz_t(), slot, -1, sizeof(std::uint64_t), 0, 0, words.data() + i * slot);
            out.coeffs[i] = reduce(c);
        }
        out.trim();
        return out;
    }

    static Natural pack(const ModPoly& p, std::size_t slot)
    {
        std::vector<std::uint64_t> words(p.coeffs.size() * slot, 0);
        for (std::size_t i = 0; i < p.coeffs.size(); ++i)
            mpz_export(words.data() + i * slot, nullptr, -1, sizeof(std::uint64_t), 0, 0,
                       p.coeffs[i].get_mpz_t());
        Natural out;
        mpz_import(out.get_mpz_t(), words.size(), -1, sizeof(std::uint64_t), 0, 0, words.data());
        return out;
    }

    ModPoly rem_schoolbook(const ModPoly& f, const ModPoly& g) const
    {
        std::vector<Natural> r = f.coeffs;
        const long m = g.degree();
        for (long i = f.degree(); i >= m; --i) {
            Natural lead = reduce(r[i]);
            if (sgn(lead) == 0)
                continue;
            for (long t = 0; t < m; ++t)
                mpz_submul(r[i - m + t].get_mpz_t(), lead.get_mpz_t(), g.coeffs[t].get_mpz_t());
        }
        ModPoly out;
        out.coeffs.assign(r.begin(), r.begin() + m);
        for (auto& c : out.coeffs)
            c = reduce(c);
        out.trim();
        return out;
    }

    static ModPoly reversed(const ModPoly& p, std::size_t len)
    {
        ModPoly out;
        out.coeffs.assign(len, Natural(0));
        for (std::size_t i = 0; i < len && i < p.coeffs.size(); ++i)
            out.coeffs[len - 1 - i] = p.coeffs[i];
        out.trim();
        return out;
    }

    static ModPoly truncated(ModPoly p, std::size_t len)
    {
        if (p.coeffs.size() > len)
            p.coeffs.resize(len);
        p.trim();
        return p;
    }

    /// Inverse of h (h(0) = 1) modulo x^len by Newton iteration.
    ModPoly series_inverse(const ModPoly& h, std::size_t len) const
    {
        ModPoly v;
        v.coeffs = {Natural(1)};
        std::size_t prec = 1;
        while (prec < len) {
            prec = std::min(2 * prec, len);
            // v <- v (2 - h v)
            ModPoly hv = truncated(mul(truncated(h, prec), v), prec);
            ModPoly two;
            two.coeffs = {Natural(2)};
            v = truncated(mul(v, sub(two, hv)), prec);
        }
        return v;
    }

    ModPoly rem_newton(const ModPoly& f, const ModPoly& g) const
    {
        const std::size_t m = static_cast<std::size_t>(g.degree());
        const std::size_t n = static_cast<std::size_t>(f.degree());
        const std::size_t k = n - m + 1; // quotient length
        const ModPoly inv = series_inverse(reversed(g, m + 1), k);
        const ModPoly q_rev = truncated(mul(truncated(reversed(f, n + 1), k), inv), k);
        const ModPoly q = reversed(q_rev, k);
        return truncated(sub(f, mul(q, g)), m);
    }

    Natural n_;
};

/// Balanced tree of products of (x - p_i); level 0 holds the leaves.
class ProductTree {
public:
    ProductTree(const PolyRing& ring, const std::vector<Natural>& points)
    {
        if (points.empty())
            throw std::invalid_argument("ProductTree: no points");
        std::vector<ModPoly> level;
        level.reserve(points.size());
        for (const auto& p : points)
            level.push_back(ring.linear(p));
        levels_.push_back(std::move(level));
        while (levels_.back().size() > 1) {
            const auto& below = levels_.back();
            std::vector<ModPoly> above;
            above.reserve((below.size() + 1) / 2);
            for (std::size_t i = 0; i + 1 < below.size(); i += 2)
                above.push_back(ring.mul(below[i], below[i + 1]));
            if (below.size() % 2 == 1)
                above.push_back(below.back());
            levels_.push_back(std::move(above));
        }
    }

    const ModPoly& root() const { return levels_.back().front(); }
    const std::vector<std::vector<ModPoly>>& levels() const { return levels_; }
    std::size_t leaf_count() const { return levels_.front().size(); }

    std::size_t bytes() const
    {
        std::size_t total = 0;
        for (const auto& level : levels_)
            for (const auto& p : level)
                total += PolyRing::bytes(p);
        return total;
    }

private:
    std::vector<std::vector<ModPoly>> levels_;
};

inline ProductTree product_tree(const PolyRing& ring, const std::vector<Natural>& points)
{
    return ProductTree(ring, points);
}

/// f(p_i) mod N for every leaf, by reducing f down the tree.
/// `peak_bytes`, when given, receives the largest remainder level held at once.
inline std::vector<Natural> multipoint_eval(const PolyRing& ring, const ModPoly& f, const ProductTree& tree,
                                            std::size_t* peak_bytes = nullptr)
{
    const auto& levels = tree.levels();
    std::vector<ModPoly> current{ring.rem(f, tree.root())};
    std::size_t peak = PolyRing::bytes(current.front());
    for (std::size_t li = levels.size() - 1; li-- > 0;) {
        const auto& nodes = levels[li];
        std::vector<ModPoly> next;
        next.reserve(nodes.size());
        std::size_t level_bytes = 0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            next.push_back(ring.rem(current[k / 2], nodes[k]));
            level_bytes += PolyRing::bytes(next.back());
        }
        peak = std::max(peak, level_bytes);
        current = std::move(next);
    }
    if (peak_bytes)
        *peak_bytes = peak;
    std::vector<Natural> out;
    out.reserve(current.size());
    for (const auto& r : current)
        out.push_back(r.is_zero() ? Natural(0) : r.coeffs.front());
    return out;
}

inline std::vector<Natural> multipoint_eval(const PolyRing& ring, const ModPoly& f,
                                            const std::vector<Natural>& points)
{
    return multipoint_eval(ring, f, ProductTree(ring, points));
}

} // namespace rpower
