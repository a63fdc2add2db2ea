#pragma once

// Residue filter for r = 2. A candidate u can only be a q + 2 b p if
// x^3 - u x^2 + 4 a b^2 N has a root modulo every small prime s, so a lookup
// on (c, d) = (-u, 4 a b^2 N) mod s rejects most candidates before any
// bisection happens.

#include "rpower/arith.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rpower {

inline constexpr unsigned kMaxFilterPrimes = 35;

/// The first `count` primes.
inline std::vector<unsigned> first_primes(unsigned count)
{
    std::vector<unsigned> out;
    for (unsigned n = 2; out.size() < count; ++n) {
        bool prime = true;
        for (unsigned p : out) {
            if (p * p > n)
                break;
            if (n % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime)
            out.push_back(n);
    }
    return out;
}

/// entry(c, d) is set iff x^3 + c x^2 + d has a root mod s.
class RootTable {
public:
    explicit RootTable(unsigned s) : s_(s), bits_((static_cast<std::size_t>(s) * s + 63) / 64, 0)
    {
        if (s < 2)
            throw std::invalid_argument("RootTable: modulus must be prime");
        // For each x and c, the d making x a root is -(x^3 + c x^2).
        for (unsigned x = 0; x < s; ++x) {
            const std::uint64_t x2 = static_cast<std::uint64_t>(x) * x % s;
            const std::uint64_t x3 = x2 * x % s;
            for (unsigned c = 0; c < s; ++c) {
                const std::uint64_t v = (x3 + c * x2) % s;
                const unsigned d = static_cast<unsigned>((s - v) % s);
                set(c, d);
            }
        }
    }

    unsigned modulus() const { return s_; }

    bool entry(unsigned c, unsigned d) const
    {
        const std::size_t i = static_cast<std::size_t>(c) * s_ + d;
        return (bits_[i >> 6] >> (i & 63)) & 1u;
    }

    std::size_t bytes() const { return bits_.size() * sizeof(std::uint64_t); }

private:
    void set(unsigned c, unsigned d)
    {
        const std::size_t i = static_cast<std::size_t>(c) * s_ + d;
        bits_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }

    unsigned s_;
    std::vector<std::uint64_t> bits_;
};

/// Smallest M with (2/3)^M < 1/lg_n, capped at kMaxFilterPrimes.
inline unsigned filter_size_for_lg(double lg_n)
{
    unsigned m = 1;
    while (m < kMaxFilterPrimes && std::pow(2.0 / 3.0, m) >= 1.0 / lg_n)
        ++m;
    return m;
}

inline double lg(const Natural& n)
{
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return static_cast<double>(exp) + std::log2(mant);
}

class FilterBank {
public:
    explicit FilterBank(unsigned count)
    {
        if (count == 0 || count > kMaxFilterPrimes)
            throw std::invalid_argument("FilterBank: table count out of range");
        for (unsigned s : first_primes(count))
            tables_.emplace_back(s);
    }

    unsigned size() const { return static_cast<unsigned>(tables_.size()); }
    const std::vector<RootTable>& tables() const { return tables_; }

    std::size_t bytes() const
    {
        std::size_t total = 0;
        for (const auto& t : tables_)
            total += t.bytes();
        return total;
    }

    /// v modulo each table prime.
    std::vector<unsigned> residues(const Natural& v) const
    {
        std::vector<unsigned> out(tables_.size());
        for (std::size_t i = 0; i < tables_.size(); ++i)
            out[i] = static_cast<unsigned>(mpz_fdiv_ui(v.get_mpz_t(), tables_[i].modulus()));
        return out;
    }

    /// u_res[i] = u mod s_i, d_res[i] = 4 a b^2 N mod s_i.
    bool passes_residues(const std::vector<unsigned>& u_res, const std::vector<unsigned>& d_res) const
    {
        for (std::size_t i = 0; i < tables_.size(); ++i) {
            const unsigned s = tables_[i].modulus();
            const unsigned c = u_res[i] == 0 ? 0 : s - u_res[i];
            if (!tables_[i].entry(c, d_res[i]))
                return false;
        }
        return true;
    }

    bool passes(const Natural& u, std::uint64_t a, std::uint64_t b, const Natural& N) const
    {
        const Natural d = 4 * from_u64(a) * from_u64(b) * from_u64(b) * N;
        return passes_residues(residues(u), residues(d));
    }

private:
    std::vector<RootTable> tables_;
};

inline FilterBank build_bank(const Natural& N)
{
    if (N <= 1)
        throw std::invalid_argument("build_bank: N must exceed 1");
    return FilterBank(filter_size_for_lg(lg(N)));
}

/// Tracks u mod s for consecutive u without touching big integers.
class ResidueCounter {
public:
    ResidueCounter(const FilterBank& bank, const Natural& start) : bank_(&bank), res_(bank.residues(start)) {}

    const std::vector<unsigned>& residues() const { return res_; }

    void increment()
    {
        const auto& t = bank_->tables();
        for (std::size_t i = 0; i < res_.size(); ++i)
            if (++res_[i] == t[i].modulus())
                res_[i] = 0;
    }

private:
    const FilterBank* bank_;
    std::vector<unsigned> res_;
};

} // namespace rpower
