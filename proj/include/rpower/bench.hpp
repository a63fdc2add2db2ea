#pragma once

// Benchmark harness: one CSV row per (algorithm, N). Timings are recorded,
// never checked; everything except elapsed_ns and peak_bytes is a function
// of the seed.

#include "rpower/arith.hpp"
#include "rpower/baselines.hpp"
#include "rpower/lehman.hpp"
#include "rpower/pstar.hpp"

#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rpower {

inline constexpr std::string_view kCsvHeader = "algo,n_decimal,digits,elapsed_ns,inner_iters,peak_bytes,outcome";
inline constexpr const char* kMaxDigitsEnv = "RPOWER_MAX_DIGITS";
inline constexpr unsigned kDefaultMaxDigits = 24;

struct BenchRecord {
    std::string algo; ///< lehman, wheel, ps, pstar-lehman
    std::string n_decimal;
    unsigned digits = 0;
    std::uint64_t elapsed_ns = 0;
    std::uint64_t inner_iters = 0;
    std::uint64_t peak_bytes = 0;
    std::string outcome; ///< factor:<d>, r-power-free, squarefree, squarefull:<d>

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline std::string to_csv_row(const BenchRecord& r)
{
    return r.algo + ',' + r.n_decimal + ',' + std::to_string(r.digits) + ',' + std::to_string(r.elapsed_ns) + ',' +
           std::to_string(r.inner_iters) + ',' + std::to_string(r.peak_bytes) + ',' + r.outcome;
}

inline BenchRecord parse_csv_row(const std::string& line)
{
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        f.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (f.size() != 7)
        throw std::invalid_argument("csv row: expected 7 fields, got " + std::to_string(f.size()));
    BenchRecord r;
    r.algo = f[0];
    r.n_decimal = f[1];
    r.digits = static_cast<unsigned>(std::stoul(f[2]));
    r.elapsed_ns = std::stoull(f[3]);
    r.inner_iters = std::stoull(f[4]);
    r.peak_bytes = std::stoull(f[5]);
    r.outcome = f[6];
    return r;
}

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& rows)
{
    os << kCsvHeader << '\n';
    for (const auto& r : rows)
        os << to_csv_row(r) << '\n';
}

/// Decimal, or hexadecimal with a 0x prefix.
inline Natural parse_natural(std::string_view text)
{
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        base = 16;
        text.remove_prefix(2);
    }
    if (text.empty())
        throw std::invalid_argument("empty number");
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (base == 10 ? !std::isdigit(c) : !std::isxdigit(c))
            throw std::invalid_argument("not a number: " + std::string(text));
    }
    return Natural(std::string(text), base);
}

inline unsigned decimal_digits(const Natural& n) { return static_cast<unsigned>(n.get_str(10).size()); }

/// Smallest prime >= 10^digits.
inline Natural next_prime_at_least(const Natural& from)
{
    Natural n = from < 2 ? Natural(2) : from;
    while (!is_probable_prime(n))
        ++n;
    return n;
}

/// Seed of trial `index` at `digits`, shared by the bench and gen-pstar.
inline std::uint64_t derive_seed(std::uint64_t seed, unsigned digits, std::uint64_t index)
{
    // splitmix64 over the packed inputs
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(digits) * 1'000'003ull + index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline unsigned max_digits_from_env()
{
    if (const char* v = std::getenv(kMaxDigitsEnv)) {
        try {
            return static_cast<unsigned>(std::stoul(v));
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(kMaxDigitsEnv) + " is not a number");
        }
    }
    return kDefaultMaxDigits;
}

enum class BenchSuite { worstcase, pstar };

struct BenchConfig {
    BenchSuite suite = BenchSuite::worstcase;
    std::vector<unsigned> digits;
    unsigned trials = 1;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    unsigned max_digits = kDefaultMaxDigits;
};

namespace detail {

template <class Fn>
BenchRecord timed(std::string algo, const Natural& N, Fn&& fn)
{
    BenchRecord r;
    r.algo = std::move(algo);
    r.n_decimal = to_decimal(N);
    r.digits = decimal_digits(N);
    const auto t0 = std::chrono::steady_clock::now();
    fn(r);
    const auto t1 = std::chrono::steady_clock::now();
    r.elapsed_ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    return r;
}

inline std::string squarefree_outcome(const SquarefreeVerdict& v)
{
    return v.squarefull ? "squarefull:" + to_decimal(*v.witness) : std::string("squarefree");
}

inline void bench_worstcase(const Natural& N, unsigned threads, std::vector<BenchRecord>& rows)
{
    rows.push_back(timed("lehman", N, [&](BenchRecord& r) {
        SearchCounters c;
        DetectOptions opt;
        opt.threads = threads;
        opt.counters = &c;
        const auto out = detect(N, 2, opt);
        r.inner_iters = c.inner_iterations();
        r.outcome = out.factor ? "factor:" + to_decimal(*out.factor) : std::string("r-power-free");
    }));
    for (auto [name, engine] : {std::pair{"wheel", DivisorEngine::wheel}, std::pair{"ps", DivisorEngine::pollard_strassen}}) {
        rows.push_back(timed(name, N, [&](BenchRecord& r) {
            BaselineStats s;
            const auto v = squarefree_decide(N, engine, &s);
            r.inner_iters = s.steps;
            r.peak_bytes = s.peak_bytes;
            r.outcome = squarefree_outcome(v);
        }));
    }
}

inline void bench_pstar(const PStarInstance& inst, unsigned threads, std::vector<BenchRecord>& rows)
{
    const Natural& N = inst.N;
    rows.push_back(timed("pstar-lehman", N, [&](BenchRecord& r) {
        SearchCounters c;
        PStarOptions opt;
        opt.threads = threads;
        opt.counters = &c;
        const auto sol = pstar_solve(N, opt);
        if (!sol)
            throw std::logic_error("pstar-lehman failed on a generated instance");
        r.inner_iters = c.inner_iterations();
        r.outcome = "factor:" + to_decimal(sol->p);
    }));
    // q is the only divisor in [N^(1/3)/4, N^(1/3)].
    const DivisorSearchRange range(to_u64(ceil_root(N, 64, 3)), to_u64(iroot(N, 3)));
    for (auto [name, engine] : {std::pair{"wheel", DivisorEngine::wheel}, std::pair{"ps", DivisorEngine::pollard_strassen}}) {
        rows.push_back(timed(name, N, [&](BenchRecord& r) {
            BaselineStats s;
            const auto d = smallest_divisor(engine, N, range, &s);
            if (!d)
                throw std::logic_error(std::string(name) + " failed on a generated instance");
            r.inner_iters = s.steps;
            r.peak_bytes = s.peak_bytes;
            r.outcome = "factor:" + std::to_string(*d);
        }));
    }
}

} // namespace detail

inline std::vector<BenchRecord> run_bench(const BenchConfig& config)
{
    if (config.digits.empty())
        throw std::invalid_argument("bench: no digit counts given");
    for (unsigned d : config.digits) {
        if (d > config.max_digits)
            throw std::invalid_argument("bench: " + std::to_string(d) + " digits exceeds the feasibility ceiling of " +
                                        std::to_string(config.max_digits) + " (set " + kMaxDigitsEnv + ")");
        if (config.suite == BenchSuite::pstar && d < 6)
            throw std::invalid_argument("bench: the pstar suite needs at least 6 digits");
        if (config.suite == BenchSuite::worstcase && d < 2)
            throw std::invalid_argument("bench: the worstcase suite needs at least 2 digits");
    }
    std::vector<BenchRecord> rows;
    for (unsigned d : config.digits) {
        if (config.suite == BenchSuite::worstcase) {
            detail::bench_worstcase(next_prime_at_least(pow(Natural(10), d)), config.threads, rows);
        } else {
            for (unsigned t = 0; t < config.trials; ++t)
                detail::bench_pstar(gen_instance(d, derive_seed(config.seed, d, t)), config.threads, rows);
        }
    }
    return rows;
}

} // namespace rpower
