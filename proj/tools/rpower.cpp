// rpower: r-power divisor detection, squarefree decisions, Problem P*
// solving and the benchmark harness.

#include "rpower/rpower.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace rpower;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Natural parse_n(const std::string& text)
{
    Natural n;
    try {
        n = parse_natural(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (n <= 1)
        throw UsageError("N must be an integer greater than 1");
    return n;
}

DivisorEngine parse_engine(const std::string& algo)
{
    if (algo == "wheel")
        return DivisorEngine::wheel;
    if (algo == "ps")
        return DivisorEngine::pollard_strassen;
    throw UsageError("unknown divisor engine: " + algo);
}

void print_counters(const SearchCounters& c)
{
    std::cout << "trial_steps " << c.trial_steps << '\n'
              << "u_iterations " << c.u_iterations << '\n'
              << "filter_rejections " << c.filter_rejections << '\n'
              << "root_searches " << c.root_searches << '\n';
}

int cmd_detect(const std::string& n_text, unsigned r, const std::string& algo, unsigned threads)
{
    const Natural N = parse_n(n_text);
    if (algo == "lehman") {
        if (r < 2 || r + 1 > bit_length(N))
            throw UsageError("--r must satisfy 2 <= r <= lg N");
        SearchCounters c;
        DetectOptions opt;
        opt.threads = threads;
        opt.counters = &c;
        const auto out = detect(N, r, opt);
        if (out.factor)
            std::cout << "factor " << to_decimal(*out.factor) << '\n';
        else
            std::cout << "r-power-free\n";
        print_counters(c);
        return 0;
    }
    if (r != 2)
        throw UsageError("--algo " + algo + " only decides r = 2");
    BaselineStats s;
    const auto v = squarefree_decide(N, parse_engine(algo), &s);
    if (v.squarefull)
        std::cout << "factor " << to_decimal(*v.witness) << '\n';
    else
        std::cout << "r-power-free\n";
    std::cout << "steps " << s.steps << '\n';
    return 0;
}

int cmd_squarefree(const std::string& n_text, const std::string& algo)
{
    const Natural N = parse_n(n_text);
    BaselineStats s;
    const auto v = squarefree_decide(N, parse_engine(algo), &s);
    if (v.squarefull)
        std::cout << "squarefull " << to_decimal(*v.witness) << '\n';
    else
        std::cout << "squarefree\n";
    return 0;
}

int cmd_pstar(const std::string& n_text, const std::string& b_override, unsigned threads)
{
    const Natural N = parse_n(n_text);
    SearchCounters c;
    PStarOptions opt;
    opt.threads = threads;
    opt.counters = &c;
    if (!b_override.empty()) {
        try {
            opt.b_override = parse_natural(b_override);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (*opt.b_override < 1)
            throw UsageError("--b-override must be positive");
    }
    const auto sol = pstar_solve(N, opt);
    if (sol)
        std::cout << "p=" << to_decimal(sol->p) << " q=" << to_decimal(sol->q) << '\n';
    else
        std::cout << "not-pstar\n";
    std::cout << "u_iterations " << c.u_iterations << '\n';
    return 0;
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& body)
{
    if (path.empty() || path == "-") {
        body(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    body(out);
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing " + path);
}

int cmd_gen_pstar(unsigned digits, unsigned count, std::uint64_t seed, const std::string& out_path)
{
    if (digits < 6)
        throw UsageError("--digits must be at least 6");
    std::vector<PStarInstance> instances;
    for (unsigned i = 0; i < count; ++i)
        instances.push_back(gen_instance(digits, derive_seed(seed, digits, i)));
    with_output(out_path, [&](std::ostream& os) { write_instances(os, instances); });
    return 0;
}

int cmd_bench(const std::string& suite, const std::vector<unsigned>& digits, unsigned trials, std::uint64_t seed,
              unsigned threads, const std::string& out_path)
{
    BenchConfig cfg;
    if (suite == "worstcase")
        cfg.suite = BenchSuite::worstcase;
    else if (suite == "pstar")
        cfg.suite = BenchSuite::pstar;
    else
        throw UsageError("unknown suite: " + suite);
    cfg.digits = digits;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.threads = threads;
    try {
        cfg.max_digits = max_digits_from_env();
        if (cfg.digits.empty())
            throw std::invalid_argument("--digits is required");
        for (unsigned d : cfg.digits)
            if (d > cfg.max_digits)
                throw std::invalid_argument(std::to_string(d) + " digits exceeds the feasibility ceiling of " +
                                            std::to_string(cfg.max_digits) + " (set " + kMaxDigitsEnv + ")");
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    // Open the output before doing any work so a bad path fails fast.
    std::ofstream file;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path, std::ios::binary);
        if (!file)
            throw std::runtime_error("cannot open " + out_path + " for writing");
    }
    const auto rows = run_bench(cfg);
    std::ostream& os = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
    write_csv(os, rows);
    os.flush();
    if (!os)
        throw std::runtime_error("failed writing benchmark output");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"r-power divisor detection by the generalized Lehman method"};
    app.require_subcommand(1);

    std::string n_text, algo = "lehman", sf_algo = "wheel", b_override, out_path, suite = "worstcase";
    unsigned r = 2, threads = 1, digits = 12, count = 1, trials = 1;
    std::uint64_t seed = 1;
    std::vector<unsigned> digit_list;

    auto* detect_cmd = app.add_subcommand("detect", "find a nontrivial factor of N or prove N r-power free");
    detect_cmd->add_option("n", n_text, "N (decimal or 0x-hex)")->required();
    detect_cmd->add_option("--r", r, "power r >= 2")->capture_default_str();
    detect_cmd->add_option("--algo", algo, "lehman | wheel | ps (wheel and ps decide r = 2)")->capture_default_str();
    detect_cmd->add_option("--threads", threads, "worker threads")->capture_default_str();

    auto* sf_cmd = app.add_subcommand("squarefree", "decide whether N is squarefree");
    sf_cmd->add_option("n", n_text, "N (decimal or 0x-hex)")->required();
    sf_cmd->add_option("--algo", sf_algo, "wheel | ps")->capture_default_str();

    auto* pstar_cmd = app.add_subcommand("pstar", "recover p, q from N = p^2 q with q < p < 8q");
    pstar_cmd->add_option("n", n_text, "N (decimal or 0x-hex)")->required();
    pstar_cmd->add_option("--b-override", b_override, "Farey order B (default ceil(N^(1/9)))");
    pstar_cmd->add_option("--threads", threads, "worker threads")->capture_default_str();

    auto* gen_cmd = app.add_subcommand("gen-pstar", "write seeded P* instances as `N p q seed` lines");
    gen_cmd->add_option("--digits", digits, "decimal digits j of 10^j")->capture_default_str();
    gen_cmd->add_option("--count", count, "number of instances")->capture_default_str();
    gen_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
    gen_cmd->add_option("--out", out_path, "output file (default stdout)");

    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite and write CSV");
    bench_cmd->add_option("--suite", suite, "worstcase | pstar")->capture_default_str();
    bench_cmd->add_option("--digits", digit_list, "digit counts, e.g. 8,10,12")->delimiter(',')->required();
    bench_cmd->add_option("--trials", trials, "instances per digit count (pstar)")->capture_default_str();
    bench_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
    bench_cmd->add_option("--threads", threads, "worker threads for the Lehman searches")->capture_default_str();
    bench_cmd->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*detect_cmd)
            return cmd_detect(n_text, r, algo, threads);
        if (*sf_cmd)
            return cmd_squarefree(n_text, sf_algo);
        if (*pstar_cmd)
            return cmd_pstar(n_text, b_override, threads);
        if (*gen_cmd)
            return cmd_gen_pstar(digits, count, seed, out_path);
        if (*bench_cmd)
            return cmd_bench(suite, digit_list, trials, seed, threads, out_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
