#pragma once

#include <cstdint>

namespace rpower {

/// Counter sink for the search loops. One tick per innermost u candidate and
/// one per trial division step; the rest are diagnostic.
struct SearchCounters {
    std::uint64_t trial_steps = 0;
    std::uint64_t u_iterations = 0;
    std::uint64_t filter_rejections = 0;
    std::uint64_t root_searches = 0;
    std::uint64_t f_evaluations = 0;

    std::uint64_t inner_iterations() const { return trial_steps + u_iterations; }

    SearchCounters& operator+=(const SearchCounters& o)
    {
        trial_steps += o.trial_steps;
        u_iterations += o.u_iterations;
        filter_rejections += o.filter_rejections;
        root_searches += o.root_searches;
        f_evaluations += o.f_evaluations;
        return *this;
    }
};

} // namespace rpower
