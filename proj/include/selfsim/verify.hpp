#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "selfsim/cylinder_oracle.hpp"

namespace selfsim {

struct VerifyOptions {
    int k = 8; // upper level; each suite caps it at its own limit
    std::uint64_t seed = 0;
    int sandwich_samples = 10000;
    int scaling_samples = 200;
    int brute_balls = 1000;
    int pushforward_balls = 100;
    std::function<void(const SandwichRecord&)> on_sandwich; // called for every sandwich sample
};

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;

    bool passed() const { return checks > 0 && failures == 0; }
};

/// mass, count, scaling, sandwich, cylinder, brute, open-closed, intervals,
/// pushforward, tv, zoom, typical
const std::vector<std::string>& suite_names();

/// Runs one suite; "all" is not accepted here.
SuiteResult run_suite(const std::string& name, const VerifyOptions& options);

/// Portable uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_uniform(std::uint64_t draw);

} // namespace selfsim
