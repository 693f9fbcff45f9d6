#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hmclab/model.hpp"
#include "hmclab/sample.hpp"

namespace hmclab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Target description: either an explicit eigenvalue list or a
/// (d, mu, L, spacing) rule with spacing "linear" or "log".
struct TargetConfig {
    std::vector<double> eigenvalues;
    int d = 0;
    double mu = 0.0;
    double L = 0.0;
    std::string spacing = "linear";
    std::string kind = "quadratic";  // or "perturbed-quadratic"
    double eps_perturb = 0.0;

    Target build() const;
};

struct AlgoConfig {
    Variant variant = Variant::Baseline;
    bool auto_params = true;  // resolve with optimal_params
    SamplerSpec spec;         // explicit parameters when !auto_params
};

struct BenchConfig {
    TargetConfig target;
    std::vector<AlgoConfig> algorithms;
    int chains = 50;
    int K = 2000;
    double eps = 1e-2;
    std::uint64_t seed = 1;
    std::string out = "bench_out";
    std::string format = "csv";     // or "json"
    std::string init = "default";   // or "stationary"
    int burn_in = 0;

    /// Resolve an algorithm entry against the target (fills auto params,
    /// K, seed).
    SamplerSpec resolve(const AlgoConfig& algo, const Target& t) const;
};

BenchConfig parse_bench_config(const std::string& json_text);
BenchConfig load_bench_config(const std::string& path);

}  // namespace hmclab
