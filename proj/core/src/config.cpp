#include "hmclab/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hmclab {

using nlohmann::json;

Target TargetConfig::build() const {
    Spectrum s;
    if (!eigenvalues.empty()) {
        s = Spectrum::from_eigenvalues(eigenvalues);
    } else {
        if (d < 1) throw ConfigError("target: need eigenvalues or d/mu/L");
        if (spacing == "linear") {
            s = Spectrum::linspaced(d, mu, L);
        } else if (spacing == "log") {
            s = Spectrum::logspaced(d, mu, L);
        } else {
            throw ConfigError("target: spacing must be linear or log");
        }
    }
    if (kind == "quadratic") return Target::quadratic(std::move(s));
    if (kind == "perturbed-quadratic") return Target::perturbed(std::move(s), eps_perturb);
    throw ConfigError("target: kind must be quadratic or perturbed-quadratic");
}

namespace {

TargetConfig parse_target(const json& j) {
    TargetConfig t;
    if (j.contains("eigenvalues")) {
        t.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    } else {
        t.d = j.at("d").get<int>();
        t.mu = j.at("mu").get<double>();
        t.L = j.at("L").get<double>();
        t.spacing = j.value("spacing", "linear");
    }
    t.kind = j.value("kind", "quadratic");
    t.eps_perturb = j.value("eps_perturb", 0.0);
    return t;
}

AlgoConfig parse_algo(const json& j) {
    AlgoConfig a;
    if (j.is_string()) {
        a.variant = variant_from_name(j.get<std::string>());
        a.auto_params = true;
        return a;
    }
    a.variant = variant_from_name(j.at("variant").get<std::string>());
    const bool is_auto = j.value("params", "auto") == std::string("auto") && !j.contains("eta") &&
                         !j.contains("T") && !j.contains("lambda") && !j.contains("rates");
    a.auto_params = is_auto;
    if (!is_auto) {
        a.spec.variant = a.variant;
        a.spec.eta = j.value("eta", 0.0);
        a.spec.T = j.value("T", 0.0);
        a.spec.lambda = j.value("lambda", 0.0);
        if (j.contains("rates")) a.spec.rates = j.at("rates").get<std::vector<double>>();
    }
    if (j.contains("engine")) {
        const auto& e = j.at("engine");
        IntegratorSpec is;
        const std::string kind = e.at("kind").get<std::string>();
        if (kind == "velocity-verlet") is.kind = IntegratorKind::VelocityVerlet;
        else if (kind == "position-verlet") is.kind = IntegratorKind::PositionVerlet;
        else if (kind == "smc") is.kind = IntegratorKind::Smc;
        else if (kind == "nested-smc") is.kind = IntegratorKind::NestedSmc;
        else if (kind == "sym-smc") is.kind = IntegratorKind::SymSmc;
        else throw ConfigError("engine: unknown integrator kind " + kind);
        is.h = e.at("h").get<double>();
        is.steps = e.value("steps", 1);
        a.spec.engine = is;
    }
    return a;
}

}  // namespace

BenchConfig parse_bench_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        BenchConfig c;
        c.target = parse_target(j.at("target"));
        if (j.contains("algorithms")) {
            for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algo(a));
        }
        c.chains = j.value("chains", 50);
        c.K = j.value("K", 2000);
        c.eps = j.value("eps", 1e-2);
        c.seed = j.value("seed", static_cast<std::uint64_t>(1));
        c.out = j.value("out", "bench_out");
        c.format = j.value("format", "csv");
        c.init = j.value("init", "default");
        c.burn_in = j.value("burn_in", 0);
        if (c.chains < 1) throw ConfigError("config: chains must be >= 1");
        if (c.format != "csv" && c.format != "json") throw ConfigError("config: format must be csv or json");
        if (c.init != "default" && c.init != "stationary") throw ConfigError("config: init must be default or stationary");
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_bench_config(ss.str());
}

SamplerSpec BenchConfig::resolve(const AlgoConfig& algo, const Target& t) const {
    SamplerSpec spec;
    if (algo.auto_params) {
        spec = optimal_params(algo.variant, t.strong_convexity(), t.smoothness(), eps,
                              &t.spectrum);
        spec.engine = algo.spec.engine;
    } else {
        spec = algo.spec;
    }
    spec.variant = algo.variant;
    spec.K = K;  // chain length is the harness's, not the theory K
    spec.seed = seed;
    return spec;
}

}  // namespace hmclab
