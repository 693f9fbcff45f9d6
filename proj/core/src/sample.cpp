#include "hmclab/sample.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "hmclab/analyze.hpp"
#include "hmclab/flow.hpp"

namespace hmclab {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Damped: return "damped";
        case Variant::Rhmc: return "rhmc";
        case Variant::Chebyshev: return "chebyshev";
        case Variant::Coordinate: return "coordinate";
        case Variant::Baseline: return "baseline";
    }
    return "?";
}

Variant variant_from_name(std::string_view name) {
    if (name == "damped") return Variant::Damped;
    if (name == "rhmc") return Variant::Rhmc;
    if (name == "chebyshev") return Variant::Chebyshev;
    if (name == "coordinate") return Variant::Coordinate;
    if (name == "baseline" || name == "constant") return Variant::Baseline;
    throw std::invalid_argument("unknown sampler variant: " + std::string(name));
}

void ou_refresh_inplace(std::span<double> v, double eta, std::span<const double> z) {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("ou_refresh: eta outside [0,1]");
    if (v.size() != z.size()) throw std::invalid_argument("ou_refresh: dimension mismatch");
    const double q = std::sqrt(1.0 - eta * eta);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = eta * v[i] + q * z[i];
}

std::vector<double> ou_refresh(std::span<const double> v, double eta, std::span<const double> z) {
    std::vector<double> out(v.begin(), v.end());
    ou_refresh_inplace(out, eta, z);
    return out;
}

PhaseState default_init(const Target& t, ChainRng& rng) {
    const int d = t.dim();
    PhaseState s;
    s.x.resize(d);
    s.v.resize(d);
    const double sd = 1.0 / std::sqrt(t.spectrum.L);
    for (int i = 0; i < d; ++i) s.x[i] = sd * rng.init_x.gauss();
    for (int i = 0; i < d; ++i) s.v[i] = rng.init_v.gauss();
    return s;
}

PhaseState stationary_init(const Target& t, ChainRng& rng) {
    const int d = t.dim();
    PhaseState s;
    s.x.resize(d);
    s.v.resize(d);
    for (int i = 0; i < d; ++i) s.x[i] = rng.init_x.gauss() / std::sqrt(t.spectrum.sigma[i]);
    for (int i = 0; i < d; ++i) s.v[i] = rng.init_v.gauss();
    return s;
}

void flow_segment(const Target& t, const std::optional<IntegratorSpec>& engine,
                  std::span<double> x, std::span<double> v, double T, RngStream& tau_rng) {
    if (T < 0.0) throw std::invalid_argument("flow_segment: negative duration");
    if (!engine) {
        if (!t.is_quadratic()) {
            throw std::invalid_argument("flow_segment: exact engine requires a quadratic target");
        }
        exact_flow_inplace(t.spectrum, x, v, T);
        return;
    }
    if (T == 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(T / engine->h)));
    IntegratorSpec step = *engine;
    step.h = T / n;
    std::vector<double> scratch(x.size());
    const GradFn g = grad_fn(t);
    for (int i = 0; i < n; ++i) integrator_step(step, g, x, v, tau_rng, scratch);
}

void damped_iteration(const Target& t, const std::optional<IntegratorSpec>& engine,
                      std::span<double> x, std::span<double> v, double T, double eta,
                      std::span<const double> z, std::span<const double> zp,
                      RngStream& tau_rng) {
    ou_refresh_inplace(v, eta, z);
    flow_segment(t, engine, x, v, T, tau_rng);
    ou_refresh_inplace(v, eta, zp);
}

namespace {

ChainRecord make_record(const SamplerSpec& spec, int d) {
    ChainRecord rec;
    rec.K = spec.K;
    rec.d = d;
    rec.positions.resize(static_cast<std::size_t>(spec.K) * d);
    rec.jump_times.resize(spec.K);
    rec.seed = spec.seed;
    return rec;
}

void store_row(ChainRecord& rec, int k, std::span<const double> x) {
    std::memcpy(rec.positions.data() + static_cast<std::size_t>(k) * rec.d, x.data(),
                sizeof(double) * rec.d);
}

void check_common(const Target& t, const SamplerSpec& spec) {
    if (spec.K < 1) throw std::invalid_argument("sampler: K must be >= 1");
    if (spec.eta < 0.0 || spec.eta >= 1.0) throw std::invalid_argument("sampler: eta outside [0,1)");
    if (!spec.engine && !t.is_quadratic()) {
        throw std::invalid_argument("sampler: exact engine requires a quadratic target");
    }
    if (spec.engine) validate_integrator(*spec.engine, t.smoothness());
}

PhaseState start_state(const Target& t, ChainRng& rng, std::optional<PhaseState>& start) {
    if (start) {
        if (start->dim() != t.dim()) throw std::invalid_argument("sampler: start dimension mismatch");
        return std::move(*start);
    }
    return default_init(t, rng);
}

}  // namespace

ChainRecord run_damped(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                       std::optional<PhaseState> start) {
    check_common(t, spec);
    if (spec.variant != Variant::Damped && spec.variant != Variant::Baseline) {
        throw std::invalid_argument("run_damped: variant must be damped or baseline");
    }
    if (spec.T <= 0.0) throw std::invalid_argument("run_damped: T must be positive");
    const double eta = spec.variant == Variant::Baseline ? 0.0 : spec.eta;
    const int d = t.dim();
    PhaseState s = start_state(t, rng, start);
    ChainRecord rec = make_record(spec, d);
    std::vector<double> z(d), zp(d);
    for (int k = 0; k < spec.K; ++k) {
        rng.refresh.gauss_fill(z);
        rng.refresh.gauss_fill(zp);
        damped_iteration(t, spec.engine, s.x, s.v, spec.T, eta, z, zp, rng.tau);
        store_row(rec, k, s.x);
        rec.jump_times[k] = spec.T;
        rec.total_time += spec.T;
    }
    return rec;
}

ChainRecord run_rhmc(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                     std::optional<PhaseState> start) {
    check_common(t, spec);
    if (spec.lambda <= 0.0) throw std::invalid_argument("run_rhmc: lambda must be positive");
    const int d = t.dim();
    PhaseState s = start_state(t, rng, start);
    ChainRecord rec = make_record(spec, d);
    std::vector<double> z(d);
    for (int k = 0; k < spec.K; ++k) {
        const double T = rng.duration.exponential(spec.lambda);
        flow_segment(t, spec.engine, s.x, s.v, T, rng.tau);
        rng.refresh.gauss_fill(z);
        ou_refresh_inplace(s.v, spec.eta, z);
        store_row(rec, k, s.x);
        rec.jump_times[k] = T;
        rec.total_time += T;
    }
    return rec;
}

ChainRecord run_chebyshev(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                          std::optional<PhaseState> start) {
    check_common(t, spec);
    const double mu = t.strong_convexity(), L = t.smoothness();
    auto schedule = chebyshev_schedule(mu, L, spec.K);
    rng.perm.shuffle(schedule);
    const int d = t.dim();
    PhaseState s = start_state(t, rng, start);
    ChainRecord rec = make_record(spec, d);
    std::vector<double> z(d);
    for (int k = 0; k < spec.K; ++k) {
        flow_segment(t, spec.engine, s.x, s.v, schedule[k], rng.tau);
        // full refresh: only the last iterate is the sampler's output, all
        // positions are still recorded for diagnostics
        rng.refresh.gauss_fill(z);
        ou_refresh_inplace(s.v, 0.0, z);
        store_row(rec, k, s.x);
        rec.jump_times[k] = schedule[k];
        rec.total_time += schedule[k];
    }
    return rec;
}

ChainRecord run_coordinate(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                           std::optional<PhaseState> start) {
    check_common(t, spec);
    if (spec.engine || !t.is_quadratic()) {
        throw std::invalid_argument("run_coordinate: exact engine on a quadratic target only");
    }
    const int d = t.dim();
    if (static_cast<int>(spec.rates.size()) != d) {
        throw std::invalid_argument("run_coordinate: need one positive rate per coordinate");
    }
    double total_rate = 0.0;
    for (double r : spec.rates) {
        if (r <= 0.0) throw std::invalid_argument("run_coordinate: rates must be positive");
        total_rate += r;
    }
    PhaseState s = start_state(t, rng, start);
    ChainRecord rec = make_record(spec, d);
    // Exponential race: the minimum of the d independent clocks is an
    // exponential with the summed rate and the ringing coordinate is
    // categorical with weights rate_i / total.
    for (int k = 0; k < spec.K; ++k) {
        const double dt = rng.duration.exponential(1.0 / total_rate);
        exact_flow_inplace(t.spectrum, s.x, s.v, dt);
        double u = rng.coord.uniform() * total_rate;
        int j = 0;
        for (; j < d - 1; ++j) {
            u -= spec.rates[j];
            if (u < 0.0) break;
        }
        const double z = rng.refresh.gauss();
        s.v[j] = spec.eta * s.v[j] + std::sqrt(1.0 - spec.eta * spec.eta) * z;
        store_row(rec, k, s.x);
        rec.jump_times[k] = dt;
        rec.total_time += dt;
    }
    return rec;
}

ChainRecord run_chain(const Target& t, const SamplerSpec& spec, std::uint64_t chain,
                      std::optional<PhaseState> start) {
    ChainRng rng(spec.seed, chain);
    switch (spec.variant) {
        case Variant::Damped:
        case Variant::Baseline: return run_damped(t, spec, rng, std::move(start));
        case Variant::Rhmc: return run_rhmc(t, spec, rng, std::move(start));
        case Variant::Chebyshev: return run_chebyshev(t, spec, rng, std::move(start));
        case Variant::Coordinate: return run_coordinate(t, spec, rng, std::move(start));
    }
    throw std::logic_error("run_chain: unreachable");
}

SamplerSpec optimal_params(Variant v, double mu, double L, double eps, const Spectrum* spectrum) {
    if (mu <= 0.0 || L < mu) throw std::invalid_argument("optimal_params: need 0 < mu <= L");
    const double kappa = L / mu;
    SamplerSpec spec;
    spec.variant = v;
    switch (v) {
        case Variant::Baseline:
            spec.T = 3.14159265358979323846 / (2.0 * std::sqrt(L));
            spec.eta = 0.0;
            break;
        case Variant::Damped: {
            spec.T = 3.14159265358979323846 / (std::sqrt(L) + std::sqrt(mu));
            if (kappa == 1.0) {
                spec.eta = 0.0;  // the formula is 0/0 at kappa = 1
            } else {
                const double th = 3.14159265358979323846 / (1.0 + std::sqrt(kappa));
                spec.eta = (1.0 - std::sin(th)) / std::cos(th);
            }
            break;
        }
        case Variant::Rhmc:
            spec.lambda = 1.0 / (2.0 * std::sqrt(mu));
            spec.eta = 0.0;
            break;
        case Variant::Chebyshev: {
            if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("optimal_params: eps in (0,1)");
            spec.K = static_cast<int>(std::ceil(std::sqrt(kappa) * std::log(1.0 / eps)));
            spec.eta = 0.0;
            break;
        }
        case Variant::Coordinate: {
            if (spectrum == nullptr) {
                throw std::invalid_argument("optimal_params: coordinate variant needs the spectrum");
            }
            spec.rates.reserve(spectrum->sigma.size());
            for (double s : spectrum->sigma) spec.rates.push_back(s / std::sqrt(mu));
            spec.eta = 0.0;
            break;
        }
    }
    return spec;
}

}  // namespace hmclab
