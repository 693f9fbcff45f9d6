#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hmclab/integrate.hpp"
#include "hmclab/model.hpp"
#include "hmclab/rng.hpp"

namespace hmclab {

enum class Variant { Damped, Rhmc, Chebyshev, Coordinate, Baseline };

const char* variant_name(Variant v);
Variant variant_from_name(std::string_view name);

/// Sampler configuration. `engine` empty means the exact flow (quadratic
/// targets only); otherwise the named integrator approximates each flow
/// segment. Baseline is damped with eta = 0; chebyshev ignores eta and T
/// (full refresh, schedule-derived durations).
struct SamplerSpec {
    Variant variant = Variant::Baseline;
    double eta = 0.0;
    double T = 0.0;                  // damped/baseline flow time
    double lambda = 0.0;             // rhmc mean jump time
    std::vector<double> rates;       // coordinate clock rates (1/time)
    int K = 1;                       // iterations (coordinate: events)
    std::uint64_t seed = 0;
    std::optional<IntegratorSpec> engine;  // empty = exact flow
};

/// Positions and realized durations of one chain.
struct ChainRecord {
    int K = 0;
    int d = 0;
    std::vector<double> positions;   // K x d, row-major
    std::vector<double> jump_times;  // realized flow durations, one per row
    double total_time = 0.0;
    std::uint64_t seed = 0;

    std::span<const double> row(int k) const {
        return {positions.data() + static_cast<std::size_t>(k) * d, static_cast<std::size_t>(d)};
    }
};

/// v <- eta v + sqrt(1 - eta^2) z.
void ou_refresh_inplace(std::span<double> v, double eta, std::span<const double> z);
std::vector<double> ou_refresh(std::span<const double> v, double eta, std::span<const double> z);

/// Default chain initialization x0 ~ N(0, I/L), v0 ~ N(0, I).
PhaseState default_init(const Target& t, ChainRng& rng);
/// Stationary product initialization x0 ~ N(0, Sigma^-1), v0 ~ N(0, I)
/// (quadratic targets).
PhaseState stationary_init(const Target& t, ChainRng& rng);

/// Advance (x, v) along the Hamiltonian flow for time T with the chosen
/// engine. With an integrator engine the segment is cut into
/// ceil(T / h) equal steps.
void flow_segment(const Target& t, const std::optional<IntegratorSpec>& engine,
                  std::span<double> x, std::span<double> v, double T, RngStream& tau_rng);

/// One damped-HMC iteration: half refresh, flow for T, half refresh.
void damped_iteration(const Target& t, const std::optional<IntegratorSpec>& engine,
                      std::span<double> x, std::span<double> v, double T, double eta,
                      std::span<const double> z, std::span<const double> zp, RngStream& tau_rng);

/// Chain drivers. Each uses the substreams of `rng` so that two chains
/// given identical ChainRng sequences share their noise exactly.
ChainRecord run_damped(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                       std::optional<PhaseState> start = std::nullopt);
ChainRecord run_rhmc(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                     std::optional<PhaseState> start = std::nullopt);
ChainRecord run_chebyshev(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                          std::optional<PhaseState> start = std::nullopt);
ChainRecord run_coordinate(const Target& t, const SamplerSpec& spec, ChainRng& rng,
                           std::optional<PhaseState> start = std::nullopt);

/// Dispatch on spec.variant. `chain` indexes the RNG substreams.
ChainRecord run_chain(const Target& t, const SamplerSpec& spec, std::uint64_t chain = 0,
                      std::optional<PhaseState> start = std::nullopt);

/// The closed-form parameter choices:
///   baseline   T = pi/(2 sqrt(L)), eta = 0
///   damped     T = pi/(sqrt(L)+sqrt(mu)), eta = (1-sin(pi/(1+sqrt(k))))/cos(pi/(1+sqrt(k)))
///   rhmc       lambda = 1/(2 sqrt(mu)), eta = 0
///   chebyshev  K = ceil(sqrt(kappa) log(1/eps)) with the schedule
///   coordinate rate_i = sigma_i / sqrt(mu), eta = 0
/// kappa = 1 puts the damped eta formula at 0/0; continuity sets eta = 0.
SamplerSpec optimal_params(Variant v, double mu, double L, double eps,
                           const Spectrum* spectrum = nullptr);

}  // namespace hmclab
