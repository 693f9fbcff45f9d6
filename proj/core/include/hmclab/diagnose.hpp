#pragma once

#include <array>
#include <span>
#include <vector>

#include "hmclab/model.hpp"
#include "hmclab/sample.hpp"

namespace hmclab {

struct DiagnosticsReport {
    double min_ess = 0.0;
    double mean_ess = 0.0;
    double cov_error = 0.0;
    double w2_to_target = 0.0;
    double empirical_rate = 0.0;  // per-step contraction estimate
};

/// W2 distance between Gaussians with commuting (diagonal) covariances:
/// sqrt(|m1 - m2|^2 + sum_i (sqrt(v1_i) - sqrt(v2_i))^2).
double w2_gaussians(std::span<const double> mean1, std::span<const double> var1,
                    std::span<const double> mean2, std::span<const double> var2);

/// Effective sample size K / (1 + 2 sum_k rho(k)) with biased empirical
/// autocorrelations, the sum truncated by Geyer's initial-positive-sequence
/// rule (stop before the first nonpositive even-lag pair sum), and the
/// result clamped to (0, K].
double ess(std::span<const double> series);

/// Frobenius-relative error between the empirical covariance of the
/// samples (N x d, row-major) and the target x-covariance diag(1/sigma_i).
double cov_error(std::span<const double> samples, int d, const Spectrum& spectrum);

/// Fitted per-step geometric decay of |y_k - y'_k| for synchronously
/// coupled pairs (shared refresh noise and durations, different x0),
/// averaged over trials. The fit starts at step `fit_start` to skip the
/// shared-v0 transient.
double coupled_rate(const Target& t, const SamplerSpec& spec, int steps, int trials,
                    std::uint64_t seed, int fit_start = 10);

/// Per-step squared contraction factors |dx_{k+1}|^2 / |dx_k|^2 of a
/// coupled full-refresh pair; used to compare against E[cos^2].
std::vector<double> coupled_squared_factors(const Target& t, const SamplerSpec& spec, int steps,
                                            std::uint64_t seed);

/// Margins of the three coupled-flow bounds for T <= 1/(2 sqrt(L_eff)),
/// with shared v0 and the damping eta applied to the velocity leg:
///   (1 - mu/(16 L)) |dx0|^2 - |dx_T|^2
///   eta^2 (L/4) |dx0|^2     - eta^2 |dv_T|^2
///   -eta mu/(2 sqrt(L)) |dx0|^2 - eta <dx_T, dv_T>
/// Exact flow for quadratics, velocity Verlet with h = T / substeps
/// otherwise.
std::array<double, 3> check_flow_inequalities(const Target& t, std::span<const double> x0,
                                              std::span<const double> x0p,
                                              std::span<const double> v0, double T, double eta,
                                              int substeps = 10000);

/// Summary statistics of one chain; `empirical_rate` is reported as given
/// (computed separately by a coupled run).
DiagnosticsReport diagnose_chain(const Target& t, const ChainRecord& rec, double empirical_rate);

}  // namespace hmclab
