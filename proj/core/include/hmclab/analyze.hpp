#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "hmclab/model.hpp"

namespace hmclab {

/// Spectral data of one per-coordinate Gram matrix A(sigma)^T A(sigma).
/// b is the trace-like quantity
///   b = sin^2(wT) eta^2 (sigma + 1/sigma) + cos^2(wT) (1 + eta^4)
/// whose roots 1/2 (b +- sqrt(b^2 - 4 eta^4)) are the eigenvalues; the
/// eigenvalue product is eta^4 exactly.
struct SpectralReport {
    double b = 0.0;
    double rho = 0.0;                  // larger eigenvalue of A^T A
    double det = 0.0;                  // eigenvalue product = eta^4
    double per_step_w2_factor = 0.0;   // sqrt(rho)
};

SpectralReport spectral_radius(double sigma, double T, double eta);

/// max over the eigenvalue list (or a dense [mu, L] grid with endpoints)
/// of rho(A^T A). This is the one-step operator-norm bound; with partial
/// refreshment and stiff coordinates it can exceed 1 even though the
/// K-step dynamics contracts, so asymptotic_step_factor below is the
/// quantity to use for iteration-count predictions at eta near 1.
double worst_case_rate(std::span<const double> eigenvalues, double T, double eta);
double worst_case_rate(double mu, double L, double T, double eta, int grid_points = 10000);

/// Largest eigenvalue modulus of A(sigma): the Gelfand limit of
/// |A^k|^(1/k), i.e. the realized per-step decay of a long coupled run.
double asymptotic_step_factor(double sigma, double T, double eta);
double asymptotic_step_factor(double mu, double L, double T, double eta, int grid_points = 10000);

/// E[cos^2(sqrt(sigma) T)] for T ~ Exp(mean lambda), closed form
/// 1 - 2 lambda^2 sigma / (1 + 4 lambda^2 sigma).
double expected_cos2(double sigma, double lambda);

/// max over sigma in {mu, L} of (1/(lambda sigma) + 4 lambda) log(1/eps):
/// expected total integration time for randomized durations to reach the
/// predicted W2 target. Minimized at lambda = 1/(2 sqrt(mu)).
double rhmc_expected_time(double mu, double L, double lambda, double eps);

/// K integration durations T_k = pi / (2 sqrt(r_k)) built on the Chebyshev
/// nodes r_k = (L+mu)/2 - (L-mu)/2 cos((k-1/2) pi / K) of [mu, L], so the
/// worst-case cosine product over the spectrum is annihilated at the nodes.
std::vector<double> chebyshev_schedule(double mu, double L, int K);

/// max over eigenvalues (or a dense grid) of |prod_k cos(sqrt(sigma) T_k)|.
double chebyshev_contraction(const Spectrum& s, int K);
double chebyshev_contraction(double mu, double L, int K, int grid_points = 10000);

/// lambda^-1 (1 - eta^2): the effective momentum-damage rate.
double dissipation(double lambda_inv, double eta);

/// Map sigma -> lambda^-1(sigma); constant for a single global clock.
using RateFn = std::function<double(double)>;

inline RateFn constant_rate(double lambda_inv) {
    return [lambda_inv](double) { return lambda_inv; };
}
/// Per-coordinate clocks lambda^-1(sigma) = sigma / sqrt(mu).
inline RateFn coordinate_rates(double mu) {
    return [mu](double sigma) { return sigma / std::sqrt(mu); };
}

/// The quadratic form tracked by the coupled-process certificate.
/// Identity:          V = a |x|^2 + 2 b x.v + c |v|^2
/// SpectrumWeighted:  V = a x.Sigma x + 2 b x.v + c |v|^2
/// The weighted form is what makes sigma-proportional refresh rates
/// certifiable; with the identity form the determinant condition fails at
/// the stiff end for any constants once the rate grows linearly in sigma.
enum class CertForm { Identity, SpectrumWeighted };

struct LyapunovCertificate {
    double a = 0.0, b = 0.0, c = 0.0;
    double r = 0.0;     // certified contraction rate (1/time)
    double eta = 0.0;
    RateFn rates;       // sigma -> lambda^-1(sigma)
    CertForm form = CertForm::Identity;
};

struct CertCheck {
    bool feasible = false;
    double margin = 0.0;  // min normalized slack over the sigma grid
};

/// Checks the positive-definiteness and the three S - 2rA >= 0 conditions
/// over a dense sigma grid of [mu, L] (endpoints included).
CertCheck check_certificate(double mu, double L, const LyapunovCertificate& cert,
                            int grid_points = 1000);

struct CertSearchOptions {
    double r_hi = 2.0;        // upper bisection bound for r / sqrt(mu)
    int bisect_iters = 40;
    int coarse_grid = 40;     // (a, c) log-grid per side
    int refine_rounds = 3;
    int refine_grid = 24;
    int sigma_grid = 201;     // inner feasibility grid
    int final_grid = 1001;    // verification grid
};

/// Maximizes r by bisection with an inner grid/refinement search over
/// (a, c) at the fixed scale b = sqrt(mu) (certificates are ray-invariant).
/// Deterministic; returns an r = 0 certificate when nothing better exists.
LyapunovCertificate search_certificate(double mu, double L, double eta, RateFn rates,
                                       CertForm form = CertForm::Identity,
                                       const CertSearchOptions& opt = {});

}  // namespace hmclab
