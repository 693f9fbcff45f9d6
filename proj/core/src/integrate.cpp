#include "hmclab/integrate.hpp"

#include <cmath>

namespace hmclab {

void validate_integrator(const IntegratorSpec& spec, double L) {
    if (spec.h <= 0.0) throw std::invalid_argument("integrator: h must be positive");
    if (spec.steps < 1) throw std::invalid_argument("integrator: steps must be positive");
    const bool verlet = spec.kind == IntegratorKind::VelocityVerlet ||
                        spec.kind == IntegratorKind::PositionVerlet;
    if (verlet && spec.h * std::sqrt(L) >= 2.0) {
        throw std::domain_error("integrator: h*sqrt(L) >= 2 is unstable for Verlet kinds");
    }
}

IntegratorSpec make_integrator(IntegratorKind kind, double h, int steps, double L) {
    IntegratorSpec spec{kind, h, steps};
    validate_integrator(spec, L);
    return spec;
}

void velocity_verlet_step(const GradFn& grad, std::span<double> x, std::span<double> v,
                          double h, std::span<double> g) {
    const std::size_t d = x.size();
    grad(x, g);
    for (std::size_t i = 0; i < d; ++i) v[i] -= 0.5 * h * g[i];
    for (std::size_t i = 0; i < d; ++i) x[i] += h * v[i];
    grad(x, g);
    for (std::size_t i = 0; i < d; ++i) v[i] -= 0.5 * h * g[i];
}

void position_verlet_step(const GradFn& grad, std::span<double> x, std::span<double> v,
                          double h, std::span<double> g) {
    const std::size_t d = x.size();
    for (std::size_t i = 0; i < d; ++i) x[i] += 0.5 * h * v[i];
    grad(x, g);
    for (std::size_t i = 0; i < d; ++i) v[i] -= h * g[i];
    for (std::size_t i = 0; i < d; ++i) x[i] += 0.5 * h * v[i];
}

namespace {
void check_tau(double tau, double h) {
    if (tau < 0.0 || tau > h) throw std::invalid_argument("smc: tau outside [0, h]");
}
}  // namespace

void smc_step(const GradFn& grad, std::span<double> x, std::span<double> v, double h,
              double tau, std::span<double> g) {
    check_tau(tau, h);
    const std::size_t d = x.size();
    std::vector<double> xm(d);
    for (std::size_t i = 0; i < d; ++i) xm[i] = x[i] + tau * v[i];
    grad(xm, g);
    for (std::size_t i = 0; i < d; ++i) {
        x[i] += h * v[i] - 0.5 * h * h * g[i];
        v[i] -= h * g[i];
    }
}

void nested_smc_step(const GradFn& grad, std::span<double> x, std::span<double> v, double h,
                     double tau, std::span<double> g) {
    check_tau(tau, h);
    const std::size_t d = x.size();
    std::vector<double> xt(d);
    // x_{tau,1} = x0 + tau v0 - tau^2/2 grad(x0)
    grad(x, g);
    for (std::size_t i = 0; i < d; ++i) xt[i] = x[i] + tau * v[i] - 0.5 * tau * tau * g[i];
    // x_{tau,2} = x0 + tau v0 - tau^2/2 grad(x_{tau,1})
    grad(xt, g);
    for (std::size_t i = 0; i < d; ++i) xt[i] = x[i] + tau * v[i] - 0.5 * tau * tau * g[i];
    grad(xt, g);
    for (std::size_t i = 0; i < d; ++i) {
        x[i] += h * v[i] - h * (h - tau) * g[i];
        v[i] -= h * g[i];
    }
}

void sym_smc_step(const GradFn& grad, std::span<double> x, std::span<double> v, double h,
                  double tau, std::span<double> g) {
    check_tau(tau, h);
    const std::size_t d = x.size();
    std::vector<double> xm(d);
    for (std::size_t i = 0; i < d; ++i) xm[i] = x[i] + tau * v[i];
    grad(xm, g);
    // half kick at the stratified point, full drift
    for (std::size_t i = 0; i < d; ++i) {
        v[i] -= 0.5 * h * g[i];
        x[i] += h * v[i];
    }
    // second half kick mirrors the first: force at x1 - tau v_{1/2}.
    // The quadratic-matrix form of the update fixes this evaluation point;
    // for general targets it is our gradient-form extension of it.
    for (std::size_t i = 0; i < d; ++i) xm[i] = x[i] - tau * v[i];
    grad(xm, g);
    for (std::size_t i = 0; i < d; ++i) v[i] -= 0.5 * h * g[i];
}

GradFn grad_fn(const Target& t) {
    return [&t](std::span<const double> x, std::span<double> g) { gradient_into(t, x, g); };
}

namespace {
PhaseState run_step(const Target& t, const PhaseState& s, double h,
                    void (*step)(const GradFn&, std::span<double>, std::span<double>, double,
                                 std::span<double>)) {
    if (h <= 0.0) throw std::invalid_argument("integrator: h must be positive");
    PhaseState out = s;
    std::vector<double> g(out.x.size());
    step(grad_fn(t), out.x, out.v, h, g);
    return out;
}

PhaseState run_tau_step(const Target& t, const PhaseState& s, double h, double tau,
                        void (*step)(const GradFn&, std::span<double>, std::span<double>, double,
                                     double, std::span<double>)) {
    if (h <= 0.0) throw std::invalid_argument("integrator: h must be positive");
    PhaseState out = s;
    std::vector<double> g(out.x.size());
    step(grad_fn(t), out.x, out.v, h, tau, g);
    return out;
}
}  // namespace

PhaseState velocity_verlet_step(const Target& t, const PhaseState& s, double h) {
    return run_step(t, s, h, &velocity_verlet_step);
}
PhaseState position_verlet_step(const Target& t, const PhaseState& s, double h) {
    return run_step(t, s, h, &position_verlet_step);
}
PhaseState smc_step(const Target& t, const PhaseState& s, double h, double tau) {
    return run_tau_step(t, s, h, tau, &smc_step);
}
PhaseState smc_step(const Target& t, const PhaseState& s, double h, RngStream& rng) {
    return smc_step(t, s, h, rng.uniform(0.0, h));
}
PhaseState nested_smc_step(const Target& t, const PhaseState& s, double h, double tau) {
    return run_tau_step(t, s, h, tau, &nested_smc_step);
}
PhaseState sym_smc_step(const Target& t, const PhaseState& s, double h, double tau) {
    return run_tau_step(t, s, h, tau, &sym_smc_step);
}

void integrator_step(const IntegratorSpec& spec, const GradFn& grad, std::span<double> x,
                     std::span<double> v, RngStream& tau_rng, std::span<double> scratch) {
    switch (spec.kind) {
        case IntegratorKind::VelocityVerlet:
            velocity_verlet_step(grad, x, v, spec.h, scratch);
            break;
        case IntegratorKind::PositionVerlet:
            position_verlet_step(grad, x, v, spec.h, scratch);
            break;
        case IntegratorKind::Smc:
            smc_step(grad, x, v, spec.h, tau_rng.uniform(0.0, spec.h), scratch);
            break;
        case IntegratorKind::NestedSmc:
            nested_smc_step(grad, x, v, spec.h, tau_rng.uniform(0.0, spec.h), scratch);
            break;
        case IntegratorKind::SymSmc:
            sym_smc_step(grad, x, v, spec.h, tau_rng.uniform(0.0, spec.h), scratch);
            break;
    }
}

double modified_spectrum(double sigma, double h) {
    if (sigma <= 0.0) throw std::invalid_argument("modified_spectrum: sigma must be positive");
    if (h * h * sigma >= 4.0) throw std::domain_error("modified_spectrum: h^2 sigma >= 4 (unstable)");
    return sigma * (1.0 - h * h * sigma / 4.0);
}

double leapfrog_stepsize(double L, int d, double eps) {
    if (L <= 0.0 || d < 1 || eps <= 0.0) throw std::invalid_argument("leapfrog_stepsize: bad inputs");
    if (eps >= std::sqrt(static_cast<double>(d) / L)) {
        throw std::domain_error("leapfrog_stepsize: eps >= sqrt(d/L), bias target unachievable");
    }
    return std::sqrt(eps) / std::pow(L * static_cast<double>(d), 0.25);
}

}  // namespace hmclab
