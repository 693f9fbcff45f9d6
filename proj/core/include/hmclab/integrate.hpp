#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hmclab/model.hpp"
#include "hmclab/rng.hpp"

namespace hmclab {

enum class IntegratorKind { VelocityVerlet, PositionVerlet, Smc, NestedSmc, SymSmc };

struct IntegratorSpec {
    IntegratorKind kind = IntegratorKind::VelocityVerlet;
    double h = 0.0;
    int steps = 1;
};

/// Verlet kinds are unstable on quadratics once h sqrt(L) >= 2 (the
/// modified spectrum sigma (1 - h^2 sigma / 4) becomes nonpositive), so
/// constructing such a spec against a target bound is a hard error.
IntegratorSpec make_integrator(IntegratorKind kind, double h, int steps, double L);
void validate_integrator(const IntegratorSpec& spec, double L);

/// Gradient oracle: writes grad f(x) into g.
using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

/// One step of each scheme, in-place on (x, v). `scratch` must have the
/// same length as x. The sMC family takes the force evaluation point from
/// an explicit tau in [0, h]; callers that want the randomized method draw
/// tau ~ Unif(0, h) from their own stream.
void velocity_verlet_step(const GradFn& grad, std::span<double> x, std::span<double> v,
                          double h, std::span<double> scratch);
void position_verlet_step(const GradFn& grad, std::span<double> x, std::span<double> v,
                          double h, std::span<double> scratch);
void smc_step(const GradFn& grad, std::span<double> x, std::span<double> v, double h,
              double tau, std::span<double> scratch);
void nested_smc_step(const GradFn& grad, std::span<double> x, std::span<double> v, double h,
                     double tau, std::span<double> scratch);
void sym_smc_step(const GradFn& grad, std::span<double> x, std::span<double> v, double h,
                  double tau, std::span<double> scratch);

/// Target-based variants returning the advanced state.
PhaseState velocity_verlet_step(const Target& t, const PhaseState& s, double h);
PhaseState position_verlet_step(const Target& t, const PhaseState& s, double h);
PhaseState smc_step(const Target& t, const PhaseState& s, double h, double tau);
PhaseState smc_step(const Target& t, const PhaseState& s, double h, RngStream& rng);
PhaseState nested_smc_step(const Target& t, const PhaseState& s, double h, double tau);
PhaseState sym_smc_step(const Target& t, const PhaseState& s, double h, double tau);

/// Advance (x, v) by one step of `spec`, drawing tau for the randomized
/// kinds from `tau_rng`.
void integrator_step(const IntegratorSpec& spec, const GradFn& grad, std::span<double> x,
                     std::span<double> v, RngStream& tau_rng, std::span<double> scratch);

GradFn grad_fn(const Target& t);

/// Modified (shadow) eigenvalue sigma (1 - h^2 sigma / 4) whose quadratic
/// energy 1/2 sigma~ x^2 + 1/2 v^2 velocity Verlet conserves exactly.
/// Throws once h^2 sigma >= 4 (stability boundary).
double modified_spectrum(double sigma, double h);

/// Stepsize sqrt(eps) / (L d)^(1/4) targeting stationary bias eps;
/// requires eps < sqrt(d / L).
double leapfrog_stepsize(double L, int d, double eps);

}  // namespace hmclab
