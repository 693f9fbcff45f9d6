#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace hmclab {

/// Eigenvalues of the quadratic potential together with the bounds
/// mu <= sigma_i <= L used throughout the rate analysis.
struct Spectrum {
    std::vector<double> sigma;  // ascending
    double mu = 0.0;
    double L = 0.0;

    int dim() const { return static_cast<int>(sigma.size()); }
    double kappa() const { return L / mu; }

    /// Bounds are taken from the extreme eigenvalues.
    static Spectrum from_eigenvalues(std::vector<double> eigs);
    /// d eigenvalues equally spaced on [mu, L].
    static Spectrum linspaced(int d, double mu, double L);
    /// d eigenvalues geometrically spaced on [mu, L].
    static Spectrum logspaced(int d, double mu, double L);
};

enum class TargetKind { Quadratic, PerturbedQuadratic };

/// Diagonal quadratic target f(x) = 1/2 sum sigma_i x_i^2, optionally
/// perturbed by eps * sum log cosh(x_i). The perturbation has analytic
/// curvature in [0, eps], so the strong convexity bound stays mu and the
/// smoothness bound becomes L + eps.
///
/// Targets are immutable after construction and safe to share across
/// concurrently running chains. General SPD covariances reduce to this
/// diagonal form by rotating coordinates into the Hessian eigenbasis;
/// every algorithm here is invariant under that rotation.
struct Target {
    TargetKind kind = TargetKind::Quadratic;
    Spectrum spectrum;
    double eps = 0.0;

    static Target quadratic(Spectrum s) { return {TargetKind::Quadratic, std::move(s), 0.0}; }
    static Target perturbed(Spectrum s, double eps);

    int dim() const { return spectrum.dim(); }
    double strong_convexity() const { return spectrum.mu; }
    double smoothness() const { return spectrum.L + eps; }
    bool is_quadratic() const { return kind == TargetKind::Quadratic; }
};

struct PhaseState {
    std::vector<double> x;
    std::vector<double> v;

    PhaseState() = default;
    PhaseState(std::vector<double> x_, std::vector<double> v_);
    int dim() const { return static_cast<int>(x.size()); }
};

double potential(const Target& t, std::span<const double> x);

/// Writes grad f(x) into g. Exact for both target kinds.
void gradient_into(const Target& t, std::span<const double> x, std::span<double> g);
std::vector<double> gradient(const Target& t, std::span<const double> x);

/// H(x, v) = f(x) + 1/2 |v|^2.
double energy(const Target& t, const PhaseState& s);

/// Diagonal Hessian entry sigma_i + eps * sech^2(x_i).
double hessian_diag(const Target& t, int i, double xi);

}  // namespace hmclab
