#include "hmclab/model.hpp"

#include <algorithm>
#include <cmath>

namespace hmclab {

Spectrum Spectrum::from_eigenvalues(std::vector<double> eigs) {
    if (eigs.empty()) throw std::invalid_argument("spectrum: no eigenvalues");
    std::sort(eigs.begin(), eigs.end());
    if (eigs.front() <= 0.0) throw std::invalid_argument("spectrum: eigenvalues must be positive");
    Spectrum s;
    s.mu = eigs.front();
    s.L = eigs.back();
    s.sigma = std::move(eigs);
    return s;
}

Spectrum Spectrum::linspaced(int d, double mu, double L) {
    if (d < 1 || mu <= 0.0 || L < mu) throw std::invalid_argument("spectrum: need d>=1, 0<mu<=L");
    std::vector<double> e(d);
    for (int i = 0; i < d; ++i) {
        e[i] = d == 1 ? mu : mu + (L - mu) * static_cast<double>(i) / (d - 1);
    }
    if (d == 1 && L != mu) throw std::invalid_argument("spectrum: d=1 requires mu==L");
    Spectrum s;
    s.sigma = std::move(e);
    s.mu = mu;
    s.L = L;
    return s;
}

Spectrum Spectrum::logspaced(int d, double mu, double L) {
    if (d < 1 || mu <= 0.0 || L < mu) throw std::invalid_argument("spectrum: need d>=1, 0<mu<=L");
    if (d == 1 && L != mu) throw std::invalid_argument("spectrum: d=1 requires mu==L");
    std::vector<double> e(d);
    for (int i = 0; i < d; ++i) {
        double t = d == 1 ? 0.0 : static_cast<double>(i) / (d - 1);
        e[i] = mu * std::pow(L / mu, t);
    }
    Spectrum s;
    s.sigma = std::move(e);
    s.mu = mu;
    s.L = L;
    return s;
}

Target Target::perturbed(Spectrum s, double eps) {
    if (eps < 0.0) throw std::invalid_argument("target: eps must be nonnegative");
    return {TargetKind::PerturbedQuadratic, std::move(s), eps};
}

PhaseState::PhaseState(std::vector<double> x_, std::vector<double> v_)
    : x(std::move(x_)), v(std::move(v_)) {
    if (x.size() != v.size()) throw std::invalid_argument("phase state: dim(x) != dim(v)");
}

namespace {
// log cosh without overflow for large |x|.
double log_cosh(double x) {
    double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453;
}
}  // namespace

double potential(const Target& t, std::span<const double> x) {
    if (static_cast<int>(x.size()) != t.dim()) throw std::invalid_argument("potential: dimension mismatch");
    double f = 0.0;
    for (int i = 0; i < t.dim(); ++i) {
        f += 0.5 * t.spectrum.sigma[i] * x[i] * x[i];
        if (t.kind == TargetKind::PerturbedQuadratic) f += t.eps * log_cosh(x[i]);
    }
    return f;
}

void gradient_into(const Target& t, std::span<const double> x, std::span<double> g) {
    if (x.size() != g.size() || static_cast<int>(x.size()) != t.dim()) {
        throw std::invalid_argument("gradient: dimension mismatch");
    }
    for (int i = 0; i < t.dim(); ++i) {
        g[i] = t.spectrum.sigma[i] * x[i];
        if (t.kind == TargetKind::PerturbedQuadratic) g[i] += t.eps * std::tanh(x[i]);
    }
}

std::vector<double> gradient(const Target& t, std::span<const double> x) {
    std::vector<double> g(x.size());
    gradient_into(t, x, g);
    return g;
}

double energy(const Target& t, const PhaseState& s) {
    double k = 0.0;
    for (double vi : s.v) k += 0.5 * vi * vi;
    return potential(t, s.x) + k;
}

double hessian_diag(const Target& t, int i, double xi) {
    double h = t.spectrum.sigma[i];
    if (t.kind == TargetKind::PerturbedQuadratic) {
        double c = std::cosh(xi);
        h += t.eps / (c * c);
    }
    return h;
}

}  // namespace hmclab
