#include "hmclab/flow.hpp"

#include <cmath>

namespace hmclab {

TransitionBlock transition_block(double sigma, double T, double eta) {
    if (sigma <= 0.0) throw std::invalid_argument("transition_block: sigma must be positive");
    if (T <= 0.0) throw std::invalid_argument("transition_block: T must be positive");
    if (eta < 0.0 || eta >= 1.0) throw std::invalid_argument("transition_block: eta outside [0,1)");
    const double w = std::sqrt(sigma);
    const double c = std::cos(w * T), s = std::sin(w * T);
    const double q = std::sqrt(1.0 - eta * eta);
    TransitionBlock b;
    b.A = {c, eta * s / w, -eta * w * s, eta * eta * c};
    b.B = {q * s / w, 0.0, q * eta * c, q};
    b.sigma = sigma;
    b.T = T;
    b.eta = eta;
    return b;
}

void exact_flow_coord(double sigma, double& x, double& v, double t) {
    const double w = std::sqrt(sigma);
    const double c = std::cos(w * t), s = std::sin(w * t);
    const double x0 = x, v0 = v;
    x = c * x0 + s * v0 / w;
    v = -w * s * x0 + c * v0;
}

void exact_flow_inplace(const Spectrum& s, std::span<double> x, std::span<double> v, double t) {
    if (t < 0.0) throw std::invalid_argument("exact_flow: t must be nonnegative");
    if (static_cast<int>(x.size()) != s.dim() || x.size() != v.size()) {
        throw std::invalid_argument("exact_flow: dimension mismatch");
    }
    for (int i = 0; i < s.dim(); ++i) {
        exact_flow_coord(s.sigma[i], x[i], v[i], t);
    }
}

PhaseState exact_flow(const Spectrum& s, const PhaseState& y, double t) {
    PhaseState out = y;
    exact_flow_inplace(s, out.x, out.v, t);
    return out;
}

}  // namespace hmclab
