#pragma once

#include "hmclab/mat2.hpp"
#include "hmclab/model.hpp"

namespace hmclab {

/// Per-coordinate linear maps of one damped-HMC iteration
/// y+ = A y + B G with G standard normal.
///
/// A = [[cos(wT),       eta sin(wT)/w ],      w = sqrt(sigma)
///      [-eta w sin(wT), eta^2 cos(wT)]]
/// B = sqrt(1-eta^2) [[sin(wT)/w, 0], [eta cos(wT), 1]]
///
/// det(A) = eta^2 exactly, and A Pi A^T + B B^T = Pi for
/// Pi = diag(1/sigma, 1), so the stationary Gaussian is preserved.
struct TransitionBlock {
    Mat2 A;
    Mat2 B;
    double sigma = 0.0;
    double T = 0.0;
    double eta = 0.0;
};

TransitionBlock transition_block(double sigma, double T, double eta);

/// Exact Hamiltonian flow of the quadratic target for time t: each
/// coordinate rotates in phase space at frequency sqrt(sigma_i).
PhaseState exact_flow(const Spectrum& s, const PhaseState& y, double t);
void exact_flow_inplace(const Spectrum& s, std::span<double> x, std::span<double> v, double t);

/// Flow map restricted to a single coordinate.
void exact_flow_coord(double sigma, double& x, double& v, double t);

}  // namespace hmclab
