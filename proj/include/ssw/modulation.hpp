#pragma once

#include <array>

#include "ssw/spectrum.hpp"

namespace ssw {

// Soliton parameters of v(x) = e^{i(p x - gamma)} (Phi_omega + u)(x + y).
struct ModulationState {
  double gamma = 0.0;
  double p = 0.0;
  double y = 0.0;
  double omega = 0.0;
  std::array<double, 4> residuals{};  // <U, sigma3 Xi_j> / ||Xi_j|| (real or imaginary part, whichever is nonzero)
  double u_norm = 0.0;                // L2 norm of the radiation component u
};

struct ModulationRates {
  double gamma_dot_defect = 0.0;  // omega - p^2 - gamma'
  double omega_dot = 0.0;
  double y_dot_defect = 0.0;      // 2p - y'
  double p_dot = 0.0;
  double condition = 0.0;         // 2-norm condition number of M
  double imaginary_leftover = 0.0;
};

// Soliton data at one frequency: profile, potentials, generalised kernel and its derivatives.
struct SolitonFrame {
  SolitonProfile profile;
  PotentialSet potentials;
  KernelBasis kernel;
  std::array<VectorState, 4> d_omega;  // omega-derivatives of Xi_j
  std::array<VectorState, 4> d_x;      // x-derivatives of Xi_j
};

SolitonFrame make_frame(const FieldSpec& spec, double omega, const Grid1D& grid, const GroundStateOptions& opt = {});

// v(x) = e^{i(p x - gamma)} (Phi_omega + u)(x + y) with translations by spectral phase shift.
CVec synthesize_field(const ModulationState& state, const CVec& u, const FieldSpec& spec, const Grid1D& grid);
// Radiation U = (u, conj u) of v relative to the given parameters and profile.
VectorState radiation(const CVec& v, const ModulationState& state, const SolitonProfile& profile);

// Orthogonality map Theta = (Re, Im, Im, Re) of <U, sigma3 Xi_j> and its Jacobian in (gamma, p, y, omega).
struct OrthogonalityMap {
  Eigen::Vector4d theta;
  Eigen::Matrix4d jacobian;
};
OrthogonalityMap orthogonality_map(const CVec& v, const ModulationState& state, const SolitonFrame& frame);

struct FitOptions {
  int max_iterations = 30;
  double tolerance = 1e-10;  // on |Theta_j| / (||Xi_j|| max(||U||, 1e-4 ||v||))
  GroundStateOptions ground;
};

struct FitResult {
  ModulationState state;
  VectorState U;
  SolitonFrame frame;
  int iterations = 0;
};

// Newton iteration from (0, 0, 0, omega0) or from a supplied initial guess.
FitResult fit_parameters(const CVec& v, double omega0, const FieldSpec& spec, const Grid1D& grid,
                         const FitOptions& opt = {});
FitResult fit_parameters(const CVec& v, const ModulationState& guess, const FieldSpec& spec, const Grid1D& grid,
                         const FitOptions& opt = {});

// Exact nonlinear remainder: N(U) = (N(U1, U2), -N(U2, U1)) with
// N(a, b) = F'((Phi + a)(Phi + b))(Phi + a) - F'(Phi^2) Phi - V+ a - V- b.
VectorState nonlinear_term(const VectorState& U, const SolitonProfile& profile, const FieldSpec& spec,
                           const PotentialSet& potentials);

// M = M0^T + M1(U) in the ordering (omega - p^2 - gamma', -i omega', i(2p - y'), p').
Eigen::Matrix4cd modulation_matrix(const VectorState& U, const SolitonFrame& frame);

ModulationRates modulation_rhs(const ModulationState& state, const VectorState& U, const SolitonFrame& frame,
                               const FieldSpec& spec);

}  // namespace ssw
