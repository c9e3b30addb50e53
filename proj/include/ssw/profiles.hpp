#pragma once

#include "ssw/field.hpp"
#include "ssw/grid.hpp"

namespace ssw {

struct SolitonProfile {
  double omega = 0.0;
  Grid1D grid;
  RVec phi;
  RVec dphi;
  RVec domega_phi;   // first derivative in omega
  RVec domega2_phi;  // second derivative in omega
  double amplitude = 0.0;
  double mass = 0.0;
  double c_omega = 0.0;  // d/d omega of the mass
};

struct PotentialSet {
  Grid1D grid;
  RVec V1, V2;
  RVec Vpp, Vmm, Vpm;
  RVec Vppm, Vpmm, Vppp, Vmmm;
  double L_infinity = 0.0;

  static PotentialSet zero(const Grid1D& grid, double L = 0.0);
  // Linear potentials only; nonlinear ones are zero.
  static PotentialSet linear(const Grid1D& grid, const RVec& V1, const RVec& V2);
};

struct GroundStateOptions {
  double rel_step = 1e-4;  // relative omega step for the omega-derivatives
  double tail_tol = 1e-8;
  double ode_tol = 1e-13;
};

// Squared amplitude of the ground state: smallest positive root of omega = F(z)/z.
double ground_state_amplitude_sq(const FieldSpec& spec, double omega);

// Even positive profile on the grid, no omega-derivative data.
RVec ground_state_samples(const FieldSpec& spec, double omega, const Grid1D& grid, double ode_tol = 1e-13,
                          RVec* dphi = nullptr);

SolitonProfile solve_ground_state(const FieldSpec& spec, double omega, const Grid1D& grid,
                                  const GroundStateOptions& opt = {});

// Residual sup-norm of phi'' - omega phi + F'(phi^2) phi using 4th-order differences.
double ground_state_residual(const SolitonProfile& prof, const FieldSpec& spec);

PotentialSet linearization_potentials(const SolitonProfile& profile, const FieldSpec& spec);
PotentialSet linearization_potentials(const RVec& phi, const Grid1D& grid, const FieldSpec& spec);

}  // namespace ssw
