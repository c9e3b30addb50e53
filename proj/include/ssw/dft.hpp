#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ssw/scattering.hpp"
#include "ssw/spectrum.hpp"

namespace ssw {

// Smooth partition chi_plus + chi_minus = 1 with chi_plus = 0 for x <= -1/2 and 1 for x >= 1/2.
double chi_plus(double x);
inline double chi_minus(double x) { return 1.0 - chi_plus(x); }

// Coefficients of the oscillating part of psi_plus(x, xi) = sum_{eps, alpha} chi_eps(x) a^eps_alpha e^{i alpha x xi}.
struct SingularCoefficients {
  cplx plus_plus, plus_minus, minus_plus, minus_minus;

  static SingularCoefficients at(double xi, cplx s, cplx r);  // s, r evaluated at |xi|
  cplx evaluate(double x, double xi) const;
};

// psi_plus(., xi) on the potential grid for a single frequency.
VectorState generalized_eigenfunction(const PotentialSet& pot, double omega, double xi, const JostOptions& opt = {});

struct EigenBasisOptions {
  double window = 0.0;  // half width of the stored regular part; 0 selects 28 / sqrt(2 omega)
  JostOptions jost;
};

struct EigenBasis {
  double omega = 0.0;
  Grid1D grid;
  XiGrid xi;
  std::vector<cplx> s, r;  // at |xi| for every node
  std::vector<SingularCoefficients> coef;
  int reg_first = 0;       // grid index of the first regular-part row
  Eigen::MatrixXcd reg1, reg2;  // regular part of psi_plus, rows: window points, columns: xi nodes
  double regular_edge = 0.0;    // max |regular part| on the window edges

  int size() const { return xi.size(); }
  int window_size() const { return static_cast<int>(reg1.rows()); }
  VectorState singular_part(int k) const;
  VectorState regular_part(int k) const;
  VectorState psi_plus(int k) const;
  VectorState psi_minus(int k) const { return psi_plus(k).sigma1(); }
};

EigenBasis build_eigenbasis(const PotentialSet& pot, double omega, const XiGrid& xi, const EigenBasisOptions& opt = {});

// Cache keyed by a hash of the potentials, omega, grid, frequency nodes and options.
std::uint64_t eigenbasis_key(const PotentialSet& pot, double omega, const XiGrid& xi, const EigenBasisOptions& opt);
void save_eigenbasis(const EigenBasis& b, std::uint64_t key, const std::string& path);
bool load_eigenbasis(EigenBasis& b, std::uint64_t key, const std::string& path);
// Uses $SSW_CACHE_DIR when set, otherwise builds directly.
EigenBasis cached_eigenbasis(const PotentialSet& pot, double omega, const XiGrid& xi, const EigenBasisOptions& opt = {});

struct DistortedSpectrum {
  std::vector<double> xi;
  std::vector<double> weights;
  CVec f_plus, f_minus;
  // One-sided extrapolations to xi = 0 from the left and right nodes.
  std::array<cplx, 2> plus_at_zero{}, minus_at_zero{};

  double l2_norm() const;
  double sup_norm() const;
  void update_zero_values();
};

// f_pm(xi) = (2 pi)^{-1/2} <f, sigma3 psi_pm(., xi)>; the state grid must share dx and the origin with the basis.
DistortedSpectrum forward_transform(const VectorState& state, const Grid1D& state_grid, const EigenBasis& basis);
DistortedSpectrum forward_transform(const VectorState& state, const EigenBasis& basis);
// Pe f = (2 pi)^{-1/2} int (f_plus psi_plus - f_minus psi_minus) dxi on the requested grid.
VectorState inverse_transform(const DistortedSpectrum& spec, const Grid1D& out_grid, const EigenBasis& basis);
VectorState inverse_transform(const DistortedSpectrum& spec, const EigenBasis& basis);

DistortedSpectrum propagate_linear(const DistortedSpectrum& spec, double t, double omega);

double diagonalization_defect(const EigenBasis& basis, const DiscretizedOperator& op,
                              const std::vector<VectorState>& states);

// Uniform midpoint grid with spacing h <= pi / extent so that states supported in |x| < extent are not aliased.
XiGrid dft_grid(double extent, double xi_max);

}  // namespace ssw
