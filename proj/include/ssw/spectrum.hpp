#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "ssw/profiles.hpp"

namespace ssw {

// Two-component state U = (u1, u2); real-representing when u2 = conj(u1).
struct VectorState {
  CVec u1, u2;

  VectorState() = default;
  VectorState(CVec a, CVec b) : u1(std::move(a)), u2(std::move(b)) {}
  static VectorState zero(int n) { return {CVec::Zero(n), CVec::Zero(n)}; }
  static VectorState from_scalar(const CVec& u) { return {u, u.conjugate()}; }
  // Lifts a real profile pair (a, b) to complex components.
  static VectorState real(const RVec& a, const RVec& b);

  int size() const { return static_cast<int>(u1.size()); }
  bool is_real_representing(double tol = 1e-12) const;
  VectorState sigma1() const { return {u2, u1}; }
  VectorState sigma3() const { return {u1, -u2}; }
  VectorState conj() const { return {u1.conjugate(), u2.conjugate()}; }

  VectorState& operator+=(const VectorState& o);
  VectorState& operator-=(const VectorState& o);
  VectorState& operator*=(cplx a);
  friend VectorState operator+(VectorState a, const VectorState& b) { return a += b; }
  friend VectorState operator-(VectorState a, const VectorState& b) { return a -= b; }
  friend VectorState operator*(cplx a, VectorState b) { return b *= a; }
};

// <f, g> = int f1 conj(g1) + f2 conj(g2) dx.
cplx inner(const VectorState& f, const VectorState& g, const Grid1D& grid);
double norm(const VectorState& f, const Grid1D& grid);

// H = [[-d^2 + omega + V1, V2], [-V2, -(-d^2 + omega + V1)]] with 4th-order differences.
struct DiscretizedOperator {
  double omega = 0.0;
  Grid1D grid;
  PotentialSet potentials;

  VectorState apply(const VectorState& u) const;
};

DiscretizedOperator assemble_operator(const PotentialSet& pot, double omega, const Grid1D& grid);

struct KernelBasis {
  std::array<VectorState, 4> xi;  // (Phi,-Phi), (dPhi/domega, same), (Phi', Phi'), (x Phi, -x Phi)
  Eigen::Matrix4d m0;             // m0(j,k) = <xi_j, sigma3 xi_k>
  Grid1D grid;
  double c_omega = 0.0;
  double mass = 0.0;
};

KernelBasis generalized_kernel(const SolitonProfile& profile, const FieldSpec& spec, const DiscretizedOperator& op);

// Relative residuals of H xi_0 = 0, H xi_1 = -xi_0, H xi_2 = 0, H xi_3 = -2 xi_2.
std::array<double, 4> kernel_residuals(const KernelBasis& kb, const DiscretizedOperator& op);

struct Projection {
  VectorState essential;
  Eigen::Vector4cd a;  // discrete coordinates: state = essential + sum_j a_j xi_j
};

// Removes the generalised-kernel component along sigma3-duality.
Projection project_essential(const VectorState& state, const KernelBasis& kb);
Eigen::Vector4cd kernel_pairings(const VectorState& state, const KernelBasis& kb);

struct ModeOptions {
  double window = 0.0;      // half width of the eigenvalue window; 0 selects 30/sqrt(omega)
  int max_points = 1024;    // points of the windowed discretisation
  double gap_margin = 1e-3; // relative margin delta / omega
  bool check_resonance = true;
};

struct ModeReport {
  std::vector<double> eigenvalues;   // real internal modes in the gap, both signs, ascending
  std::vector<cplx> unstable;        // eigenvalues off the real axis, if any
  bool resonance_flag = false;
  cplx det_D0 = 0.0;
  double min_singular_value_D0 = 0.0;
  bool used_fallback = false;
};

ModeReport discrete_eigenvalues(const DiscretizedOperator& op, const KernelBasis& kb, const ModeOptions& opt = {});

}  // namespace ssw
