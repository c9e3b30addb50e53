#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ssw/dft.hpp"

namespace ssw {

// Scalar quadratic symbol m(eta, sigma) = lambda mu / (2 pi) int W (psi_lambda(eta) . e_j)(psi_mu(sigma) . e_k) dx,
// so that int W f_j g_k dx = sum_{lambda, mu} int int f~_lambda(eta) g~_mu(sigma) m dEta dSigma.
struct SymbolSample {
  double eta = 0.0, sigma = 0.0;
  cplx value = 0.0;
  double bound_envelope = 0.0;  // sum_pm <eta pm sigma>^{-2}
};

struct SymbolIndex {
  int j = 1, k = 1;          // components (1 or 2)
  int lambda = 1, mu = 1;    // +1 or -1
};

SymbolSample quadratic_symbol(const RVec& W, const PotentialSet& pot, double omega, double eta, double sigma,
                              const SymbolIndex& idx, const JostOptions& opt = {});
// Symbol on all node pairs of a basis: rows eta_a, columns sigma_b.
Eigen::MatrixXcd quadratic_symbol_matrix(const RVec& W, const EigenBasis& basis, const SymbolIndex& idx);

// Sign choices of the cubic phase with lambda = -mu = nu = rho and p = alpha xi - beta eta - gamma sigma - delta zeta.
struct PhaseSigns {
  int alpha = 1, beta = 1, gamma = 1, delta = 1, rho = 1;
};

// rho (xi^2 - eta^2 + sigma^2 - zeta^2) with zeta eliminated through p.
double cubic_phase(const PhaseSigns& s, double xi, double eta, double sigma, double p);
std::array<double, 3> stationary_point(const PhaseSigns& s, double xi, double p);  // (eta, sigma, zeta)
Eigen::Matrix2d phase_hessian(const PhaseSigns& s);
int matrix_signature(const Eigen::Matrix2d& m);

enum class SingularKind { delta, principal_value };

struct StationaryPhaseOptions {
  double support = 10.0;   // |g_j(x)| negligible for |x - center| > support
  double center = 0.0;
  double a_step = 0.02;    // Filon panel half-width along A
  int b_nodes = 400;       // nodes along the rescaled B = b / t
  double b_max = 12.0;
  double edge_tol = 1e-10; // relative size of the B-integrand allowed at the cut
  double p_step = 0.05;    // node spacing of H(c) for the principal-value integral
};

struct StationaryPhaseResult {
  cplx numeric = 0.0;
  cplx predicted = 0.0;
  double error = 0.0;  // |numeric - predicted| * t
};

using Profile = std::function<cplx(double)>;

// I_delta or I_pv for F = g1(eta) g2(sigma) g3(zeta), computed in the (A, B) normal form
// e^{-i t Phi} = e^{-i rho t (2 alpha xi p - p^2)} e^{2 i rho t A B}; phi is the unit Gaussian density.
StationaryPhaseResult stationary_phase_check(const Profile& g1, const Profile& g2, const Profile& g3, double t,
                                             double xi, const PhaseSigns& signs, SingularKind kind,
                                             const StationaryPhaseOptions& opt = {});

// H(c) = int int e^{2 i rho t A B} g1(beta(c - B)) g2(gamma(B - A - c)) g3(delta(A + c)) dA dB, c = alpha xi - p.
cplx normal_form_integral(const Profile& g1, const Profile& g2, const Profile& g3, double t, double c,
                          const PhaseSigns& signs, const StationaryPhaseOptions& opt = {});

// Filon-Simpson rule for int f(x) e^{i w x} dx on a uniform grid with an even number of panels.
cplx filon(const std::vector<cplx>& f, double x0, double h, double w);

// 1 + r(0) and s(0): the sums a^lambda_+ + a^lambda_- of the singular coefficients as xi -> 0+ and 0-.
struct SingularCancellation {
  std::array<cplx, 4> sums{};  // (lambda = +, 0+), (lambda = -, 0+), (lambda = +, 0-), (lambda = -, 0-)
  double max_abs = 0.0;
};
SingularCancellation singular_cancellation(const PotentialSet& pot, double omega);

// Finite-difference check of i d/dt f~ = (L / 2t) |f~|^2 f~ between consecutive snapshots.
struct OdeResidual {
  std::vector<double> xi;
  std::vector<double> residual;   // sum_k |D_k - P_k| per xi
  std::vector<double> predicted;  // sum_k |P_k| per xi (phase drift of the ODE)
  std::vector<double> observed;   // sum_k |D_k| per xi
  double ratio = 0.0;             // band total residual / band total predicted
};
OdeResidual asymptotic_ode_residual(const std::vector<double>& times, const std::vector<DistortedSpectrum>& spectra,
                                    double L, double t0, double t1, double band_lo = 0.3, double band_hi = 3.0);

}  // namespace ssw
