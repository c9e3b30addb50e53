#include "ssw/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "ssw/errors.hpp"
#include "ssw/scattering.hpp"

namespace ssw {

VectorState VectorState::real(const RVec& a, const RVec& b) { return {a.cast<cplx>(), b.cast<cplx>()}; }

bool VectorState::is_real_representing(double tol) const {
  const double scale = std::max(1.0, u1.cwiseAbs().maxCoeff());
  return (u2 - u1.conjugate()).cwiseAbs().maxCoeff() <= tol * scale;
}

VectorState& VectorState::operator+=(const VectorState& o) {
  u1 += o.u1;
  u2 += o.u2;
  return *this;
}

VectorState& VectorState::operator-=(const VectorState& o) {
  u1 -= o.u1;
  u2 -= o.u2;
  return *this;
}

VectorState& VectorState::operator*=(cplx a) {
  u1 *= a;
  u2 *= a;
  return *this;
}

cplx inner(const VectorState& f, const VectorState& g, const Grid1D& grid) {
  return (g.u1.dot(f.u1) + g.u2.dot(f.u2)) * grid.dx;
}

double norm(const VectorState& f, const Grid1D& grid) {
  return std::sqrt((f.u1.squaredNorm() + f.u2.squaredNorm()) * grid.dx);
}

VectorState DiscretizedOperator::apply(const VectorState& u) const {
  const RVec& V1 = potentials.V1;
  const RVec& V2 = potentials.V2;
  const CVec d1 = second_derivative_fd4(u.u1, grid.dx);
  const CVec d2 = second_derivative_fd4(u.u2, grid.dx);
  VectorState out;
  out.u1 = -d1 + ((omega + V1.array()).cast<cplx>() * u.u1.array()).matrix() +
           (V2.cast<cplx>().array() * u.u2.array()).matrix();
  out.u2 = d2 - ((omega + V1.array()).cast<cplx>() * u.u2.array()).matrix() -
           (V2.cast<cplx>().array() * u.u1.array()).matrix();
  return out;
}

DiscretizedOperator assemble_operator(const PotentialSet& pot, double omega, const Grid1D& grid) {
  if (pot.V1.size() != grid.n || pot.V2.size() != grid.n)
    throw ConfigParse("potentials are not sampled on the operator grid");
  return {omega, grid, pot};
}

KernelBasis generalized_kernel(const SolitonProfile& profile, const FieldSpec&, const DiscretizedOperator& op) {
  const Grid1D& g = op.grid;
  if (profile.phi.size() != g.n) throw ConfigParse("profile and operator grids differ");
  KernelBasis kb;
  kb.grid = g;
  const RVec x = g.points();
  const RVec xphi = x.cwiseProduct(profile.phi);
  kb.xi[0] = VectorState::real(profile.phi, -profile.phi);
  kb.xi[1] = VectorState::real(profile.domega_phi, profile.domega_phi);
  kb.xi[2] = VectorState::real(profile.dphi, profile.dphi);
  kb.xi[3] = VectorState::real(xphi, -xphi);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) kb.m0(j, k) = inner(kb.xi[j], kb.xi[k].sigma3(), g).real();
  kb.c_omega = profile.c_omega;
  kb.mass = profile.mass;
  const double scale = std::pow(profile.mass, 4);
  if (std::abs(kb.m0.determinant()) < 1e-10 * scale)
    throw DegenerateKernel("|det M0| = " + std::to_string(std::abs(kb.m0.determinant())) + " (c_omega = " +
                           std::to_string(profile.c_omega) + ")");
  return kb;
}

std::array<double, 4> kernel_residuals(const KernelBasis& kb, const DiscretizedOperator& op) {
  const Grid1D& g = op.grid;
  const VectorState zero = VectorState::zero(g.n);
  const std::array<VectorState, 4> target = {zero, -1.0 * kb.xi[0], zero, -2.0 * kb.xi[2]};
  std::array<double, 4> res{};
  for (int j = 0; j < 4; ++j) res[j] = norm(op.apply(kb.xi[j]) - target[j], g) / norm(kb.xi[j], g);
  return res;
}

Eigen::Vector4cd kernel_pairings(const VectorState& state, const KernelBasis& kb) {
  Eigen::Vector4cd b;
  for (int k = 0; k < 4; ++k) b[k] = inner(state, kb.xi[k].sigma3(), kb.grid);
  return b;
}

Projection project_essential(const VectorState& state, const KernelBasis& kb) {
  Projection p;
  p.a = kb.m0.cast<cplx>().partialPivLu().solve(kernel_pairings(state, kb));
  p.essential = state;
  for (int j = 0; j < 4; ++j) p.essential -= p.a[j] * kb.xi[j];
  return p;
}

namespace {

// Dense -d^2 with the 4th-order stencil and zero extension.
Eigen::MatrixXd laplacian_fd4(int m, double h) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  const double c0 = 2.5 / (h * h), c1 = -4.0 / 3.0 / (h * h), c2 = 1.0 / 12.0 / (h * h);
  for (int i = 0; i < m; ++i) {
    L(i, i) = c0;
    if (i + 1 < m) L(i, i + 1) = L(i + 1, i) = c1;
    if (i + 2 < m) L(i, i + 2) = L(i + 2, i) = c2;
  }
  return L;
}

void collect(ModeReport& rep, cplx lambda, double omega, double delta) {
  if (std::abs(lambda.imag()) > 1e-8 * omega) {
    rep.unstable.push_back(lambda);
    return;
  }
  const double l = lambda.real();
  if (std::abs(l) > delta && std::abs(l) < omega - delta) rep.eigenvalues.push_back(l);
}

}  // namespace

ModeReport discrete_eigenvalues(const DiscretizedOperator& op, const KernelBasis& kb, const ModeOptions& opt) {
  const Grid1D& g = op.grid;
  const double omega = op.omega;
  const double delta = opt.gap_margin * omega;
  const double X = std::min(g.x_max - 2 * g.dx, opt.window > 0 ? opt.window : 30.0 / std::sqrt(omega));
  const int K = static_cast<int>(X / g.dx);
  const int stride = std::max(1, (2 * K + opt.max_points) / opt.max_points);
  const int half = K / stride;
  const int m = 2 * half + 1;
  const double h = stride * g.dx;
  auto idx = [&](int k) { return g.zero_index() + (k - half) * stride; };

  const Eigen::MatrixXd D2 = laplacian_fd4(m, h);
  Eigen::MatrixXd Lp = D2, Lm = D2;
  RVec phi(m), dphi(m);
  for (int k = 0; k < m; ++k) {
    const int i = idx(k);
    Lp(k, k) += omega + op.potentials.V1[i] + op.potentials.V2[i];
    Lm(k, k) += omega + op.potentials.V1[i] - op.potentials.V2[i];
    phi[k] = kb.xi[0].u1[i].real();
    dphi[k] = kb.xi[2].u1[i].real();
  }

  ModeReport rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(Lm);
  if (em.info() != Eigen::Success) throw EigSolverFailure("L- eigen-decomposition failed");
  const RVec lam = em.eigenvalues();
  if (lam.minCoeff() < -1e-3 * omega) {
    // L- not semi-definite: solve the full non-symmetric problem.
    rep.used_fallback = true;
    Eigen::MatrixXd H(2 * m, 2 * m);
    H << Lp + Lm, Lp - Lm, Lm - Lp, -(Lp + Lm);
    H *= 0.5;
    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw EigSolverFailure("dense eigen-solve failed");
    for (int k = 0; k < 2 * m; ++k) collect(rep, es.eigenvalues()[k], omega, delta);
  } else {
    const Eigen::MatrixXd& Q = em.eigenvectors();
    const double cut = 1e-3 * omega;
    RVec sq(m), isq(m);
    for (int k = 0; k < m; ++k) {
      const double v = std::max(lam[k], 0.0);
      sq[k] = std::sqrt(v);
      isq[k] = lam[k] > cut ? 1.0 / std::sqrt(lam[k]) : 0.0;
    }
    const Eigen::MatrixXd R = Q * sq.asDiagonal() * Q.transpose();
    const Eigen::MatrixXd S = R * Lp * R;
    // Kernel directions of S: phi and L-^{-1/2} phi'.
    Eigen::MatrixXd V(m, 2);
    V.col(0) = phi;
    V.col(1) = Q * isq.asDiagonal() * (Q.transpose() * dphi);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    const Eigen::MatrixXd Qfull = qr.householderQ();
    const Eigen::MatrixXd C = Qfull.rightCols(m - 2);
    const Eigen::MatrixXd Sc = C.transpose() * S * C;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sc, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigSolverFailure("reduced eigen-solve failed");
    for (int k = 0; k < m - 2; ++k) {
      const double mu = es.eigenvalues()[k];
      const cplx l = std::sqrt(cplx(mu, 0.0));
      collect(rep, l, omega, delta);
      collect(rep, -l, omega, delta);
    }
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());

  if (opt.check_resonance) {
    const ResonanceReport rr = resonance_test(op.potentials, omega);
    rep.resonance_flag = rr.resonant;
    rep.det_D0 = rr.det_D0_extrapolated;
    rep.min_singular_value_D0 = rr.extrapolated_singular_value;
  }
  return rep;
}

}  // namespace ssw
