#include <gtest/gtest.h>

#include <cmath>

#include "ssw/asymptotics.hpp"
#include "ssw/errors.hpp"
#include "ssw/modulation.hpp"

using namespace ssw;

namespace {

Profile gaussian(double m) {
  return [m](double x) { return cplx(std::exp(-0.5 * (x - m) * (x - m))); };
}

// Closed form of H(c) for g_j = exp(-(x - m_j)^2 / 2): a complex Gaussian integral in (A, B).
cplx normal_form_exact(double t, double c, const PhaseSigns& s, double m1, double m2, double m3) {
  const Eigen::Vector2d u[3] = {{0.0, -s.beta}, {-s.gamma, s.gamma}, {s.delta, 0.0}};
  const double e[3] = {s.beta * c - m1, -s.gamma * c - m2, s.delta * c - m3};
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Zero();
  Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
  double k = 0;
  for (int j = 0; j < 3; ++j) {
    M += (u[j] * u[j].transpose()).cast<cplx>();
    v -= (e[j] * u[j]).cast<cplx>();
    k -= 0.5 * e[j] * e[j];
  }
  M(0, 1) -= cplx(0, 2.0 * s.rho * t);
  M(1, 0) -= cplx(0, 2.0 * s.rho * t);
  const cplx quad = 0.5 * (v.transpose() * M.inverse() * v)(0, 0);
  return 2 * kPi / std::sqrt(M.determinant()) * std::exp(quad + k);
}

std::vector<PhaseSigns> all_signs() {
  std::vector<PhaseSigns> out;
  for (int m = 0; m < 32; ++m)
    out.push_back({m & 1 ? -1 : 1, m & 2 ? -1 : 1, m & 4 ? -1 : 1, m & 8 ? -1 : 1, m & 16 ? -1 : 1});
  return out;
}

struct Family {
  FieldSpec spec;
  double omega;
  Grid1D grid;
  SolitonFrame frame;
  Family(FieldSpec f, double w) : spec(std::move(f)), omega(w), grid(Grid1D::for_omega(w)), frame(make_frame(spec, w, grid)) {}
};

const Family& cq_minus() {
  static const Family f(FieldSpec::cubic_quintic(-1.0), 0.2);
  return f;
}

RVec gaussian_weight(const Grid1D& g, double width) {
  RVec w(g.n);
  for (int i = 0; i < g.n; ++i) w[i] = std::exp(-g.x(i) * g.x(i) / (width * width));
  return w;
}

}  // namespace

TEST(Asymptotics, HessianDeterminantAndSignature) {
  for (const PhaseSigns& s : all_signs()) {
    const Eigen::Matrix2d h = phase_hessian(s);
    EXPECT_EQ(h.determinant(), -4.0);
    EXPECT_EQ(matrix_signature(h), 0);
    // Finite differences of the phase in (eta, sigma) at fixed (xi, p).
    const double xi = 0.7, p = 0.2, d = 1e-3;
    const auto sp = stationary_point(s, xi, p);
    auto f = [&](double a, double b) { return cubic_phase(s, xi, sp[0] + a, sp[1] + b, p); };
    Eigen::Matrix2d fd;
    fd(0, 0) = (f(d, 0) - 2 * f(0, 0) + f(-d, 0)) / (d * d);
    fd(1, 1) = (f(0, d) - 2 * f(0, 0) + f(0, -d)) / (d * d);
    fd(0, 1) = fd(1, 0) = (f(d, d) - f(d, -d) - f(-d, d) + f(-d, -d)) / (4 * d * d);
    EXPECT_LT((fd - h).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR((f(d, 0) - f(-d, 0)) / (2 * d), 0.0, 1e-9);
    EXPECT_NEAR((f(0, d) - f(0, -d)) / (2 * d), 0.0, 1e-9);
    // zeta from the constraint equals the stationary zeta, and the phase there is -2 alpha rho xi p + rho p^2.
    EXPECT_NEAR(s.delta * (s.alpha * xi - s.beta * sp[0] - s.gamma * sp[1] - p), sp[2], 1e-14);
    EXPECT_NEAR(f(0, 0), s.rho * (2 * s.alpha * xi * p - p * p), 1e-14);
  }
}

TEST(Asymptotics, FilonIsExactForQuadratics) {
  const double w = 37.0;
  std::vector<cplx> f;
  const int n = 10;
  const double h = 1.0 / n;
  for (int j = 0; j <= n; ++j) f.push_back(cplx(1.0 + 2.0 * j * h - 3.0 * j * h * j * h, 0.5));
  // int_0^1 (1 + 2x - 3x^2 + i/2) e^{iwx} dx by repeated integration by parts.
  const cplx I(0, 1);
  auto prim = [&](double x) {
    const cplx e = std::exp(I * w * x);
    const cplx p = cplx(1.0 + 2.0 * x - 3.0 * x * x, 0.5), dp = 2.0 - 6.0 * x, ddp = -6.0;
    return e * (p / (I * w) - dp / (I * w * I * w) + ddp / (I * w * I * w * I * w));
  };
  EXPECT_LT(std::abs(filon(f, 0.0, h, w) - (prim(1.0) - prim(0.0))), 1e-13);
  EXPECT_THROW(filon({1.0, 2.0}, 0.0, 0.1, 1.0), QuadratureUnderResolved);
}

TEST(Asymptotics, NormalFormMatchesGaussianClosedForm) {
  const double m1 = 0.3, m2 = -0.2, m3 = 0.5;
  for (const PhaseSigns& s : {PhaseSigns{1, 1, 1, 1, 1}, PhaseSigns{-1, 1, -1, 1, -1}, PhaseSigns{1, -1, 1, -1, 1}})
    for (double t : {3.0, 50.0, 1000.0}) {
      const double c = 0.8;
      const cplx num = normal_form_integral(gaussian(m1), gaussian(m2), gaussian(m3), t, c, s);
      const cplx ref = normal_form_exact(t, c, s, m1, m2, m3);
      EXPECT_LT(std::abs(num - ref), 1e-6 * std::abs(ref)) << "t = " << t;
    }
}

TEST(Asymptotics, DeltaIntegralApproachesStationaryPhase) {
  const Profile g = gaussian(0.0);
  const PhaseSigns s{};
  const StationaryPhaseResult r1 = stationary_phase_check(g, g, g, 100.0, 1.0, s, SingularKind::delta);
  const StationaryPhaseResult r2 = stationary_phase_check(g, g, g, 1000.0, 1.0, s, SingularKind::delta);
  EXPECT_LE(r2.error * std::pow(1000.0, 1.0 / 14), 1.3 * r1.error * std::pow(100.0, 1.0 / 14));
  EXPECT_LT(r2.error, 1e-2);
  EXPECT_NEAR(r2.predicted.real(), kPi / 1000.0 * std::exp(-1.5), 1e-15);
  // Shifted profiles make the sign choices visible in g(alpha beta xi) g(-alpha gamma xi) g(alpha delta xi).
  const Profile a = gaussian(0.4), b = gaussian(-0.3), c = gaussian(0.2);
  for (const PhaseSigns& sg : all_signs()) {
    if (sg.rho < 0 || sg.alpha < 0) continue;
    const StationaryPhaseResult r = stationary_phase_check(a, b, c, 1000.0, 0.8, sg, SingularKind::delta);
    EXPECT_LT(std::abs(r.numeric - r.predicted), 5e-3 * std::abs(r.predicted));
    EXPECT_NEAR(std::abs(r.predicted),
                kPi / 1000.0 * std::abs(a(sg.alpha * sg.beta * 0.8) * b(-sg.alpha * sg.gamma * 0.8) *
                                        c(sg.alpha * sg.delta * 0.8)),
                1e-15);
  }
}

TEST(Asymptotics, ZeroProfileGivesZero) {
  const Profile zero = [](double) { return cplx(0.0); };
  const Profile g = gaussian(0.0);
  for (auto kind : {SingularKind::delta, SingularKind::principal_value}) {
    const StationaryPhaseResult r = stationary_phase_check(zero, g, g, 10.0, 1.0, PhaseSigns{}, kind);
    EXPECT_EQ(r.numeric, cplx(0.0));
    EXPECT_EQ(r.predicted, cplx(0.0));
  }
  EXPECT_THROW(stationary_phase_check(g, g, g, 0.5, 1.0, PhaseSigns{}, SingularKind::delta), QuadratureUnderResolved);
}

TEST(Asymptotics, PrincipalValueAmplitudeAndSign) {
  const Profile g = gaussian(0.0);
  const StationaryPhaseResult r = stationary_phase_check(g, g, g, 1000.0, 1.0, PhaseSigns{}, SingularKind::principal_value);
  EXPECT_LT(std::abs(r.numeric - r.predicted), 0.1 * std::abs(r.predicted));
  EXPECT_NEAR(r.predicted.imag(), -kPi / 1000.0 * std::sqrt(kPi / 2) * std::exp(-1.5), 1e-15);
  // rho -> -rho flips sign(rho alpha xi).
  PhaseSigns flipped;
  flipped.rho = -1;
  const StationaryPhaseResult f =
      stationary_phase_check(g, g, g, 1000.0, 1.0, flipped, SingularKind::principal_value);
  EXPECT_NEAR(std::abs(f.predicted + r.predicted), 0.0, 1e-18);
  EXPECT_LT(std::abs(f.numeric - f.predicted), 0.1 * std::abs(f.predicted));
}

TEST(Asymptotics, NormalFormRejectsTruncatedDomain) {
  const Profile narrow = [](double x) { return cplx(std::exp(-50.0 * x * x)); };
  StationaryPhaseOptions opt;
  opt.b_max = 2.0;
  EXPECT_THROW(normal_form_integral(narrow, narrow, narrow, 10.0, 0.0, PhaseSigns{}, opt), QuadratureUnderResolved);
}

TEST(Asymptotics, QuadraticSymbolOfZeroWeight) {
  const Family& fam = cq_minus();
  const SymbolSample s = quadratic_symbol(RVec::Zero(fam.grid.n), fam.frame.potentials, fam.omega, 0.5, 1.0, {});
  EXPECT_EQ(s.value, cplx(0.0));
  EXPECT_THROW(quadratic_symbol(RVec::Ones(fam.grid.n), fam.frame.potentials, fam.omega, 0.5, 1.0, {}), ConfigParse);
}

TEST(Asymptotics, QuadraticSymbolVanishesAtZeroFrequency) {
  const Family& fam = cq_minus();
  const RVec W = gaussian_weight(fam.grid, 3.0);
  for (const SymbolIndex idx : {SymbolIndex{1, 1, 1, 1}, SymbolIndex{1, 2, 1, -1}, SymbolIndex{2, 2, -1, -1}}) {
    double sup = 0;
    for (double eta : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0})
      sup = std::max(sup, std::abs(quadratic_symbol(W, fam.frame.potentials, fam.omega, eta, 0.7, idx).value));
    const cplx near_zero = quadratic_symbol(W, fam.frame.potentials, fam.omega, 1e-4, 0.7, idx).value;
    EXPECT_LT(std::abs(near_zero), 1e-3 * sup);
  }
}

TEST(Asymptotics, QuadraticSymbolDecayLaw) {
  const Family& fam = cq_minus();
  const RVec W = gaussian_weight(fam.grid, 2.0);
  const SymbolIndex idx{1, 2, 1, 1};
  // |eta - sigma| = 2 calibrates C; |eta - sigma| = 10 must respect C / <eta - sigma>^2.
  const SymbolSample near = quadratic_symbol(W, fam.frame.potentials, fam.omega, 3.0, 1.0, idx);
  const SymbolSample far = quadratic_symbol(W, fam.frame.potentials, fam.omega, 11.0, 1.0, idx);
  const double C = std::abs(near.value) / near.bound_envelope;
  EXPECT_GT(C, 0.0);
  EXPECT_LE(std::abs(far.value), C * far.bound_envelope);
}

TEST(Asymptotics, QuadraticSymbolRepresentsPairing) {
  const Family& fam = cq_minus();
  const Grid1D& g = fam.grid;
  const EigenBasis basis = build_eigenbasis(fam.frame.potentials, fam.omega, dft_grid(2 * g.x_max, 6.0));
  VectorState f = VectorState::zero(g.n), h = VectorState::zero(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    f.u1[i] = std::exp(-x * x / 4) * cplx(1.0, 0.2 * x);
    h.u1[i] = std::exp(-(x - 1) * (x - 1) / 6) * cplx(0.3, -0.5);
  }
  f.u2 = f.u1.conjugate();
  h.u2 = h.u1.conjugate();
  f = project_essential(f, fam.frame.kernel).essential;
  h = project_essential(h, fam.frame.kernel).essential;
  const RVec W = gaussian_weight(g, 3.0);
  const DistortedSpectrum ft = forward_transform(f, basis), ht = forward_transform(h, basis);
  Eigen::VectorXd w(basis.size());
  for (int k = 0; k < basis.size(); ++k) w[k] = basis.xi.weights[k];
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k) {
      const CVec& fj = j == 1 ? f.u1 : f.u2;
      const CVec& hk = k == 1 ? h.u1 : h.u2;
      cplx direct = 0;
      for (int i = 0; i < g.n; ++i) direct += W[i] * fj[i] * hk[i] * g.dx;
      cplx via = 0;
      for (int lam : {1, -1})
        for (int mu : {1, -1}) {
          const Eigen::MatrixXcd m = quadratic_symbol_matrix(W, basis, {j, k, lam, mu});
          const CVec a = (lam > 0 ? ft.f_plus : ft.f_minus).cwiseProduct(w.cast<cplx>());
          const CVec b = (mu > 0 ? ht.f_plus : ht.f_minus).cwiseProduct(w.cast<cplx>());
          via += (a.transpose() * m * b)(0, 0);
        }
      EXPECT_LT(std::abs(via - direct), 1e-5 * std::abs(direct)) << j << k;
    }
}

TEST(Asymptotics, SingularCoefficientCancellation) {
  const Family& fam = cq_minus();
  const SingularCancellation c = singular_cancellation(fam.frame.potentials, fam.omega);
  EXPECT_LT(c.max_abs, 1e-3);
  EXPECT_LT(std::abs(c.sums[1]), 1e-3);  // 1 + r(0+) in the non-resonant case
}

TEST(Asymptotics, OdeResidualOnExactAndLinearProfiles) {
  const double L = 2.0;
  std::vector<double> times;
  std::vector<DistortedSpectrum> exact, frozen;
  for (double t = 100; t <= 2000; t *= 1.1) {
    DistortedSpectrum s;
    s.f_plus.resize(21);
    s.f_minus = CVec::Zero(21);
    for (int j = 0; j < 21; ++j) {
      const double xi = -3.0 + 0.3 * j;
      const double a = 0.4 * std::exp(-xi * xi / 8);
      s.xi.push_back(xi);
      s.weights.push_back(0.3);
      s.f_plus[j] = std::polar(a, -0.5 * L * a * a * std::log(t));
    }
    times.push_back(t);
    exact.push_back(s);
    for (int j = 0; j < 21; ++j) s.f_plus[j] = std::abs(s.f_plus[j]);
    frozen.push_back(s);
  }
  const OdeResidual r = asymptotic_ode_residual(times, exact, L, 100, 2000);
  EXPECT_LT(r.ratio, 1e-3);
  const OdeResidual lin = asymptotic_ode_residual(times, frozen, L, 100, 2000);
  EXPECT_NEAR(lin.ratio, 1.0, 1e-12);
  for (double o : lin.observed) EXPECT_LT(o, 1e-14);
}
