#include "ssw/asymptotics.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "ssw/errors.hpp"
#include "ssw/parallel.hpp"
#include "ssw/scattering.hpp"

namespace ssw {

namespace {

cplx component(const VectorState& s, int j, int i) { return j == 1 ? s.u1[i] : s.u2[i]; }

VectorState psi(const PotentialSet& pot, double omega, double xi, int sign, const JostOptions& opt) {
  const VectorState plus = generalized_eigenfunction(pot, omega, xi, opt);
  return sign > 0 ? plus : plus.sigma1();
}

double envelope(double eta, double sigma) {
  return 1.0 / (1.0 + (eta + sigma) * (eta + sigma)) + 1.0 / (1.0 + (eta - sigma) * (eta - sigma));
}

void check_tail(const RVec& W) {
  const double peak = W.cwiseAbs().maxCoeff();
  const double edge = std::max(std::abs(W[0]), std::abs(W[W.size() - 1]));
  if (peak > 0 && edge > 1e-10 * peak) throw ConfigParse("weight W does not decay at the grid edges");
}

// Standard normal density: phi^(p) = e^{-p^2/2} / sqrt(2 pi).
double phi_hat(double p) { return std::exp(-0.5 * p * p) / std::sqrt(2.0 * kPi); }

}  // namespace

SymbolSample quadratic_symbol(const RVec& W, const PotentialSet& pot, double omega, double eta, double sigma,
                              const SymbolIndex& idx, const JostOptions& opt) {
  if (W.size() != pot.grid.n) throw ConfigParse("W and potential grids differ");
  check_tail(W);
  SymbolSample out;
  out.eta = eta;
  out.sigma = sigma;
  out.bound_envelope = envelope(eta, sigma);
  if (W.cwiseAbs().maxCoeff() == 0.0) return out;
  const VectorState a = psi(pot, omega, eta, idx.lambda, opt);
  const VectorState b = psi(pot, omega, sigma, idx.mu, opt);
  cplx sum = 0.0;
  for (int i = 0; i < pot.grid.n; ++i) sum += W[i] * component(a, idx.j, i) * component(b, idx.k, i);
  out.value = static_cast<double>(idx.lambda * idx.mu) / (2.0 * kPi) * sum * pot.grid.dx;
  return out;
}

Eigen::MatrixXcd quadratic_symbol_matrix(const RVec& W, const EigenBasis& basis, const SymbolIndex& idx) {
  const int n = basis.grid.n, m = basis.size();
  if (W.size() != n) throw ConfigParse("W and basis grids differ");
  check_tail(W);
  // Rows where W is negligible are dropped.
  const double cut = 1e-17 * W.cwiseAbs().maxCoeff();
  std::vector<int> rows;
  for (int i = 0; i < n; ++i)
    if (std::abs(W[i]) > cut) rows.push_back(i);
  const int r = static_cast<int>(rows.size());
  Eigen::MatrixXcd left(r, m), right(r, m);
  parallel_for(m, [&](int k) {
    const VectorState p = basis.psi_plus(k);
    const VectorState a = idx.lambda > 0 ? p : p.sigma1();
    const VectorState b = idx.mu > 0 ? p : p.sigma1();
    const CVec& ca = idx.j == 1 ? a.u1 : a.u2;
    const CVec& cb = idx.k == 1 ? b.u1 : b.u2;
    for (int i = 0; i < r; ++i) {
      left(i, k) = W[rows[i]] * ca[rows[i]];
      right(i, k) = cb[rows[i]];
    }
  });
  return (static_cast<double>(idx.lambda * idx.mu) * basis.grid.dx / (2.0 * kPi)) * (left.transpose() * right);
}

double cubic_phase(const PhaseSigns& s, double xi, double eta, double sigma, double p) {
  const double zeta = s.delta * (s.alpha * xi - s.beta * eta - s.gamma * sigma - p);
  return s.rho * (xi * xi - eta * eta + sigma * sigma - zeta * zeta);
}

std::array<double, 3> stationary_point(const PhaseSigns& s, double xi, double p) {
  const double c = s.alpha * xi - p;
  return {s.beta * c, -s.gamma * c, s.delta * c};
}

Eigen::Matrix2d phase_hessian(const PhaseSigns& s) {
  Eigen::Matrix2d h;
  h << 2, s.beta * s.gamma, s.beta * s.gamma, 0;
  return -2.0 * s.rho * h;
}

int matrix_signature(const Eigen::Matrix2d& m) {
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues();
  int sig = 0;
  for (int i = 0; i < 2; ++i) sig += ev[i] > 0 ? 1 : (ev[i] < 0 ? -1 : 0);
  return sig;
}

cplx filon(const std::vector<cplx>& f, double x0, double h, double w) {
  const int n = static_cast<int>(f.size()) - 1;
  if (n < 2 || n % 2) throw QuadratureUnderResolved("Filon rule needs an even number of panels");
  const double th = w * h;
  double al, be, ga;
  if (std::abs(th) < 1e-2) {
    const double t2 = th * th;
    al = 2.0 * th * t2 / 45.0;
    be = 2.0 / 3.0 + 2.0 * t2 / 15.0;
    ga = 4.0 / 3.0 - 2.0 * t2 / 15.0;
  } else {
    const double s = std::sin(th), c = std::cos(th), t3 = th * th * th;
    al = (th * th + th * s * c - 2.0 * s * s) / t3;
    be = 2.0 * (th * (1.0 + c * c) - 2.0 * s * c) / t3;
    ga = 4.0 * (s - th * c) / t3;
  }
  const double xn = x0 + n * h;
  cplx ce = 0, co = 0, se = 0, so = 0;
  for (int j = 0; j <= n; ++j) {
    const double x = x0 + j * h;
    const double wt = (j == 0 || j == n) ? 0.5 : 1.0;
    if (j % 2 == 0) {
      ce += wt * f[j] * std::cos(w * x);
      se += wt * f[j] * std::sin(w * x);
    } else {
      co += f[j] * std::cos(w * x);
      so += f[j] * std::sin(w * x);
    }
  }
  const cplx ic = h * (al * (f[n] * std::sin(w * xn) - f[0] * std::sin(w * x0)) + be * ce + ga * co);
  const cplx is = h * (al * (f[0] * std::cos(w * x0) - f[n] * std::cos(w * xn)) + be * se + ga * so);
  return ic + cplx(0, 1) * is;
}

cplx normal_form_integral(const Profile& g1, const Profile& g2, const Profile& g3, double t, double c,
                          const PhaseSigns& s, const StationaryPhaseOptions& opt) {
  if (!(t > 0)) throw QuadratureUnderResolved("time must be positive");
  // zeta = delta (A + c) confines A to the support of g3.
  const double a_lo = s.delta * opt.center - c - opt.support;
  int panels = static_cast<int>(std::ceil(2.0 * opt.support / opt.a_step));
  panels += panels % 2;
  const double h = 2.0 * opt.support / panels;
  std::vector<cplx> g3v(panels + 1);
  for (int i = 0; i <= panels; ++i) g3v[i] = g3(s.delta * (a_lo + i * h + c));

  // B = b / t; the inner integral is a Fourier transform in A at frequency 2 rho b.
  auto inner = [&](double b) {
    const double B = b / t;
    const cplx w1 = g1(s.beta * (c - B));
    std::vector<cplx> f(panels + 1);
    for (int i = 0; i <= panels; ++i) f[i] = w1 * g2(s.gamma * (B - (a_lo + i * h) - c)) * g3v[i];
    return filon(f, a_lo, h, 2.0 * s.rho * b);
  };
  using GL = boost::math::quadrature::gauss<double, 20>;
  const int blocks = std::max(1, opt.b_nodes / 20);
  const double bw = 2.0 * opt.b_max / blocks;
  cplx total = 0;
  double peak = 0;
  for (int k = 0; k < blocks; ++k) {
    const double mid = -opt.b_max + (k + 0.5) * bw;
    total += 0.5 * bw * GL::integrate([&](double u) { return inner(mid + 0.5 * bw * u); }, -1.0, 1.0);
  }
  for (double b : {0.0, 0.5, 1.0}) peak = std::max(peak, std::abs(inner(b)));
  // Floor for nodes where the profiles barely overlap.
  const double scale = std::abs(g1(opt.center) * g2(opt.center) * g3(opt.center)) * opt.support;
  const double edge = std::max(std::abs(inner(opt.b_max)), std::abs(inner(-opt.b_max)));
  if (edge > opt.edge_tol * std::max(peak, scale) && peak > 0)
    throw QuadratureUnderResolved("normal-form integrand not decayed at |b| = " + std::to_string(opt.b_max));
  return total / t;
}

StationaryPhaseResult stationary_phase_check(const Profile& g1, const Profile& g2, const Profile& g3, double t,
                                             double xi, const PhaseSigns& s, SingularKind kind,
                                             const StationaryPhaseOptions& opt) {
  if (t < 1.0) throw QuadratureUnderResolved("stationary phase check requires t >= 1");
  StationaryPhaseResult r;
  const auto sp = stationary_point(s, xi, 0.0);
  const cplx product = g1(sp[0]) * g2(sp[1]) * g3(sp[2]);
  const double c0 = s.alpha * xi;
  if (kind == SingularKind::delta) {
    r.numeric = normal_form_integral(g1, g2, g3, t, c0, s, opt);
    r.predicted = kPi / t * product;
  } else {
    // p.v. int phi^(p)/p e^{-i rho t (2 alpha xi p - p^2)} H(alpha xi - p) dp with H splined in c.
    const double p_max = 8.5;
    const int nodes = static_cast<int>(std::ceil(2 * p_max / opt.p_step)) + 1;
    const double step = 2 * p_max / (nodes - 1);
    std::vector<double> re(nodes), im(nodes);
    parallel_for(nodes, [&](int i) {
      const cplx h = normal_form_integral(g1, g2, g3, t, c0 - p_max + i * step, s, opt);
      re[i] = h.real();
      im[i] = h.imag();
    });
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    const Spline sre(re.begin(), re.end(), c0 - p_max, step), sim(im.begin(), im.end(), c0 - p_max, step);
    auto q = [&](double p) {
      const cplx h(sre(c0 - p), sim(c0 - p));
      return phi_hat(p) * std::polar(1.0, -s.rho * t * (2 * s.alpha * xi * p - p * p)) * h;
    };
    using GL = boost::math::quadrature::gauss<double, 20>;
    const double osc = t * (p_max * p_max + 2 * std::abs(xi) * p_max) / (2 * kPi);
    const int blocks = static_cast<int>(std::ceil(std::max(osc, 50.0)));
    const double bw = p_max / blocks;
    cplx total = 0;
    for (int k = 0; k < blocks; ++k) {
      const double mid = (k + 0.5) * bw;
      total += 0.5 * bw * GL::integrate(
                              [&](double u) {
                                const double p = mid + 0.5 * bw * u;
                                return (q(p) - q(-p)) / p;
                              },
                              -1.0, 1.0);
    }
    r.numeric = total;
    const double sgn = (s.rho * s.alpha * xi > 0) ? 1.0 : (s.rho * s.alpha * xi < 0 ? -1.0 : 0.0);
    r.predicted = -kPi / t * cplx(0, std::sqrt(kPi / 2)) * product * sgn;
  }
  r.error = std::abs(r.numeric - r.predicted) * t;
  return r;
}

SingularCancellation singular_cancellation(const PotentialSet& pot, double omega) {
  const EdgeLimits lim = edge_limits(pot, omega);
  SingularCancellation out;
  const SingularCoefficients right = SingularCoefficients::at(1.0, lim.s0, lim.r0);
  const SingularCoefficients left = SingularCoefficients::at(-1.0, lim.s0, lim.r0);
  out.sums = {right.plus_plus + right.plus_minus, right.minus_plus + right.minus_minus,
              left.plus_plus + left.plus_minus, left.minus_plus + left.minus_minus};
  for (const cplx& v : out.sums) out.max_abs = std::max(out.max_abs, std::abs(v));
  return out;
}

OdeResidual asymptotic_ode_residual(const std::vector<double>& times, const std::vector<DistortedSpectrum>& spectra,
                                    double L, double t0, double t1, double band_lo, double band_hi) {
  if (times.size() != spectra.size()) throw ConfigParse("spectra and times differ");
  std::vector<int> snaps;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= t0 && times[k] <= t1 && times[k] > 0) snaps.push_back(static_cast<int>(k));
  if (snaps.size() < 2) throw WindowTooShort("ODE residual needs at least 2 snapshots");
  OdeResidual out;
  double tot_res = 0, tot_pred = 0;
  const DistortedSpectrum& ref = spectra[snaps.front()];
  for (std::size_t j = 0; j < ref.xi.size(); ++j) {
    const double axi = std::abs(ref.xi[j]);
    if (axi < band_lo || axi > band_hi) continue;
    double res = 0, pred = 0, obs = 0;
    for (std::size_t q = 0; q + 1 < snaps.size(); ++q) {
      const cplx a = spectra[snaps[q]].f_plus[j], b = spectra[snaps[q + 1]].f_plus[j];
      const cplx mid = 0.5 * (a + b);
      const cplx P = cplx(0, -0.5 * L) * std::norm(mid) * mid * std::log(times[snaps[q + 1]] / times[snaps[q]]);
      const cplx D = b - a;
      res += std::abs(D - P);
      pred += std::abs(P);
      obs += std::abs(D);
    }
    out.xi.push_back(ref.xi[j]);
    out.residual.push_back(res);
    out.predicted.push_back(pred);
    out.observed.push_back(obs);
    tot_res += res;
    tot_pred += pred;
  }
  out.ratio = tot_pred > 0 ? tot_res / tot_pred : 0.0;
  return out;
}

}  // namespace ssw
