#include "ssw/jost.hpp"

#include <cmath>

#include "ssw/errors.hpp"
#include "ssw/volterra.hpp"

namespace ssw {

namespace {

constexpr cplx I(0.0, 1.0);

int first_index(const Grid1D& g, double x_left) {
  const int i = g.zero_index() - static_cast<int>(std::ceil(x_left / g.dx));
  return std::max(i, 2);
}

int nearest_index(const Grid1D& g, double x) {
  return std::clamp(static_cast<int>(std::lround((x + g.x_max) / g.dx)), 0, g.n - 1);
}

JostSolution blank(const PotentialSet& pot, double omega, double xi, JostKind kind, const JostOptions& opt) {
  JostSolution s;
  s.xi = xi;
  s.omega = omega;
  s.kappa = std::sqrt(xi * xi + 2.0 * omega);
  s.kind = kind;
  s.grid = pot.grid;
  s.first = first_index(pot.grid, opt.x_left);
  const int m = pot.grid.n - s.first;
  s.factor = FactorArray::Zero(m, 2);
  s.dfactor = FactorArray::Zero(m, 2);
  return s;
}

Vec2c solve2(const Mat2c& m, const Vec2c& rhs) {
  const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det)))
    throw VolterraDivergence("singular node equation in the marching scheme");
  return Vec2c((m(1, 1) * rhs[0] - m(0, 1) * rhs[1]) / det, (m(0, 0) * rhs[1] - m(1, 0) * rhs[0]) / det);
}

void check_finite(const JostSolution& s) {
  if (!s.factor.allFinite() || !s.dfactor.allFinite())
    throw VolterraDivergence(to_string(s.kind) + " produced non-finite values at xi = " + std::to_string(s.xi));
}

std::vector<cplx> zeros_history() { return std::vector<cplx>(MarchingSum::kMaxDegree, 0.0); }

}  // namespace

std::string to_string(JostKind k) {
  switch (k) {
    case JostKind::f1: return "f1";
    case JostKind::f2: return "f2";
    case JostKind::f3: return "f3";
    case JostKind::f4: return "f4";
    case JostKind::f4dagger: return "f4dagger";
    case JostKind::g1: return "g1";
    case JostKind::g2: return "g2";
    case JostKind::g3: return "g3";
    case JostKind::g4: return "g4";
  }
  return "?";
}

Vec2c JostSolution::value(int i) const {
  const int r = i - first;
  Vec2c v = std::exp(rate * grid.x(i)) * factor.row(r).transpose();
  for (const auto& [c, part] : minus) v -= c * part->value(i);
  return v;
}

Vec2c JostSolution::derivative(int i) const {
  const int r = i - first;
  Vec2c v = std::exp(rate * grid.x(i)) * (dfactor.row(r).transpose() + rate * factor.row(r).transpose());
  for (const auto& [c, part] : minus) v -= c * part->derivative(i);
  return v;
}

Vec2c JostSolution::reflected_value(int i) const { return value(grid.n - i); }
Vec2c JostSolution::reflected_derivative(int i) const { return -derivative(grid.n - i); }

JostSolution solve_f3(const PotentialSet& pot, double omega, double xi, const JostOptions& opt) {
  JostSolution s = blank(pot, omega, xi, JostKind::f3, opt);
  const double k = s.kappa;
  const double dx = pot.grid.dx;
  const cplx la(-k, xi), mu_a(-k, -xi), lb(-2.0 * k, 0.0);
  MarchingSum ta(la, mu_a, dx), tb(lb, 0.0, dx);
  ta.seed_history(zeros_history());
  tb.seed_history(zeros_history());
  s.rate = -k;
  for (int i = pot.grid.n - 1; i >= s.first; --i) {
    const double v1 = pot.V1[i], v2 = pot.V2[i];
    const auto pa = ta.predict();
    const auto pb = tb.predict();
    Mat2c m;
    m << 1.0 - pa.wT * v1, -pa.wT * v2, -pb.wT * v2, 1.0 - pb.wT * v1;
    const Vec2c ab = solve2(m, Vec2c(pa.T, 1.0 + pb.T));
    ta.commit(pa, v1 * ab[0] + v2 * ab[1]);
    tb.commit(pb, v2 * ab[0] + v1 * ab[1]);
    const int r = i - s.first;
    s.factor.row(r) = ab.transpose();
    s.dfactor(r, 0) = -(la * ta.T() + ta.E());
    s.dfactor(r, 1) = -(lb * tb.T() + tb.E());
  }
  check_finite(s);
  s.eig_residual = eigen_residual(s, pot, opt.residual_window);
  return s;
}

JostSolution solve_f1(const PotentialSet& pot, double omega, double xi, const JostSolution& f3,
                      const JostOptions& opt) {
  JostSolution s = blank(pot, omega, xi, JostKind::f1, opt);
  const double k = s.kappa;
  const double dx = pot.grid.dx;
  const int n = pot.grid.n;
  if (std::abs(xi) < 1e-3) s.warnings.push_back("SmallXiWarning: |xi| < 1e-3, oscillatory kernel near its limit");
  const cplx lw(0.0, 2.0 * xi);
  const cplx mu_r(-k, xi);
  MarchingSum tw(lw, 0.0, dx), rs(0.0, mu_r, dx, false);
  tw.seed_history(zeros_history());
  rs.seed_history(zeros_history());

  const int m = n - s.first;
  std::vector<cplx> w(m), dw(m), frak_u(m);
  for (int i = n - 1; i >= s.first; --i) {
    const int r = i - s.first;
    const cplx a3 = f3.factor(r, 0), b3 = f3.factor(r, 1);
    const cplx da3 = f3.dfactor(r, 0), db3 = f3.dfactor(r, 1);
    if (std::abs(b3) < 1e-12) throw VolterraDivergence("f3 second component vanishes; f1 ansatz breaks down");
    const double v1 = pot.V1[i], v2 = pot.V2[i];
    const cplx A = v1 - v2 * a3 / b3;
    const cplx P = (b3 * da3 - db3 * a3) / (b3 * b3 * b3);
    const cplx Q = b3 * v2;
    const auto pw = tw.predict();
    const auto pr = rs.predict();
    const cplx denom = 1.0 - pw.wT * (A + 2.0 * P * pr.wE * Q);
    const cplx wi = (1.0 + pw.T + pw.wT * 2.0 * P * pr.E) / denom;
    const cplx Ri = pr.E + pr.wE * Q * wi;
    const cplx g = A * wi + 2.0 * P * Ri;
    rs.commit(pr, Q * wi);
    tw.commit(pw, g);
    w[r] = wi;
    dw[r] = -(lw * tw.T() + tw.E());
    frak_u[r] = Ri / (b3 * b3);
  }

  // Z(x) = int_0^x e^{-c(x-y)} u dy for x >= 0 and -int_x^0 e^{c(y-x)} u dy for x < 0.
  const cplx c(k, xi);
  const int z0 = pot.grid.zero_index() - s.first;
  std::vector<cplx> Z(m, 0.0);
  {
    MarchingSum fwd(0.0, -c, dx, false);
    std::vector<cplx> seed;
    for (int j = 1; j <= MarchingSum::kMaxDegree && z0 - j >= 0; ++j) seed.push_back(frak_u[z0 - j]);
    fwd.seed_history(seed);
    for (int r = z0; r < m; ++r) {
      const auto p = fwd.predict();
      fwd.commit(p, frak_u[r]);
      Z[r] = fwd.E();
    }
    MarchingSum bwd(0.0, c, dx, false);
    seed.clear();
    for (int j = 1; j <= MarchingSum::kMaxDegree && z0 + j < m; ++j) seed.push_back(frak_u[z0 + j]);
    bwd.seed_history(seed);
    for (int r = z0; r >= 0; --r) {
      const auto p = bwd.predict();
      bwd.commit(p, frak_u[r]);
      Z[r] = -bwd.E();
    }
  }
  s.rate = I * xi;
  for (int r = 0; r < m; ++r) {
    const Vec2c f = f3.factor.row(r).transpose();
    const Vec2c df = f3.dfactor.row(r).transpose();
    const cplx dZ = frak_u[r] - c * Z[r];
    Vec2c val = -Z[r] * f;
    val[0] += w[r];
    Vec2c der = -dZ * f - Z[r] * df;
    der[0] += dw[r];
    s.factor.row(r) = val.transpose();
    s.dfactor.row(r) = der.transpose();
  }
  check_finite(s);
  s.eig_residual = eigen_residual(s, pot, opt.residual_window);
  return s;
}

JostSolution solve_f1(const PotentialSet& pot, double omega, double xi, const JostOptions& opt) {
  return solve_f1(pot, omega, xi, solve_f3(pot, omega, xi, opt), opt);
}

JostSolution conjugate_solution(const JostSolution& f1) {
  JostSolution s = f1;
  s.kind = JostKind::f2;
  s.rate = std::conj(f1.rate);
  s.factor = f1.factor.conjugate();
  s.dfactor = f1.dfactor.conjugate();
  s.minus.clear();
  return s;
}

JostSolution solve_f4dagger(const PotentialSet& pot, double omega, double xi, double x1, const JostOptions& opt) {
  JostSolution s = blank(pot, omega, xi, JostKind::f4dagger, opt);
  const double k = s.kappa;
  const double dx = pot.grid.dx;
  const int n = pot.grid.n;
  const int i1 = std::isfinite(x1) ? std::max(nearest_index(pot.grid, x1), s.first) : s.first;
  const double inv2k = 1.0 / (2.0 * k);

  // Forward from x1: a = int K_{-k+i xi, -k-i xi}(x-y) g1, b = 1 - (C - Y)... with C, Y running sums.
  const cplx la(-k, xi), mu_a(-k, -xi);
  MarchingSum ta(la, mu_a, dx), ys(0.0, -2.0 * k, dx, false), cs(0.0, 0.0, dx, false);
  auto forward_step = [&](int i) {
    const double v1 = pot.V1[i], v2 = pot.V2[i];
    const auto pa = ta.predict();
    const auto py = ys.predict();
    const auto pc = cs.predict();
    Mat2c m;
    const cplx wb = inv2k * (pc.wE - py.wE);
    m << 1.0 - pa.wT * v1, -pa.wT * v2, -wb * v2, 1.0 - wb * v1;
    const Vec2c ab = solve2(m, Vec2c(pa.T, 1.0 + inv2k * (pc.E - py.E)));
    const cplx g1 = v1 * ab[0] + v2 * ab[1], g2 = v2 * ab[0] + v1 * ab[1];
    ta.commit(pa, g1);
    ys.commit(py, g2);
    cs.commit(pc, g2);
    const int r = i - s.first;
    s.factor.row(r) = ab.transpose();
    s.dfactor(r, 0) = la * ta.T() + ta.E();
    s.dfactor(r, 1) = ys.E();
  };
  const int start_len = MarchingSum::kMaxDegree + 1;
  if (n - i1 > start_len) {
    run_with_startup({&ta, &ys, &cs}, [&](int j) { forward_step(i1 + j); });
    for (int i = i1 + start_len; i < n; ++i) forward_step(i);
  } else {
    for (int i = i1; i < n; ++i) forward_step(i);
  }
  const cplx total = cs.E();

  // Backward from x1 with growing kernels.
  if (i1 > s.first) {
    const cplx lb(k, -xi), mu_b(k, xi);
    MarchingSum tb(lb, mu_b, dx), yb(0.0, 2.0 * k, dx, false), cb(0.0, 0.0, dx, false);
    auto backward_step = [&](int i) {
      const double v1 = pot.V1[i], v2 = pot.V2[i];
      const auto pa = tb.predict();
      const auto py = yb.predict();
      const auto pc = cb.predict();
      Mat2c m;
      const cplx wb = -inv2k * (pc.wE - py.wE);
      m << 1.0 - pa.wT * v1, -pa.wT * v2, -wb * v2, 1.0 - wb * v1;
      const Vec2c ab = solve2(m, Vec2c(pa.T, 1.0 - inv2k * (pc.E - py.E)));
      const cplx g1 = v1 * ab[0] + v2 * ab[1], g2 = v2 * ab[0] + v1 * ab[1];
      tb.commit(pa, g1);
      yb.commit(py, g2);
      cb.commit(pc, g2);
      const int r = i - s.first;
      s.factor.row(r) = ab.transpose();
      s.dfactor(r, 0) = -(lb * tb.T() + tb.E());
      s.dfactor(r, 1) = -yb.E();
    };
    if (i1 - s.first + 1 > start_len) {
      run_with_startup({&tb, &yb, &cb}, [&](int j) { backward_step(i1 - j); });
      for (int i = i1 - start_len; i >= s.first; --i) backward_step(i);
    } else {
      for (int i = i1; i >= s.first; --i) backward_step(i);
    }
  }
  const cplx scale = 1.0 / (1.0 + total * inv2k);
  s.factor *= scale;
  s.dfactor *= scale;
  s.rate = k;
  check_finite(s);
  s.eig_residual = eigen_residual(s, pot, opt.residual_window);
  return s;
}

cplx wronskian(const JostSolution& f, const JostSolution& g, int i) {
  return f.derivative(i).cwiseProduct(g.value(i)).sum() - f.value(i).cwiseProduct(g.derivative(i)).sum();
}

JostSet solve_jost_set(const PotentialSet& pot, double omega, double xi, const JostOptions& opt) {
  if (xi == 0.0) throw XiZeroSingular("f4 correction divides by xi; use xi != 0");
  JostSet set;
  auto f3 = std::make_shared<JostSolution>(solve_f3(pot, omega, xi, opt));
  auto f1 = std::make_shared<JostSolution>(solve_f1(pot, omega, xi, *f3, opt));
  auto f2 = std::make_shared<JostSolution>(conjugate_solution(*f1));
  const bool near_branch = opt.branch == 1 || (opt.branch == 0 && std::abs(xi) <= opt.branch_xi);
  const double x1 = near_branch ? opt.x1_star : -std::numeric_limits<double>::infinity();
  auto f4d = std::make_shared<JostSolution>(solve_f4dagger(pot, omega, xi, x1, opt));
  const int z = pot.grid.zero_index();
  const cplx two_i_xi = 2.0 * I * xi;
  set.c1 = -wronskian(*f2, *f4d, z) / two_i_xi;
  set.c2 = wronskian(*f1, *f4d, z) / two_i_xi;
  auto f4 = std::make_shared<JostSolution>(*f4d);
  f4->kind = JostKind::f4;
  f4->minus = {{set.c1, f1}, {set.c2, f2}};
  f4->eig_residual = eigen_residual(*f4, pot, opt.residual_window);
  set.f1 = f1;
  set.f2 = f2;
  set.f3 = f3;
  set.f4 = f4;
  set.f4dagger = f4d;
  return set;
}

JostSolution solve_f4(const PotentialSet& pot, double omega, double xi, const JostOptions& opt) {
  return *solve_jost_set(pot, omega, xi, opt).f4;
}

double eigen_residual(const JostSolution& f, const PotentialSet& pot, double window) {
  const Grid1D& g = f.grid;
  const int lo = std::max(f.first + 2, nearest_index(g, -window));
  const int hi = std::min(g.n - 3, nearest_index(g, window));
  if (hi - lo < 4) return 0.0;
  const int m = hi - lo + 5;
  CVec u1(m), u2(m);
  for (int j = 0; j < m; ++j) {
    const Vec2c v = f.value(lo - 2 + j);
    u1[j] = v[0];
    u2[j] = v[1];
  }
  const CVec d1 = second_derivative_fd4(u1, g.dx);
  const CVec d2 = second_derivative_fd4(u2, g.dx);
  const double energy = f.omega + f.xi * f.xi;
  double worst = 0.0, scale = 0.0;
  for (int j = 2; j < m - 2; ++j) {
    const int i = lo - 2 + j;
    const double v1 = pot.V1[i], v2 = pot.V2[i];
    const cplx r1 = -d1[j] + (f.omega + v1) * u1[j] + v2 * u2[j] - energy * u1[j];
    const cplx r2 = -v2 * u1[j] + d2[j] - (f.omega + v1) * u2[j] - energy * u2[j];
    worst = std::max(worst, std::max(std::abs(r1), std::abs(r2)));
    scale = std::max(scale, std::max(std::abs(u1[j]), std::abs(u2[j])));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

namespace {
Mat2c columns(const Vec2c& a, const Vec2c& b) {
  Mat2c m;
  m.col(0) = a;
  m.col(1) = b;
  return m;
}
}  // namespace

Mat2c wronskian_D_at(const JostSet& set, int i) {
  const Mat2c F = columns(set.f1->value(i), set.f3->value(i));
  const Mat2c dF = columns(set.f1->derivative(i), set.f3->derivative(i));
  const Mat2c G = columns(set.f1->reflected_value(i), set.f3->reflected_value(i));
  const Mat2c dG = columns(set.f1->reflected_derivative(i), set.f3->reflected_derivative(i));
  return dF.transpose() * G - F.transpose() * dG;
}

ScatteringMatrices wronskian_matrices(const JostSet& set, double omega) {
  ScatteringMatrices sm;
  const double xi = set.f1->xi;
  sm.xi = xi;
  sm.bracket = std::sqrt(xi * xi + 2.0 * omega);
  const int z = set.f1->grid.zero_index();
  const Mat2c F1 = columns(set.f1->value(z), set.f3->value(z));
  const Mat2c dF1 = columns(set.f1->derivative(z), set.f3->derivative(z));
  const Mat2c F2 = columns(set.f2->value(z), set.f4->value(z));
  const Mat2c dF2 = columns(set.f2->derivative(z), set.f4->derivative(z));
  sm.D = dF1.transpose() * F1 + F1.transpose() * dF1;
  sm.W_F1G1 = dF1.transpose() * F2 + F1.transpose() * dF2;
  const Vec2c inv_diag(1.0 / (2.0 * I * xi), -1.0 / (2.0 * sm.bracket));
  sm.A = inv_diag.asDiagonal() * sm.D.transpose();
  sm.B = -(inv_diag.asDiagonal() * sm.W_F1G1.transpose());
  const double reach = std::min(1.0, 2.0 / sm.bracket);
  const int shift = std::max(1, static_cast<int>(std::lround(reach / set.f1->grid.dx)));
  const double scale = sm.D.norm();
  for (int i : {z - shift, z + shift})
    sm.constancy_defect = std::max(sm.constancy_defect, (wronskian_D_at(set, i) - sm.D).norm() / scale);
  return sm;
}

ScatteringMatrices wronskian_matrices(const PotentialSet& pot, double omega, double xi, const JostOptions& opt) {
  return wronskian_matrices(solve_jost_set(pot, omega, xi, opt), omega);
}

}  // namespace ssw
