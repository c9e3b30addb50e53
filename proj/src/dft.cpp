#include "ssw/dft.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ssw/errors.hpp"
#include "ssw/parallel.hpp"

namespace ssw {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

// psi_plus for xi > 0 built from one Jost set.
struct PlusSolution {
  JostSet set;
  Coefficients c;
  int n = 0;

  PlusSolution(const PotentialSet& pot, double omega, double xi, const JostOptions& opt)
      : set(solve_jost_set(pot, omega, xi, opt)), c(transmission_reflection(wronskian_matrices(set, omega))),
        n(pot.grid.n) {}

  // F_plus at grid index i, 1 <= i < n.
  Vec2c at(int i) const {
    const int z = n / 2;
    if (i >= z) return c.s * set.f1->value(i) + c.c3 * set.f3->value(i);
    const int j = n - i;
    const Vec2c f1 = set.f1->value(j);
    return f1.conjugate() + c.r * f1 + c.b3 * set.f3->value(j);
  }
};

void check_compatible(const Grid1D& a, const Grid1D& b) {
  if (std::abs(a.dx - b.dx) > 1e-12 * a.dx) throw ConfigParse("state grid spacing differs from the eigenbasis grid");
}

template <class T>
void write_raw(std::ostream& os, const T* p, std::size_t count) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(sizeof(T) * count));
}

template <class T>
bool read_raw(std::istream& is, T* p, std::size_t count) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(sizeof(T) * count));
  return static_cast<bool>(is);
}

struct Fnv {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  }
  void value(double v) { bytes(&v, sizeof v); }
  void vec(const RVec& v) { bytes(v.data(), sizeof(double) * v.size()); }
};

cplx lagrange_at_zero(const double* x, const cplx* y, int m) {
  cplx sum = 0.0;
  for (int a = 0; a < m; ++a) {
    double l = 1.0;
    for (int b = 0; b < m; ++b)
      if (b != a) l *= (0.0 - x[b]) / (x[a] - x[b]);
    sum += l * y[a];
  }
  return sum;
}

}  // namespace

double chi_plus(double x) {
  const double t = x + 0.5;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

SingularCoefficients SingularCoefficients::at(double xi, cplx s, cplx r) {
  if (xi > 0) return {s, 0.0, 1.0, r};
  return {1.0, r, s, 0.0};
}

cplx SingularCoefficients::evaluate(double x, double xi) const {
  const cplx e = std::polar(1.0, xi * x);
  const double cp = chi_plus(x);
  return cp * (plus_plus * e + plus_minus * std::conj(e)) + (1.0 - cp) * (minus_plus * e + minus_minus * std::conj(e));
}

VectorState generalized_eigenfunction(const PotentialSet& pot, double omega, double xi, const JostOptions& opt) {
  const Grid1D& g = pot.grid;
  const PlusSolution ps(pot, omega, std::abs(xi), opt);
  const SingularCoefficients a = SingularCoefficients::at(xi, ps.c.s, ps.c.r);
  VectorState out = VectorState::zero(g.n);
  for (int i = 1; i < g.n; ++i) {
    const Vec2c v = xi > 0 ? ps.at(i) : ps.at(g.n - i);
    out.u1[i] = v[0];
    out.u2[i] = v[1];
  }
  out.u1[0] = a.evaluate(g.x(0), xi);
  return out;
}

VectorState EigenBasis::singular_part(int k) const {
  VectorState out = VectorState::zero(grid.n);
  for (int i = 0; i < grid.n; ++i) out.u1[i] = coef[k].evaluate(grid.x(i), xi.nodes[k]);
  return out;
}

VectorState EigenBasis::regular_part(int k) const {
  VectorState out = VectorState::zero(grid.n);
  out.u1.segment(reg_first, window_size()) = reg1.col(k);
  out.u2.segment(reg_first, window_size()) = reg2.col(k);
  return out;
}

VectorState EigenBasis::psi_plus(int k) const { return singular_part(k) + regular_part(k); }

EigenBasis build_eigenbasis(const PotentialSet& pot, double omega, const XiGrid& xi, const EigenBasisOptions& opt) {
  const Grid1D& g = pot.grid;
  EigenBasis b;
  b.omega = omega;
  b.grid = g;
  b.xi = xi;
  const int z = g.zero_index();
  const double X = opt.window > 0 ? opt.window : 28.0 / std::sqrt(2.0 * omega);
  const int W = std::min(z - 1, static_cast<int>(std::lround(X / g.dx)));
  b.reg_first = z - W;
  const int rows = 2 * W + 1;
  const int m = xi.size();
  b.reg1.resize(rows, m);
  b.reg2.resize(rows, m);
  b.s.assign(m, 0.0);
  b.r.assign(m, 0.0);
  b.coef.resize(m);

  std::map<double, int> negative;
  std::vector<int> positive;
  for (int k = 0; k < m; ++k) {
    if (xi.nodes[k] < 0) negative[-xi.nodes[k]] = k;
    else if (xi.nodes[k] > 0) positive.push_back(k);
    else throw XiZeroSingular("frequency grid contains xi = 0");
  }
  if (negative.size() != positive.size()) throw ConfigParse("frequency grid must be symmetric about 0");

  parallel_for(static_cast<int>(positive.size()), [&](int p) {
    const int kp = positive[p];
    const double a = xi.nodes[kp];
    const auto it = negative.find(a);
    if (it == negative.end()) throw ConfigParse("frequency grid must be symmetric about 0");
    const int kn = it->second;
    const PlusSolution ps(pot, omega, a, opt.jost);
    for (int k : {kp, kn}) {
      b.s[k] = ps.c.s;
      b.r[k] = ps.c.r;
      b.coef[k] = SingularCoefficients::at(xi.nodes[k], ps.c.s, ps.c.r);
    }
    for (int row = 0; row < rows; ++row) {
      const int i = b.reg_first + row;
      const double x = g.x(i);
      const Vec2c vp = ps.at(i);
      const Vec2c vn = ps.at(g.n - i);
      b.reg1(row, kp) = vp[0] - b.coef[kp].evaluate(x, a);
      b.reg2(row, kp) = vp[1];
      b.reg1(row, kn) = vn[0] - b.coef[kn].evaluate(x, -a);
      b.reg2(row, kn) = vn[1];
    }
  });
  for (int k = 0; k < m; ++k)
    for (int row : {0, rows - 1})
      b.regular_edge = std::max({b.regular_edge, std::abs(b.reg1(row, k)), std::abs(b.reg2(row, k))});
  return b;
}

std::uint64_t eigenbasis_key(const PotentialSet& pot, double omega, const XiGrid& xi, const EigenBasisOptions& opt) {
  Fnv f;
  f.vec(pot.V1);
  f.vec(pot.V2);
  f.value(omega);
  f.value(pot.grid.x_max);
  f.value(static_cast<double>(pot.grid.n));
  f.bytes(xi.nodes.data(), sizeof(double) * xi.nodes.size());
  f.bytes(xi.weights.data(), sizeof(double) * xi.weights.size());
  for (double v : {opt.window, opt.jost.x_left, opt.jost.branch_xi, opt.jost.x1_star,
                   static_cast<double>(opt.jost.branch)})
    f.value(v);
  return f.h;
}

void save_eigenbasis(const EigenBasis& b, std::uint64_t key, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigParse("cannot write eigenbasis cache " + path);
  const char magic[8] = {'S', 'S', 'W', 'E', 'B', '0', '0', '1'};
  os.write(magic, 8);
  const std::int64_t m = b.size(), rows = b.window_size(), n = b.grid.n, first = b.reg_first;
  write_raw(os, &key, 1);
  write_raw(os, &b.omega, 1);
  write_raw(os, &b.grid.x_max, 1);
  write_raw(os, &n, 1);
  write_raw(os, &m, 1);
  write_raw(os, &rows, 1);
  write_raw(os, &first, 1);
  write_raw(os, &b.regular_edge, 1);
  write_raw(os, b.xi.nodes.data(), m);
  write_raw(os, b.xi.weights.data(), m);
  write_raw(os, b.s.data(), m);
  write_raw(os, b.r.data(), m);
  write_raw(os, b.reg1.data(), rows * m);
  write_raw(os, b.reg2.data(), rows * m);
}

bool load_eigenbasis(EigenBasis& b, std::uint64_t key, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "SSWEB001", 8) != 0) return false;
  std::uint64_t stored = 0;
  std::int64_t n = 0, m = 0, rows = 0, first = 0;
  double x_max = 0;
  if (!read_raw(is, &stored, 1) || stored != key) return false;
  read_raw(is, &b.omega, 1);
  read_raw(is, &x_max, 1);
  read_raw(is, &n, 1);
  read_raw(is, &m, 1);
  read_raw(is, &rows, 1);
  read_raw(is, &first, 1);
  read_raw(is, &b.regular_edge, 1);
  if (!is || m <= 0 || rows <= 0 || n <= 0) return false;
  b.grid = Grid1D(x_max, static_cast<int>(n));
  b.reg_first = static_cast<int>(first);
  b.xi.nodes.resize(m);
  b.xi.weights.resize(m);
  b.s.resize(m);
  b.r.resize(m);
  b.reg1.resize(rows, m);
  b.reg2.resize(rows, m);
  read_raw(is, b.xi.nodes.data(), m);
  read_raw(is, b.xi.weights.data(), m);
  read_raw(is, b.s.data(), m);
  read_raw(is, b.r.data(), m);
  read_raw(is, b.reg1.data(), rows * m);
  if (!read_raw(is, b.reg2.data(), rows * m)) return false;
  b.coef.resize(m);
  for (int k = 0; k < m; ++k) b.coef[k] = SingularCoefficients::at(b.xi.nodes[k], b.s[k], b.r[k]);
  return true;
}

EigenBasis cached_eigenbasis(const PotentialSet& pot, double omega, const XiGrid& xi, const EigenBasisOptions& opt) {
  const char* dir = std::getenv("SSW_CACHE_DIR");
  if (!dir || !*dir) return build_eigenbasis(pot, omega, xi, opt);
  const std::uint64_t key = eigenbasis_key(pot, omega, xi, opt);
  std::ostringstream name;
  name << "eigenbasis_" << std::hex << key << ".bin";
  const std::filesystem::path path = std::filesystem::path(dir) / name.str();
  EigenBasis b;
  if (load_eigenbasis(b, key, path.string())) return b;
  b = build_eigenbasis(pot, omega, xi, opt);
  std::filesystem::create_directories(dir);
  save_eigenbasis(b, key, path.string());
  return b;
}

double DistortedSpectrum::l2_norm() const {
  double s = 0;
  for (std::size_t k = 0; k < xi.size(); ++k) s += weights[k] * (std::norm(f_plus[k]) + std::norm(f_minus[k]));
  return std::sqrt(s);
}

double DistortedSpectrum::sup_norm() const {
  return std::max(f_plus.cwiseAbs().maxCoeff(), f_minus.cwiseAbs().maxCoeff());
}

void DistortedSpectrum::update_zero_values() {
  const int m = static_cast<int>(xi.size());
  int p = 0;
  while (p < m && xi[p] < 0) ++p;
  if (p < 4 || m - p < 4) return;
  for (int side = 0; side < 2; ++side) {
    const int start = side == 0 ? p - 4 : p;
    double x[4];
    cplx yp[4], ym[4];
    for (int a = 0; a < 4; ++a) {
      x[a] = xi[start + a];
      yp[a] = f_plus[start + a];
      ym[a] = f_minus[start + a];
    }
    plus_at_zero[side] = lagrange_at_zero(x, yp, 4);
    minus_at_zero[side] = lagrange_at_zero(x, ym, 4);
  }
}

DistortedSpectrum forward_transform(const VectorState& state, const Grid1D& sg, const EigenBasis& basis) {
  check_compatible(sg, basis.grid);
  const int m = basis.size();
  const int offset = sg.zero_index() - basis.grid.zero_index();
  DistortedSpectrum out;
  out.xi = basis.xi.nodes;
  out.weights = basis.xi.weights;
  out.f_plus = CVec::Zero(m);
  out.f_minus = CVec::Zero(m);

  // Transition zone of the cutoff.
  std::vector<double> chi(sg.n);
  for (int i = 0; i < sg.n; ++i) chi[i] = chi_plus(sg.x(i));

  parallel_for(m, [&](int k) {
    const double xi = basis.xi.nodes[k];
    const cplx step = std::polar(1.0, -xi * sg.dx);
    cplx A1 = 0, B1 = 0, C1 = 0, E1 = 0, A2 = 0, B2 = 0, C2 = 0, E2 = 0;
    cplx ph;
    for (int i = 0; i < sg.n; ++i) {
      if ((i & 255) == 0) ph = std::polar(1.0, -xi * sg.x(i));
      const cplx u1 = state.u1[i], u2 = state.u2[i];
      const cplx pc = std::conj(ph);
      const cplx a1 = u1 * ph, c1 = u1 * pc, a2 = u2 * ph, c2 = u2 * pc;
      A1 += a1;
      C1 += c1;
      A2 += a2;
      C2 += c2;
      if (chi[i] > 0) {
        B1 += chi[i] * a1;
        E1 += chi[i] * c1;
        B2 += chi[i] * a2;
        E2 += chi[i] * c2;
      }
      ph *= step;
    }
    const SingularCoefficients& a = basis.coef[k];
    auto pair = [&](cplx A, cplx B, cplx C, cplx E) {
      return std::conj(a.plus_plus) * B + std::conj(a.plus_minus) * E + std::conj(a.minus_plus) * (A - B) +
             std::conj(a.minus_minus) * (C - E);
    };
    out.f_plus[k] = pair(A1, B1, C1, E1);
    out.f_minus[k] = -pair(A2, B2, C2, E2);
  });

  // Regular part on the overlap of the window and the state grid.
  const int rows = basis.window_size();
  int r0 = 0, r1 = rows;
  r0 = std::max(r0, -(basis.reg_first + offset));
  r1 = std::min(r1, sg.n - (basis.reg_first + offset));
  if (r1 > r0) {
    const int len = r1 - r0;
    const int i0 = basis.reg_first + offset + r0;
    const CVec u1 = state.u1.segment(i0, len), u2 = state.u2.segment(i0, len);
    const auto R1 = basis.reg1.middleRows(r0, len);
    const auto R2 = basis.reg2.middleRows(r0, len);
    out.f_plus += R1.adjoint() * u1 - R2.adjoint() * u2;
    out.f_minus += R2.adjoint() * u1 - R1.adjoint() * u2;
  }
  out.f_plus *= kInvSqrt2Pi * sg.dx;
  out.f_minus *= kInvSqrt2Pi * sg.dx;
  out.update_zero_values();
  return out;
}

DistortedSpectrum forward_transform(const VectorState& state, const EigenBasis& basis) {
  return forward_transform(state, basis.grid, basis);
}

VectorState inverse_transform(const DistortedSpectrum& spec, const Grid1D& og, const EigenBasis& basis) {
  check_compatible(og, basis.grid);
  const int m = basis.size();
  if (static_cast<int>(spec.xi.size()) != m) throw ConfigParse("spectrum and eigenbasis grids differ");
  const int offset = og.zero_index() - basis.grid.zero_index();
  CVec gp(m), gm(m);
  for (int k = 0; k < m; ++k) {
    gp[k] = basis.xi.weights[k] * spec.f_plus[k];
    gm[k] = basis.xi.weights[k] * spec.f_minus[k];
  }
  VectorState out = VectorState::zero(og.n);
  std::vector<double> chi(og.n);
  for (int i = 0; i < og.n; ++i) chi[i] = chi_plus(og.x(i));

  // Singular part: sums over frequencies accumulated along x by phase recurrence.
  const int blocks = std::max(1, std::min(thread_count(), 64));
  const int chunk = (og.n + blocks - 1) / blocks;
  parallel_for(blocks, [&](int bI) {
    const int lo = bI * chunk, hi = std::min(og.n, lo + chunk);
    for (int k = 0; k < m; ++k) {
      const double xi = basis.xi.nodes[k];
      const SingularCoefficients& a = basis.coef[k];
      const cplx step = std::polar(1.0, xi * og.dx);
      cplx e;
      for (int i = lo; i < hi; ++i) {
        if (((i - lo) & 255) == 0) e = std::polar(1.0, xi * og.x(i));
        const cplx ec = std::conj(e);
        const double cp = chi[i];
        cplx psi = a.minus_plus * e + a.minus_minus * ec;
        if (cp > 0) psi = cp * (a.plus_plus * e + a.plus_minus * ec) + (1.0 - cp) * psi;
        out.u1[i] += gp[k] * psi;
        out.u2[i] -= gm[k] * psi;
        e *= step;
      }
    }
  });

  const int rows = basis.window_size();
  int r0 = std::max(0, -(basis.reg_first + offset));
  int r1 = std::min(rows, og.n - (basis.reg_first + offset));
  if (r1 > r0) {
    const int len = r1 - r0;
    const int i0 = basis.reg_first + offset + r0;
    const auto R1 = basis.reg1.middleRows(r0, len);
    const auto R2 = basis.reg2.middleRows(r0, len);
    out.u1.segment(i0, len) += R1 * gp - R2 * gm;
    out.u2.segment(i0, len) += R2 * gp - R1 * gm;
  }
  out *= kInvSqrt2Pi;
  return out;
}

VectorState inverse_transform(const DistortedSpectrum& spec, const EigenBasis& basis) {
  return inverse_transform(spec, basis.grid, basis);
}

DistortedSpectrum propagate_linear(const DistortedSpectrum& spec, double t, double omega) {
  DistortedSpectrum out = spec;
  for (std::size_t k = 0; k < spec.xi.size(); ++k) {
    const double phase = (omega + spec.xi[k] * spec.xi[k]) * t;
    out.f_plus[k] *= std::polar(1.0, phase);
    out.f_minus[k] *= std::polar(1.0, -phase);
  }
  out.update_zero_values();
  return out;
}

double diagonalization_defect(const EigenBasis& basis, const DiscretizedOperator& op,
                              const std::vector<VectorState>& states) {
  double worst = 0;
  for (const VectorState& u : states) {
    const DistortedSpectrum f = forward_transform(u, op.grid, basis);
    DistortedSpectrum g = forward_transform(op.apply(u), op.grid, basis);
    const double norm_f = f.l2_norm();
    if (norm_f == 0.0) continue;
    for (int k = 0; k < basis.size(); ++k) {
      const double lam = op.omega + f.xi[k] * f.xi[k];
      g.f_plus[k] -= lam * f.f_plus[k];
      g.f_minus[k] += lam * f.f_minus[k];
    }
    worst = std::max(worst, g.l2_norm() / norm_f);
  }
  return worst;
}

XiGrid dft_grid(double extent, double xi_max) {
  const int half = static_cast<int>(std::ceil(xi_max * extent / kPi));
  const double h = xi_max / half;
  return XiGrid::composite(h, xi_max, h, xi_max);
}

}  // namespace ssw
