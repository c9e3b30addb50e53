#include "ssw/scattering.hpp"

#include <cmath>

#include "ssw/errors.hpp"
#include "ssw/parallel.hpp"

namespace ssw {

XiGrid XiGrid::composite(double fine_h, double fine_max, double coarse_h, double coarse_max) {
  std::vector<double> pos, w;
  const int nf = static_cast<int>(std::lround(fine_max / fine_h));
  const double edge = nf * fine_h;
  for (int k = 0; k < nf; ++k) {
    pos.push_back((k + 0.5) * fine_h);
    w.push_back(fine_h);
  }
  const int nc = static_cast<int>(std::ceil((coarse_max - edge) / coarse_h - 1e-9));
  for (int k = 0; k < nc; ++k) {
    pos.push_back(edge + (k + 0.5) * coarse_h);
    w.push_back(coarse_h);
  }
  XiGrid g;
  for (int k = static_cast<int>(pos.size()) - 1; k >= 0; --k) {
    g.nodes.push_back(-pos[k]);
    g.weights.push_back(w[k]);
  }
  for (std::size_t k = 0; k < pos.size(); ++k) {
    g.nodes.push_back(pos[k]);
    g.weights.push_back(w[k]);
  }
  return g;
}

XiGrid XiGrid::hybrid(double xi_min, double xi_max, int total_nodes) {
  const int half = total_nodes / 2;
  const int ngeo = half / 2;
  const int nlin = half - ngeo;
  std::vector<double> pos;
  for (int k = 0; k < ngeo; ++k) pos.push_back(xi_min * std::pow(1.0 / xi_min, static_cast<double>(k) / ngeo));
  for (int k = 0; k < nlin; ++k) pos.push_back(1.0 + (xi_max - 1.0) * k / (nlin - 1.0));
  XiGrid g;
  for (int k = half - 1; k >= 0; --k) g.nodes.push_back(-pos[k]);
  for (int k = 0; k < half; ++k) g.nodes.push_back(pos[k]);
  // Trapezoid weights on the non-uniform nodes.
  const int n = g.size();
  g.weights.assign(n, 0.0);
  for (int k = 0; k + 1 < n; ++k) {
    const double h = g.nodes[k + 1] - g.nodes[k];
    g.weights[k] += 0.5 * h;
    g.weights[k + 1] += 0.5 * h;
  }
  return g;
}

std::vector<double> XiGrid::positive() const {
  std::vector<double> p;
  for (double x : nodes)
    if (x > 0) p.push_back(x);
  return p;
}

Coefficients transmission_reflection(const ScatteringMatrices& mats, double max_condition) {
  Eigen::JacobiSVD<Mat2c> svd(mats.D);
  const auto sv = svd.singularValues();
  if (!(sv[1] > 0.0) || sv[0] / sv[1] > max_condition)
    throw NearSingularD("D(xi) is near singular at xi = " + std::to_string(mats.xi));
  const Mat2c Dinv = mats.D.inverse();
  const Mat2c BDinv = mats.B * Dinv;
  const cplx two_i_xi(0.0, 2.0 * mats.xi);
  Coefficients c;
  c.s = two_i_xi * Dinv(0, 0);
  c.r = two_i_xi * BDinv(0, 0);
  c.c3 = two_i_xi * Dinv(1, 0);
  c.b3 = two_i_xi * BDinv(1, 0);
  return c;
}

double unitarity_defect(const Coefficients& c) { return std::abs(std::norm(c.s) + std::norm(c.r) - 1.0); }

ScatteringData scattering_scan(const PotentialSet& pot, double omega, const std::vector<double>& xi_grid,
                               const JostOptions& opt) {
  ScatteringData d;
  d.xi_grid = xi_grid;
  const int n = static_cast<int>(xi_grid.size());
  d.s.resize(n);
  d.r.resize(n);
  d.det_D.resize(n);
  d.constancy.resize(n);
  d.matrices.resize(n);
  std::vector<Coefficients> coeffs(n);
  parallel_for(n, [&](int k) {
    d.matrices[k] = wronskian_matrices(pot, omega, xi_grid[k], opt);
    coeffs[k] = transmission_reflection(d.matrices[k]);
  });
  for (int k = 0; k < n; ++k) {
    const Coefficients& c = coeffs[k];
    d.s[k] = c.s;
    d.r[k] = c.r;
    d.det_D[k] = d.matrices[k].D.determinant();
    d.constancy[k] = d.matrices[k].constancy_defect;
    d.unitarity_defect = std::max(d.unitarity_defect, unitarity_defect(c));
    d.symmetry_defect = std::max(d.symmetry_defect, std::abs(std::conj(c.r) * c.s + std::conj(c.s) * c.r));
  }
  return d;
}

ResonanceReport resonance_test(const PotentialSet& pot, double omega, const ResonanceOptions& opt) {
  ResonanceReport rep;
  std::vector<cplx> dets;
  for (int k = 0; k < opt.levels; ++k) {
    const double xi = opt.xi_min * std::pow(2.0, k);
    const ScatteringMatrices m = wronskian_matrices(pot, omega, xi, opt.jost);
    Eigen::JacobiSVD<Mat2c> svd(m.D);
    rep.xi_samples.push_back(xi);
    rep.singular_values.push_back(svd.singularValues()[1]);
    dets.push_back(m.D.determinant());
  }
  rep.min_singular_value_D = rep.singular_values.front();
  const double est0 = std::max(0.0, richardson_to_zero(rep.singular_values, 0));
  const double est1 = std::max(0.0, richardson_to_zero(rep.singular_values, 1));
  rep.det_D0_extrapolated = richardson_to_zero(dets, 0);
  rep.extrapolated_singular_value = est0;
  rep.threshold = opt.relative_threshold * 2.0 * std::sqrt(2.0 * omega);
  const double floor = 1e-3 * rep.threshold;
  if (std::max(est0, est1) > floor && std::abs(est0 - est1) > opt.agreement * std::max(est0, est1))
    throw ExtrapolationUnstable("singular-value extrapolation disagrees: " + std::to_string(est0) + " vs " +
                                std::to_string(est1));
  rep.resonant = est0 < rep.threshold;
  return rep;
}

EdgeLimits edge_limits(const PotentialSet& pot, double omega, const ResonanceOptions& opt) {
  EdgeLimits e;
  for (int k = 0; k < opt.levels; ++k) {
    const double xi = opt.xi_min * std::pow(2.0, k);
    const Coefficients c = transmission_reflection(wronskian_matrices(pot, omega, xi, opt.jost));
    e.xi_samples.push_back(xi);
    e.s.push_back(c.s);
    e.r.push_back(c.r);
  }
  e.s0 = richardson_to_zero(e.s);
  e.r0 = richardson_to_zero(e.r);
  return e;
}

}  // namespace ssw
