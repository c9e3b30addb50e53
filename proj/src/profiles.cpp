#include "ssw/profiles.hpp"

#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "ssw/errors.hpp"

namespace ssw {

namespace odeint = boost::numeric::odeint;

double ground_state_amplitude_sq(const FieldSpec& spec, double omega) {
  if (!(omega > 0.0)) throw NoGroundState("omega must be positive");
  auto gap = [&](double z) { return omega - spec.ratio(z); };
  double lo = 0.0;
  double z = 1e-8;
  const double z_cap = 1e12;
  while (z < z_cap && gap(z) > 0.0) {
    lo = z;
    z *= 1.02;
  }
  if (z >= z_cap) throw NoGroundState("omega = F(z)/z has no positive root; no homoclinic orbit");
  boost::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto [a, b] = boost::math::tools::toms748_solve(gap, lo, z, tol, iters);
  const double root = 0.5 * (a + b);
  if (spec.ratio_derivative(root) <= 1e-10 * omega / root)
    throw NoGroundState("turning point is degenerate (omega at the edge of the existence interval)");
  return root;
}

RVec ground_state_samples(const FieldSpec& spec, double omega, const Grid1D& grid, double ode_tol, RVec* dphi) {
  const double amp = std::sqrt(ground_state_amplitude_sq(spec, omega));
  const int half = grid.n / 2;
  std::vector<double> vals(half + 1), ders(half + 1);
  vals[0] = amp;
  ders[0] = 0.0;

  using State2 = std::array<double, 2>;
  auto second_order = [&](const State2& s, State2& ds, double) {
    ds[0] = s[1];
    ds[1] = omega * s[0] - spec.derivative(s[0] * s[0], 1) * s[0];
  };
  auto stepper2 = odeint::make_controlled(ode_tol, ode_tol, odeint::runge_kutta_fehlberg78<State2>());
  State2 s2{amp, 0.0};
  int k = 0;
  while (k < half && s2[0] > 0.5 * amp) {
    odeint::integrate_adaptive(stepper2, second_order, s2, k * grid.dx, (k + 1) * grid.dx, grid.dx / 8);
    ++k;
    vals[k] = s2[0];
    ders[k] = s2[1];
  }
  if (s2[0] > 0.5 * amp) throw GridTooSmall("profile does not decay inside the grid");

  // Log variable l = ln(phi) with l' = -sqrt(omega - G(phi^2)) enforces the first integral exactly.
  using State1 = std::array<double, 1>;
  auto slope = [&](double l) {
    const double z = std::exp(2.0 * l);
    return -std::sqrt(std::max(omega - spec.ratio(z), 0.0));
  };
  auto first_order = [&](const State1& s, State1& ds, double) { ds[0] = slope(s[0]); };
  auto stepper1 = odeint::make_controlled(ode_tol, ode_tol, odeint::runge_kutta_fehlberg78<State1>());
  State1 s1{std::log(s2[0])};
  for (; k < half; ++k) {
    odeint::integrate_adaptive(stepper1, first_order, s1, k * grid.dx, (k + 1) * grid.dx, grid.dx / 4);
    vals[k + 1] = std::exp(s1[0]);
    ders[k + 1] = vals[k + 1] * slope(s1[0]);
  }

  RVec phi(grid.n);
  if (dphi) dphi->resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const int m = i - half;
    phi[i] = vals[std::abs(m)];
    if (dphi) (*dphi)[i] = (m < 0 ? -1.0 : 1.0) * ders[std::abs(m)];
  }
  return phi;
}

SolitonProfile solve_ground_state(const FieldSpec& spec, double omega, const Grid1D& grid,
                                  const GroundStateOptions& opt) {
  SolitonProfile p;
  p.omega = omega;
  p.grid = grid;
  p.phi = ground_state_samples(spec, omega, grid, opt.ode_tol, &p.dphi);
  p.amplitude = p.phi[grid.zero_index()];
  const double edge = std::max(std::abs(p.phi[0]), std::abs(p.phi[grid.n - 1]));
  if (edge > opt.tail_tol) throw GridTooSmall("profile tail " + std::to_string(edge) + " at grid edge");
  p.mass = integrate(p.phi.cwiseAbs2().eval(), grid);

  const double h = opt.rel_step * omega;
  const RVec up = ground_state_samples(spec, omega + h, grid, opt.ode_tol);
  const RVec dn = ground_state_samples(spec, omega - h, grid, opt.ode_tol);
  p.domega_phi = (up - dn) / (2.0 * h);
  p.c_omega = (integrate(up.cwiseAbs2().eval(), grid) - integrate(dn.cwiseAbs2().eval(), grid)) / (2.0 * h);

  const double h2 = 10.0 * h;
  const RVec up2 = ground_state_samples(spec, omega + h2, grid, opt.ode_tol);
  const RVec dn2 = ground_state_samples(spec, omega - h2, grid, opt.ode_tol);
  p.domega2_phi = (up2 - 2.0 * p.phi + dn2) / (h2 * h2);
  return p;
}

double ground_state_residual(const SolitonProfile& prof, const FieldSpec& spec) {
  const RVec d2 = second_derivative_fd4(prof.phi, prof.grid.dx);
  double worst = 0.0;
  for (int i = 2; i < prof.grid.n - 2; ++i) {
    const double f = prof.phi[i];
    worst = std::max(worst, std::abs(d2[i] - prof.omega * f + spec.derivative(f * f, 1) * f));
  }
  return worst;
}

PotentialSet PotentialSet::zero(const Grid1D& grid, double L) {
  PotentialSet v;
  v.grid = grid;
  for (RVec* f : {&v.V1, &v.V2, &v.Vpp, &v.Vmm, &v.Vpm, &v.Vpmm, &v.Vppp, &v.Vmmm}) *f = RVec::Zero(grid.n);
  v.Vppm = RVec::Constant(grid.n, L);
  v.L_infinity = L;
  return v;
}

PotentialSet PotentialSet::linear(const Grid1D& grid, const RVec& V1, const RVec& V2) {
  PotentialSet v = zero(grid);
  v.V1 = V1;
  v.V2 = V2;
  return v;
}

PotentialSet linearization_potentials(const RVec& phi, const Grid1D& grid, const FieldSpec& spec) {
  PotentialSet v = PotentialSet::zero(grid, spec.L());
  for (int i = 0; i < grid.n; ++i) {
    const double f = phi[i];
    const double z = f * f;
    const double d1 = spec.derivative(z, 1);
    const double d2 = spec.derivative(z, 2);
    const double d3 = spec.derivative(z, 3);
    const double d4 = spec.derivative(z, 4);
    v.V1[i] = -(d1 + d2 * z);
    v.V2[i] = -d2 * z;
    v.Vpp[i] = d2 * f + 0.5 * d3 * z * f;
    v.Vmm[i] = 0.5 * d3 * z * f;
    v.Vpm[i] = 2.0 * d2 * f + d3 * z * f;
    v.Vppm[i] = d2 + 2.0 * d3 * z + 0.5 * d4 * z * z;
    v.Vpmm[i] = 1.5 * d3 * z + 0.5 * d4 * z * z;
    v.Vppp[i] = 0.5 * d3 * z + d4 * z * z / 6.0;
    v.Vmmm[i] = d4 * z * z / 6.0;
  }
  return v;
}

PotentialSet linearization_potentials(const SolitonProfile& profile, const FieldSpec& spec) {
  return linearization_potentials(profile.phi, profile.grid, spec);
}

}  // namespace ssw
