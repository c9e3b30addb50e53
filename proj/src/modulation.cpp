#include "ssw/modulation.hpp"

#include <cmath>
#include <string>

#include "ssw/errors.hpp"

namespace ssw {

namespace {

// Component of <U, sigma3 Xi_j> that carries information for real-representing U.
double realify(cplx c, int j) { return (j == 0 || j == 3) ? c.real() : c.imag(); }

cplx f_prime(const FieldSpec& spec, cplx z) {
  const auto& c = spec.coeffs();
  cplx sum = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) sum = sum * z + static_cast<double>(k) * c[k];
  return sum;
}

CVec phase(const Grid1D& g, double p, double shift, double gamma) {
  CVec e(g.n);
  for (int i = 0; i < g.n; ++i) e[i] = std::polar(1.0, p * (g.x(i) - shift) - gamma);
  return e;
}

}  // namespace

SolitonFrame make_frame(const FieldSpec& spec, double omega, const Grid1D& grid, const GroundStateOptions& opt) {
  SolitonFrame f;
  f.profile = solve_ground_state(spec, omega, grid, opt);
  f.potentials = linearization_potentials(f.profile, spec);
  const DiscretizedOperator op = assemble_operator(f.potentials, omega, grid);
  f.kernel = generalized_kernel(f.profile, spec, op);

  const SolitonProfile& pr = f.profile;
  const RVec x = grid.points();
  const RVec dw_dphi = spectral_derivative(pr.domega_phi.cast<cplx>(), grid).real();
  RVec d2phi(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double phi = pr.phi[i];
    d2phi[i] = omega * phi - spec.derivative(phi * phi, 1) * phi;
  }
  const RVec x_dw = x.cwiseProduct(pr.domega_phi);
  f.d_omega[0] = VectorState::real(pr.domega_phi, -pr.domega_phi);
  f.d_omega[1] = VectorState::real(pr.domega2_phi, pr.domega2_phi);
  f.d_omega[2] = VectorState::real(dw_dphi, dw_dphi);
  f.d_omega[3] = VectorState::real(x_dw, -x_dw);
  const RVec d3 = pr.phi + x.cwiseProduct(pr.dphi);
  f.d_x[0] = VectorState::real(pr.dphi, -pr.dphi);
  f.d_x[1] = VectorState::real(dw_dphi, dw_dphi);
  f.d_x[2] = VectorState::real(d2phi, d2phi);
  f.d_x[3] = VectorState::real(d3, -d3);
  return f;
}

CVec synthesize_field(const ModulationState& s, const CVec& u, const FieldSpec& spec, const Grid1D& grid) {
  const RVec phi = ground_state_samples(spec, s.omega, grid);
  CVec w = phi.cast<cplx>();
  if (u.size() == grid.n) w += u;
  const CVec shifted = s.y == 0.0 ? w : spectral_shift(w, grid, s.y);
  return phase(grid, s.p, 0.0, s.gamma).cwiseProduct(shifted);
}

VectorState radiation(const CVec& v, const ModulationState& s, const SolitonProfile& profile) {
  const Grid1D& g = profile.grid;
  const CVec shifted = s.y == 0.0 ? v : spectral_shift(v, g, -s.y);
  CVec u = phase(g, -s.p, s.y, -s.gamma).cwiseProduct(shifted);
  u -= profile.phi.cast<cplx>();
  return VectorState::from_scalar(u);
}

OrthogonalityMap orthogonality_map(const CVec& v, const ModulationState& s, const SolitonFrame& frame) {
  const Grid1D& g = frame.profile.grid;
  const VectorState U = radiation(v, s, frame.profile);
  const CVec w = U.u1 + frame.profile.phi.cast<cplx>();
  const CVec dw = spectral_derivative(w, g);
  CVec zw(g.n);
  for (int i = 0; i < g.n; ++i) zw[i] = (g.x(i) - s.y) * w[i];
  const cplx I(0.0, 1.0);
  const CVec dphi_w = frame.profile.domega_phi.cast<cplx>();
  const std::array<VectorState, 4> dU = {
      VectorState::from_scalar(I * w),
      VectorState::from_scalar(-I * zw),
      VectorState::from_scalar(-dw),
      VectorState::from_scalar(-dphi_w),
  };
  OrthogonalityMap m;
  for (int j = 0; j < 4; ++j) {
    const VectorState dual = frame.kernel.xi[j].sigma3();
    m.theta[j] = realify(inner(U, dual, g), j);
    for (int k = 0; k < 4; ++k) m.jacobian(j, k) = realify(inner(dU[k], dual, g), j);
    m.jacobian(j, 3) += realify(inner(U, frame.d_omega[j].sigma3(), g), j);
  }
  return m;
}

FitResult fit_parameters(const CVec& v, double omega0, const FieldSpec& spec, const Grid1D& grid,
                         const FitOptions& opt) {
  ModulationState guess;
  guess.omega = omega0;
  return fit_parameters(v, guess, spec, grid, opt);
}

FitResult fit_parameters(const CVec& v, const ModulationState& guess, const FieldSpec& spec, const Grid1D& grid,
                         const FitOptions& opt) {
  if (v.size() != grid.n) throw ConfigParse("field and grid sizes differ");
  const double v_norm = std::sqrt(v.squaredNorm() * grid.dx);
  FitResult r;
  r.state = guess;
  r.state.residuals = {};
  r.frame = make_frame(spec, r.state.omega, grid, opt.ground);
  std::array<double, 4> xi_norm{};
  for (int it = 0; it <= opt.max_iterations; ++it) {
    for (int j = 0; j < 4; ++j) xi_norm[j] = norm(r.frame.kernel.xi[j], grid);
    const OrthogonalityMap m = orthogonality_map(v, r.state, r.frame);
    const VectorState U = radiation(v, r.state, r.frame.profile);
    const double u_norm = norm(U, grid) / std::sqrt(2.0);
    const double scale = std::max(u_norm, 1e-3 * v_norm);
    double worst = 0;
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(m.theta[j]) / (xi_norm[j] * scale));
    if (!std::isfinite(worst)) throw NewtonDivergence("non-finite orthogonality residual");
    if (worst < opt.tolerance) {
      for (int j = 0; j < 4; ++j) r.state.residuals[j] = m.theta[j] / xi_norm[j];
      r.state.u_norm = u_norm;
      r.U = U;
      r.iterations = it;
      return r;
    }
    if (it == opt.max_iterations) break;
    const Eigen::Vector4d step = m.jacobian.fullPivLu().solve(m.theta);
    if (!step.allFinite()) throw NewtonDivergence("singular Jacobian");
    // Damped update keeping the frequency admissible.
    double lambda = 1.0;
    for (int attempt = 0;; ++attempt) {
      ModulationState trial = r.state;
      trial.gamma -= lambda * step[0];
      trial.p -= lambda * step[1];
      trial.y -= lambda * step[2];
      trial.omega -= lambda * step[3];
      try {
        if (trial.omega <= 0) throw NoGroundState("non-positive frequency");
        SolitonFrame frame = trial.omega == r.state.omega ? r.frame : make_frame(spec, trial.omega, grid, opt.ground);
        r.state = trial;
        r.frame = std::move(frame);
        break;
      } catch (const NoGroundState&) {
        if (attempt > 20) throw NewtonDivergence("frequency left the admissible range");
        lambda *= 0.5;
      }
    }
  }
  throw NewtonDivergence("no convergence after " + std::to_string(opt.max_iterations) + " iterations");
}

VectorState nonlinear_term(const VectorState& U, const SolitonProfile& profile, const FieldSpec& spec,
                           const PotentialSet& pot) {
  const int n = U.size();
  VectorState out = VectorState::zero(n);
  for (int i = 0; i < n; ++i) {
    const double phi = profile.phi[i];
    const cplx a = U.u1[i], b = U.u2[i];
    const cplx full_a = f_prime(spec, (phi + a) * (phi + b)) * (phi + a);
    const cplx full_b = f_prime(spec, (phi + b) * (phi + a)) * (phi + b);
    const double base = spec.derivative(phi * phi, 1) * phi;
    out.u1[i] = full_a - base + pot.V1[i] * a + pot.V2[i] * b;
    out.u2[i] = -(full_b - base + pot.V1[i] * b + pot.V2[i] * a);
  }
  return out;
}

Eigen::Matrix4cd modulation_matrix(const VectorState& U, const SolitonFrame& frame) {
  const KernelBasis& kb = frame.kernel;
  const Grid1D& g = kb.grid;
  const RVec x = g.points();
  Eigen::Matrix4cd M = kb.m0.transpose().cast<cplx>();
  for (int j = 0; j < 4; ++j) {
    const VectorState& xi = kb.xi[j];
    const VectorState x_xi(x.cast<cplx>().cwiseProduct(xi.u1), x.cast<cplx>().cwiseProduct(xi.u2));
    M(j, 0) += inner(U, xi, g);
    M(j, 1) -= inner(U, frame.d_omega[j].sigma3(), g);
    M(j, 2) -= inner(U, frame.d_x[j].sigma3(), g);
    M(j, 3) += inner(U, x_xi, g);
  }
  return M;
}

ModulationRates modulation_rhs(const ModulationState&, const VectorState& U, const SolitonFrame& frame,
                               const FieldSpec& spec) {
  const Grid1D& g = frame.kernel.grid;
  const Eigen::Matrix4cd M = modulation_matrix(U, frame);
  const Eigen::JacobiSVD<Eigen::Matrix4cd> svd(M);
  const auto sv = svd.singularValues();
  ModulationRates r;
  r.condition = sv[0] / sv[3];
  if (!(r.condition <= 1e8)) throw SingularM("cond(M) = " + std::to_string(r.condition));
  const VectorState nl = nonlinear_term(U, frame.profile, spec, frame.potentials);
  Eigen::Vector4cd N;
  for (int j = 0; j < 4; ++j) N[j] = -inner(nl, frame.kernel.xi[j].sigma3(), g);
  const Eigen::Vector4cd x = M.partialPivLu().solve(N);
  const cplx I(0.0, 1.0);
  const cplx omega_dot = I * x[1];
  const cplx y_defect = -I * x[2];
  r.gamma_dot_defect = x[0].real();
  r.omega_dot = omega_dot.real();
  r.y_dot_defect = y_defect.real();
  r.p_dot = x[3].real();
  r.imaginary_leftover =
      std::max({std::abs(x[0].imag()), std::abs(omega_dot.imag()), std::abs(y_defect.imag()), std::abs(x[3].imag())});
  return r;
}

}  // namespace ssw
