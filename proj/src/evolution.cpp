#include "ssw/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "ssw/errors.hpp"

namespace ssw {

namespace {

double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::string at_time(double t) {
  std::ostringstream os;
  os << " at t = " << t;
  return os.str();
}

}  // namespace

void SimConfig::validate() const {
  if (grid.n <= 0) throw ConfigParse("simulation grid is missing");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigParse("dt and t_end must be positive");
  if (soliton && !(omega0 > 0.0)) throw ConfigParse("omega0 must be positive");
  if (std::abs(epsilon) > 0.1) throw ConfigParse("perturbation amplitude must satisfy |epsilon| <= 0.1");
  if (sponge_width < 0.0 || sponge_width >= grid.x_max) throw ConfigParse("sponge width outside the grid");
  static const std::set<std::string> shapes = {"gaussian", "odd-gaussian", "sech", "none"};
  if (!shapes.count(perturbation)) throw ConfigParse("unknown perturbation shape '" + perturbation + "'");
}

double field_mass(const CVec& v, const Grid1D& grid) { return v.squaredNorm() * grid.dx; }

double field_hamiltonian(const CVec& v, const Grid1D& grid, const FieldSpec& spec, bool nonlinear) {
  const CVec dv = spectral_derivative(v, grid);
  double e = 0;
  for (int i = 0; i < grid.n; ++i) e += std::norm(dv[i]) - (nonlinear ? spec.F(std::norm(v[i])) : 0.0);
  return e * grid.dx;
}

CVec initial_field(const SimConfig& c) {
  const Grid1D& g = c.grid;
  CVec v = CVec::Zero(g.n);
  if (c.soliton) {
    const RVec phi = ground_state_samples(c.spec, c.omega0, g);
    for (int i = 0; i < g.n; ++i) v[i] = std::polar(phi[i], c.p0 * g.x(i));
  }
  if (c.perturbation == "none" || c.epsilon == 0.0) return v;
  for (int i = 0; i < g.n; ++i) {
    const double s = (g.x(i) - c.perturbation_center) / c.perturbation_width;
    double shape = 0;
    if (c.perturbation == "gaussian") shape = std::exp(-s * s);
    else if (c.perturbation == "odd-gaussian") shape = s * std::exp(-s * s);
    else shape = 1.0 / std::cosh(s);
    v[i] += c.epsilon * shape * std::polar(1.0, c.perturbation_kick * g.x(i));
  }
  return v;
}

SplitStep::SplitStep(const FieldSpec& spec, const Grid1D& grid, double dt, bool nonlinear, double sponge_width,
                     double sponge_strength)
    : spec_(spec), grid_(grid), dt_(dt), nonlinear_(nonlinear), fft_(std::make_unique<Fft>(grid.n)) {
  const auto& c = spec.coeffs();
  for (std::size_t k = 1; k < c.size(); ++k) fprime_.push_back(static_cast<double>(k) * c[k]);
  const RVec k = grid.wavenumbers();
  kinetic_phase_.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) kinetic_phase_[i] = std::polar(1.0, k[i] * k[i] * dt);
  sponge_ = RVec::Ones(grid.n);
  if (sponge_width > 0.0 && sponge_strength > 0.0) {
    const double start = grid.x_max - sponge_width;
    for (int i = 0; i < grid.n; ++i) {
      const double d = std::abs(grid.x(i)) - start;
      if (d > 0) sponge_[i] = std::exp(-sponge_strength * (d / sponge_width) * (d / sponge_width) * dt);
    }
  }
}

void SplitStep::nonlinear_phase(CVec& v, double tau) const {
  if (!nonlinear_) return;
  for (int i = 0; i < grid_.n; ++i) {
    const double z = std::norm(v[i]);
    double fp = 0;
    for (int k = static_cast<int>(fprime_.size()) - 1; k >= 0; --k) fp = fp * z + fprime_[k];
    v[i] *= std::polar(1.0, -fp * tau);
  }
}

void SplitStep::kinetic(CVec& v) {
  fft_->forward(v);
  v = v.cwiseProduct(kinetic_phase_);
  fft_->inverse(v);
  if (sponge_.minCoeff() < 1.0) v = v.cwiseProduct(sponge_.cast<cplx>());
}

void SplitStep::advance(CVec& v, long steps) {
  if (steps <= 0) return;
  nonlinear_phase(v, 0.5 * dt_);
  for (long s = 0; s < steps; ++s) {
    kinetic(v);
    nonlinear_phase(v, s + 1 == steps ? 0.5 * dt_ : dt_);
  }
}

LinearPropagator::LinearPropagator(const PotentialSet& pot, double omega, double dt)
    : grid_(pot.grid), dt_(dt), V1_(pot.V1), V2_(pot.V2), fft_(std::make_unique<Fft>(pot.grid.n)) {
  const RVec k = grid_.wavenumbers();
  phase_plus_.resize(grid_.n);
  phase_minus_.resize(grid_.n);
  for (int i = 0; i < grid_.n; ++i) {
    phase_plus_[i] = std::polar(1.0, (k[i] * k[i] + omega) * 0.5 * dt);
    phase_minus_[i] = std::conj(phase_plus_[i]);
  }
  cos_part_.resize(grid_.n);
  sin_part_.resize(grid_.n);
  for (int i = 0; i < grid_.n; ++i) {
    const cplx root = std::sqrt(cplx(V1_[i] * V1_[i] - V2_[i] * V2_[i]));
    cos_part_[i] = std::cos(dt * root);
    sin_part_[i] = std::abs(root) < 1e-12 ? cplx(dt) : std::sin(dt * root) / root;
  }
}

void LinearPropagator::kinetic(VectorState& u) {
  fft_->forward(u.u1);
  fft_->forward(u.u2);
  u.u1 = u.u1.cwiseProduct(phase_plus_);
  u.u2 = u.u2.cwiseProduct(phase_minus_);
  fft_->inverse(u.u1);
  fft_->inverse(u.u2);
}

void LinearPropagator::advance(VectorState& u, long steps) {
  const cplx I(0.0, 1.0);
  for (long s = 0; s < steps; ++s) {
    kinetic(u);
    for (int i = 0; i < grid_.n; ++i) {
      const cplx a = u.u1[i], b = u.u2[i];
      const cplx ma = V1_[i] * a + V2_[i] * b, mb = -V2_[i] * a - V1_[i] * b;
      u.u1[i] = cos_part_[i] * a + I * sin_part_[i] * ma;
      u.u2[i] = cos_part_[i] * b + I * sin_part_[i] * mb;
    }
    kinetic(u);
  }
}

SimRecord run_simulation(const SimConfig& config) {
  config.validate();
  const Grid1D& g = config.grid;
  SimRecord rec;
  rec.config = config;
  CVec v = initial_field(config);
  SplitStep stepper(config.spec, g, config.dt, config.nonlinear, config.sponge_width, config.sponge_strength);

  const long total = std::lround(config.t_end / config.dt);
  std::set<long> samples = {0, total};
  if (config.sample_every > 0)
    for (long s = 0; s <= total; s += config.sample_every) samples.insert(s);
  for (double t : config.sample_times) {
    const long s = std::lround(t / config.dt);
    if (s >= 0 && s <= total) samples.insert(s);
  }

  const double sup0 = max_abs(v);
  const double mass0 = field_mass(v, g);
  const double ham0 = field_hamiltonian(v, g, config.spec, config.nonlinear);
  ModulationState guess;
  guess.omega = config.omega0;
  guess.p = config.p0;
  double last_t = 0.0;
  long at = 0;
  for (long s : samples) {
    stepper.advance(v, s - at);
    at = s;
    const double t = s * config.dt;
    if (!v.allFinite() || max_abs(v) > config.blowup_factor * sup0)
      throw BlowupDetected("sup norm exceeded " + std::to_string(config.blowup_factor) + " x initial" + at_time(t));
    rec.times.push_back(t);
    const double mass = field_mass(v, g);
    rec.mass.push_back(mass);
    rec.hamiltonian.push_back(field_hamiltonian(v, g, config.spec, config.nonlinear));
    CVec u;
    if (config.soliton && config.fit_modulation) {
      const double dt = t - last_t;
      guess.gamma += (guess.omega - guess.p * guess.p) * dt;
      guess.y += 2.0 * guess.p * dt;
      FitResult fit;
      try {
        fit = fit_parameters(v, guess, config.spec, g);
      } catch (const NewtonDivergence& e) {
        throw NewtonDivergence(std::string(e.what()) + at_time(t));
      }
      guess = fit.state;
      rec.modulation.push_back(fit.state);
      u = fit.U.u1;
      rec.pythagoras_defect.push_back(
          std::abs(mass - fit.frame.profile.mass - field_mass(u, g)) / mass);
    } else {
      u = v;
      rec.pythagoras_defect.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    rec.u_sup.push_back(max_abs(u));
    double local = 0;
    for (int i = 0; i < g.n; ++i) local = std::max(local, std::abs(u[i]) / std::sqrt(1.0 + g.x(i) * g.x(i)));
    rec.u_local.push_back(local);
    if (config.keep_fields) rec.fields.push_back(v);
    last_t = t;
  }

  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    rec.max_mass_drift = std::max(rec.max_mass_drift, std::abs(rec.mass[k] - mass0) / mass0);
    rec.max_hamiltonian_drift =
        std::max(rec.max_hamiltonian_drift, std::abs(rec.hamiltonian[k] - ham0) / std::max(std::abs(ham0), 1e-300));
  }
  const bool sponge = config.sponge_width > 0.0 && config.sponge_strength > 0.0;
  if (!sponge) {
    if (rec.max_mass_drift > config.mass_tolerance * std::max(1.0, config.t_end))
      throw InvariantFailure("mass drift " + std::to_string(rec.max_mass_drift));
    if (rec.max_hamiltonian_drift > config.hamiltonian_tolerance)
      throw InvariantFailure("Hamiltonian drift " + std::to_string(rec.max_hamiltonian_drift));
  }
  return rec;
}

void analyze_record(SimRecord& rec, const AnalysisOptions& opt) {
  const SimConfig& c = rec.config;
  const Grid1D& g = c.grid;
  if (rec.fields.size() != rec.times.size()) throw ConfigParse("analysis needs the stored fields");
  rec.spectra.clear();
  rec.discrete.clear();
  if (!c.soliton || !c.fit_modulation) {
    for (std::size_t k = 0; k < rec.times.size(); ++k) rec.spectra.push_back(flat_profile(rec.fields[k], g, rec.times[k], opt.xi_max));
    return;
  }
  const ModulationState& last = rec.modulation.back();
  const SolitonFrame frame = make_frame(c.spec, last.omega, g);
  const XiGrid xg = XiGrid::composite(opt.xi_step, opt.xi_max, opt.xi_step, opt.xi_max);
  const EigenBasis basis = opt.use_cache ? cached_eigenbasis(frame.potentials, last.omega, xg, opt.basis)
                                         : build_eigenbasis(frame.potentials, last.omega, xg, opt.basis);
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    ModulationState s = rec.modulation[k];
    s.p = last.p;
    s.omega = last.omega;
    const VectorState U = radiation(rec.fields[k], s, frame.profile);
    const Projection proj = project_essential(U, frame.kernel);
    rec.discrete.push_back(proj.a);
    rec.spectra.push_back(propagate_linear(forward_transform(proj.essential, g, basis), -rec.times[k], last.omega));
  }
}

DistortedSpectrum flat_profile(const CVec& v, const Grid1D& g, double t, double xi_max) {
  Fft fft(g.n);
  CVec h = v;
  fft.forward(h);
  const RVec k = g.wavenumbers();
  std::vector<int> idx;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(k[i]) <= xi_max) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return k[a] < k[b]; });
  DistortedSpectrum s;
  const double norm = g.dx / std::sqrt(2.0 * kPi);
  const double dk = 2.0 * kPi / (g.n * g.dx);
  s.f_plus.resize(idx.size());
  s.f_minus = CVec::Zero(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const double xi = k[idx[j]];
    s.xi.push_back(xi);
    s.weights.push_back(dk);
    s.f_plus[j] = norm * h[idx[j]] * std::polar(1.0, xi * g.x_max - xi * xi * t);
  }
  return s;
}

DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& series, double t0, double t1) {
  std::vector<double> lx, ly;
  double lo = 1e300, hi = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t0 || times[k] > t1 || !(series[k] > 0)) continue;
    lx.push_back(std::log(times[k]));
    ly.push_back(std::log(series[k]));
    lo = std::min(lo, times[k]);
    hi = std::max(hi, times[k]);
  }
  if (lx.size() < 3 || hi < 9.99 * lo) throw WindowTooShort("decay fit needs at least one decade with 3 samples");
  const int n = static_cast<int>(lx.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lx[i];
    b[i] = ly[i];
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  DecayFit f;
  f.prefactor = std::exp(sol[0]);
  f.exponent = sol[1];
  f.t0 = lo;
  f.t1 = hi;
  f.fit_residual = std::sqrt((A * sol - b).squaredNorm() / n);
  return f;
}

DecayFits decay_fit(const SimRecord& rec, double t0, double t1) {
  if (t1 < 0) t1 = rec.times.empty() ? 0.0 : rec.times.back();
  return {decay_fit(rec.times, rec.u_sup, t0, t1), decay_fit(rec.times, rec.u_local, t0, t1)};
}

PhaseReport modified_scattering_phase(const std::vector<double>& times, const std::vector<DistortedSpectrum>& spectra,
                                      double L, double t0, double t1, double band_lo, double band_hi) {
  if (times.size() != spectra.size() || spectra.empty()) throw ConfigParse("spectra and times differ");
  std::vector<int> snaps;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= t0 && times[k] <= t1 && times[k] > 0) snaps.push_back(static_cast<int>(k));
  if (snaps.size() < 3) throw WindowTooShort("phase regression needs at least 3 snapshots");
  PhaseReport rep;
  double sum_slope = 0, sum_target = 0;
  const DistortedSpectrum& ref = spectra[snaps.front()];
  for (std::size_t j = 0; j < ref.xi.size(); ++j) {
    const double xi = std::abs(ref.xi[j]);
    if (xi < band_lo || xi > band_hi) continue;
    std::vector<double> lt, ph, mod;
    double prev = 0;
    for (std::size_t q = 0; q < snaps.size(); ++q) {
      const cplx f = spectra[snaps[q]].f_plus[j];
      double a = std::arg(f);
      if (q > 0) {
        double d = std::remainder(a - prev, 2 * kPi);
        if (std::abs(d) > 1.0)
          throw PhaseUnwrapFailure("phase step " + std::to_string(d) + " at xi = " + std::to_string(ref.xi[j]));
        a = ph.back() + d;
      }
      prev = std::arg(f);
      lt.push_back(std::log(times[snaps[q]]));
      ph.push_back(a);
      mod.push_back(std::abs(f));
    }
    const int n = static_cast<int>(lt.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) mx += lt[i] / n, my += ph[i] / n;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < n; ++i) sxy += (lt[i] - mx) * (ph[i] - my), sxx += (lt[i] - mx) * (lt[i] - mx);
    const double slope = sxy / sxx;
    double mean_sq = 0, mean_mod = 0;
    for (double m : mod) mean_sq += m * m / n, mean_mod += m / n;
    const double target = -0.5 * L * mean_sq;
    const auto [mn, mxm] = std::minmax_element(mod.begin(), mod.end());
    rep.xi.push_back(ref.xi[j]);
    rep.slope.push_back(slope);
    rep.target.push_back(target);
    rep.deviation.push_back(target != 0.0 ? std::abs(slope / target - 1.0) : std::abs(slope));
    rep.modulus_drift.push_back(mean_mod > 0 ? (*mxm - *mn) / mean_mod : 0.0);
    rep.max_modulus_drift = std::max(rep.max_modulus_drift, rep.modulus_drift.back());
    sum_slope += slope;
    sum_target += target;
  }
  rep.band_ratio = sum_target != 0.0 ? sum_slope / sum_target : 0.0;
  return rep;
}

TrappedNorms trapped_norms(const std::vector<double>& times, const std::vector<DistortedSpectrum>& spectra,
                           double alpha) {
  TrappedNorms out;
  double env_sup = 0, env_h1 = 0;
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    const DistortedSpectrum& s = spectra[k];
    double h1 = 0;
    for (std::size_t j = 0; j < s.xi.size(); ++j) {
      h1 += s.weights[j] * (std::norm(s.f_plus[j]) + std::norm(s.f_minus[j]));
      if (j + 1 < s.xi.size()) {
        const double d = s.xi[j + 1] - s.xi[j];
        h1 += (std::norm(s.f_plus[j + 1] - s.f_plus[j]) + std::norm(s.f_minus[j + 1] - s.f_minus[j])) / d;
      }
    }
    const double sup = s.xi.empty() ? 0.0 : s.sup_norm();
    const double weighted = std::pow(1.0 + times[k] * times[k], -0.5 * alpha) * std::sqrt(h1);
    env_sup = std::max(env_sup, sup);
    env_h1 = std::max(env_h1, weighted);
    out.sup.push_back(sup);
    out.weighted_h1.push_back(weighted);
    out.sup_envelope.push_back(env_sup);
    out.h1_envelope.push_back(env_h1);
  }
  return out;
}

}  // namespace ssw
