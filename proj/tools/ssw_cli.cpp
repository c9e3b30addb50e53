// Command-line front end: profile, spectrum, scattering, dft-check, simulate, analyze, verify-all.
//
// Exit status: 0 when every asserted check passes, 2 on ConfigParse, 3 on InvariantFailure,
// 4 on any other library error, 1 on unexpected failures.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>

#include "ssw/asymptotics.hpp"
#include "ssw/dft.hpp"
#include "ssw/errors.hpp"
#include "ssw/evolution.hpp"
#include "ssw/io.hpp"
#include "ssw/modulation.hpp"
#include "ssw/parallel.hpp"
#include "ssw/profiles.hpp"
#include "ssw/scattering.hpp"
#include "ssw/spectrum.hpp"

using namespace ssw;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "ssw_out";
  int threads = 1;
  double tol_scale = 1.0;
  std::string field, family, record;
  std::optional<double> omega;
};

// Named pass/fail checks collected into the report and the manifest.
class CheckList {
 public:
  explicit CheckList(double tol_scale) : scale_(tol_scale) {}

  // Passes when value < tolerance * tol_scale.
  void below(const std::string& name, double value, double tolerance) {
    const double limit = tolerance * scale_;
    add(name, std::isfinite(value) && value < limit, Json{{"value", value}, {"limit", limit}});
  }
  void expect(const std::string& name, bool pass, Json detail = Json::object()) { add(name, pass, std::move(detail)); }
  void note(const std::string& name, Json detail) { notes_[name] = std::move(detail); }

  bool passed() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  Json to_json() const { return Json{{"checks", checks_}, {"notes", notes_}, {"passed", passed()}}; }

 private:
  void add(const std::string& name, bool pass, Json detail) {
    detail["pass"] = pass;
    checks_[name] = std::move(detail);
    std::printf("%-40s %s\n", name.c_str(), pass ? "PASS" : "FAIL");
    if (!pass) failures_.push_back(name);
  }
  double scale_;
  Json checks_ = Json::object();
  Json notes_ = Json::object();
  std::vector<std::string> failures_;
};

Json merged_config(const Options& o) {
  Json c = o.config_path.empty() ? Json::object() : load_config(o.config_path);
  if (!o.field.empty()) c.erase("family"), c["F"] = o.field;
  if (!o.family.empty()) c.erase("F"), c["family"] = o.family;
  if (o.omega) c["omega"] = *o.omega;
  if (!c.contains("F") && !c.contains("family")) throw ConfigParse("no nonlinearity given (use 'F' or 'family')");
  return c;
}

double omega_of(const Json& c) {
  const std::string family = get_string(c, "family", "");
  const double w = get_number(c, "omega", family.empty() ? 1.0 : family_default_omega(family));
  if (!(w > 0.0)) throw ConfigParse("omega must be positive");
  return w;
}

Grid1D grid_of(const Json& c, double omega, int default_n = 4096) {
  if (!c.contains("grid")) return Grid1D::for_omega(omega, default_n);
  const Json& g = c["grid"];
  if (!g.is_object()) throw ConfigParse("'grid' must be an object");
  const int n = get_int(g, "n", default_n);
  const double x_max = get_number(g, "x_max", 40.0 / std::sqrt(omega));
  if (!(x_max > 0.0) || !is_power_of_two(n)) throw ConfigParse("grid needs x_max > 0 and n a power of two");
  return Grid1D(x_max, n);
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigParse("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

// Soliton data shared by several subcommands.
struct Family {
  FieldSpec spec;
  double omega;
  Grid1D grid;
  SolitonProfile profile;
  PotentialSet pot;
};

Family make_family(const Json& c, int default_n = 4096) {
  Family f{field_from_config(c), omega_of(c), {}, {}, {}};
  f.grid = grid_of(c, f.omega, default_n);
  f.profile = solve_ground_state(f.spec, f.omega, f.grid);
  f.pot = linearization_potentials(f.profile, f.spec);
  return f;
}

XiGrid xi_grid_of(const Json& c) {
  const Json x = c.contains("xi") ? c["xi"] : Json::object();
  return XiGrid::hybrid(get_number(x, "min", 1e-3), get_number(x, "max", 10.0), get_int(x, "count", 160));
}

VectorState seeded_state(const Grid1D& g, unsigned seed, double width) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const double shift = 0.3 * N(rng);
  cplx a[4], b[4];
  for (int k = 0; k < 4; ++k) a[k] = {N(rng), N(rng)}, b[k] = {N(rng), N(rng)};
  VectorState s = VectorState::zero(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i) / width - shift;
    const double e = std::exp(-x * x);
    s.u1[i] = e * (a[0] + x * (a[1] + x * (a[2] + x * a[3])));
    s.u2[i] = e * (b[0] + x * (b[1] + x * (b[2] + x * b[3])));
  }
  return s;
}

// ---------------------------------------------------------------- subcommands

void run_profile(const Json& c, const fs::path& out, CheckList& checks, RunManifest& m) {
  const Family f = make_family(c);
  write_profile_csv((out / "profile.csv").string(), f.profile);
  const double residual = ground_state_residual(f.profile, f.spec);
  write_json(out / "profile.json", Json{{"omega", f.omega},
                                         {"amplitude", f.profile.amplitude},
                                         {"mass", f.profile.mass},
                                         {"d_mass_d_omega", f.profile.c_omega},
                                         {"residual", residual}});
  checks.below("ground_state_residual", residual, 1e-5);
  m.grids.push_back(to_json(f.grid));
}

void run_spectrum(const Json& c, const fs::path& out, CheckList& checks, RunManifest& m) {
  const Family f = make_family(c);
  const DiscretizedOperator op = assemble_operator(f.pot, f.omega, f.grid);
  const KernelBasis kb = generalized_kernel(f.profile, f.spec, op);
  const auto res = kernel_residuals(kb, op);
  const ModeReport modes = discrete_eigenvalues(op, kb);
  Json unstable = Json::array();
  for (cplx z : modes.unstable) unstable.push_back({z.real(), z.imag()});
  write_json(out / "spectrum.json", Json{{"omega", f.omega},
                                          {"internal_modes", modes.eigenvalues},
                                          {"unstable", unstable},
                                          {"resonance_flag", modes.resonance_flag},
                                          {"det_D0", {modes.det_D0.real(), modes.det_D0.imag()}},
                                          {"min_singular_value_D0", modes.min_singular_value_D0},
                                          {"kernel_residuals", res}});
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < f.grid.n; ++i) rows.push_back({f.grid.x(i), f.pot.V1[i], f.pot.V2[i]});
  write_csv((out / "potentials.csv").string(), {"x", "V1", "V2"}, rows);
  for (int j = 0; j < 4; ++j) checks.below("kernel_relation_" + std::to_string(j), res[j], 1e-6);
  m.grids.push_back(to_json(f.grid));
}

void run_scattering(const Json& c, const fs::path& out, CheckList& checks, RunManifest& m) {
  const Family f = make_family(c);
  const XiGrid xg = xi_grid_of(c);
  const ScatteringData d = scattering_scan(f.pot, f.omega, xg.nodes);
  write_scattering_csv((out / "scattering.csv").string(), d);
  ResonanceOptions ro;
  ro.relative_threshold = get_number(c, "resonance_threshold", ro.relative_threshold);
  const ResonanceReport rep = resonance_test(f.pot, f.omega, ro);
  write_json(out / "resonance.json", to_json(rep));
  std::printf("resonant = %s (extrapolated singular value %.3e, threshold %.3e)\n", rep.resonant ? "true" : "false",
              rep.extrapolated_singular_value, rep.threshold);
  checks.below("unitarity", d.unitarity_defect, 1e-5);
  checks.below("reflection_symmetry", d.symmetry_defect, 1e-5);
  m.grids.push_back(to_json(f.grid));
  m.grids.push_back(Json{{"xi_min", xg.nodes.empty() ? 0.0 : xg.positive().front()},
                         {"xi_max", xg.nodes.empty() ? 0.0 : xg.nodes.back()},
                         {"count", xg.size()}});
}

void run_dft_check(const Json& c, const fs::path& out, CheckList& checks, RunManifest& m) {
  const Family f = make_family(c);
  const DiscretizedOperator op = assemble_operator(f.pot, f.omega, f.grid);
  const KernelBasis kb = generalized_kernel(f.profile, f.spec, op);
  const double xi_max = get_number(c, "xi_max", 10.0);
  const int states = get_int(c, "states", 4);
  std::vector<VectorState> pe;
  for (int s = 0; s < states; ++s) pe.push_back(project_essential(seeded_state(f.grid, 11 + s, 3.0), kb).essential);

  std::vector<std::vector<double>> rows;
  std::vector<double> h, err;
  for (double factor : {0.75, 1.125, 1.6875}) {
    const XiGrid xg = dft_grid(factor * 80.0, xi_max);
    const EigenBasis b = cached_eigenbasis(f.pot, f.omega, xg);
    double worst = 0;
    for (const VectorState& s : pe)
      worst = std::max(worst, norm(inverse_transform(forward_transform(s, b), b) - s, f.grid) / norm(s, f.grid));
    h.push_back(xg.weights[0]);
    err.push_back(worst);
    rows.push_back({xg.weights[0], worst});
  }
  write_csv((out / "round_trip.csv").string(), {"xi_step", "relative_error"}, rows);
  const EigenBasis full = cached_eigenbasis(f.pot, f.omega, dft_grid(2.0 * f.grid.x_max, xi_max));
  const double defect = diagonalization_defect(full, op, pe);
  double order = 1e9;
  for (std::size_t k = 1; k < err.size(); ++k)
    order = std::min(order, std::log(err[k - 1] / err[k]) / std::log(h[k - 1] / h[k]));
  write_json(out / "dft.json", Json{{"round_trip_errors", err}, {"xi_steps", h}, {"observed_order", order},
                                     {"diagonalization_defect", defect}});
  checks.below("round_trip", err.back(), 1e-3);
  checks.expect("round_trip_order", order >= 1.0, Json{{"value", order}, {"limit", 1.0}});
  checks.below("diagonalization_defect", defect, 1e-3);
  m.grids.push_back(to_json(f.grid));
}

void run_simulate(const Json& c, const fs::path& out, CheckList& checks, RunManifest& m) {
  const SimConfig cfg = sim_config_from_json(c);
  const SimRecord r = run_simulation(cfg);
  write_record(out.string(), r);
  double pyth = 0;
  for (double d : r.pythagoras_defect) pyth = std::max(pyth, d);
  checks.note("drift", Json{{"mass", r.max_mass_drift}, {"hamiltonian", r.max_hamiltonian_drift}});
  if (cfg.soliton && cfg.fit_modulation) checks.below("pythagoras_defect", pyth, 1e-8);
  checks.expect("samples_recorded", r.times.size() >= 2, Json{{"value", r.times.size()}});
  m.grids.push_back(to_json(cfg.grid));
}

void run_analyze(const Json& c, const std::string& record_dir, const fs::path& out, CheckList& checks,
                 RunManifest& m) {
  SimRecord r = read_record(record_dir);
  AnalysisOptions opt;
  opt.xi_max = get_number(c, "xi_max", opt.xi_max);
  opt.xi_step = get_number(c, "xi_step", opt.xi_step);
  analyze_record(r, opt);
  write_record(out.string(), r);
  fs::remove_all(out / "fields");
  bool finite = true;
  for (const auto& s : r.spectra) finite = finite && s.f_plus.allFinite() && s.f_minus.allFinite();
  checks.expect("spectra_finite", finite);

  const double t0 = get_number(c, "t0", 10.0), t1 = get_number(c, "t1", r.times.back());
  Json report = Json::object();
  try {
    const DecayFits fits = decay_fit(r, t0, t1);
    report["decay"] = {{"global_exponent", fits.global.exponent}, {"local_exponent", fits.local.exponent},
                       {"t0", fits.global.t0}, {"t1", fits.global.t1}};
  } catch (const WindowTooShort& e) {
    report["decay"] = {{"skipped", e.what()}};
  }
  const double L = r.config.spec.L();
  try {
    const PhaseReport ph = modified_scattering_phase(r.times, r.spectra, L, t0, t1);
    report["phase"] = {{"band_ratio", ph.band_ratio}, {"max_modulus_drift", ph.max_modulus_drift}};
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < ph.xi.size(); ++j)
      rows.push_back({ph.xi[j], ph.slope[j], ph.target[j], ph.modulus_drift[j]});
    write_csv((out / "phase.csv").string(), {"xi", "slope", "target", "modulus_drift"}, rows);
    const OdeResidual ode = asymptotic_ode_residual(r.times, r.spectra, L, t0, t1);
    report["ode_residual_ratio"] = ode.ratio;
  } catch (const WindowTooShort& e) {
    report["phase"] = {{"skipped", e.what()}};
  } catch (const PhaseUnwrapFailure& e) {
    report["phase"] = {{"skipped", e.what()}};
  }
  const TrappedNorms tn = trapped_norms(r.times, r.spectra, get_number(c, "alpha", 0.1));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.times.size(); ++k) rows.push_back({r.times[k], tn.sup[k], tn.weighted_h1[k]});
  write_csv((out / "trapped_norms.csv").string(), {"t", "sup", "weighted_h1"}, rows);
  write_json(out / "analysis.json", report);
  m.grids.push_back(to_json(r.config.grid));
}

// Aggregate of module checks for one family.
void run_verify_all(const Json& c, const fs::path& out, CheckList& checks, RunManifest& m) {
  const Family f = make_family(c, 8192);
  const std::string family = get_string(c, "family", "");
  m.grids.push_back(to_json(f.grid));

  checks.below("profile.residual", ground_state_residual(f.profile, f.spec), 1e-5);

  const DiscretizedOperator op = assemble_operator(f.pot, f.omega, f.grid);
  std::optional<KernelBasis> kb;
  bool has_modes = false;
  try {
    kb = generalized_kernel(f.profile, f.spec, op);
  } catch (const DegenerateKernel& e) {
    checks.expect("spectrum.kernel", false, Json{{"error", e.what()}});
  }
  if (kb) {
    const auto res = kernel_residuals(*kb, op);
    checks.below("spectrum.kernel_relations", *std::max_element(res.begin(), res.end()), 1e-6);
    const ModeReport modes = discrete_eigenvalues(op, *kb);
    checks.expect("spectrum.no_unstable_modes", modes.unstable.empty(), Json{{"count", modes.unstable.size()}});
    checks.note("spectrum.internal_modes", modes.eigenvalues);
    has_modes = !modes.eigenvalues.empty() || !modes.unstable.empty();
    if (family == "cubic") checks.expect("spectrum.no_internal_modes", modes.eigenvalues.empty());
    if (family == "cubic-quintic-minus") checks.expect("spectrum.no_internal_modes", modes.eigenvalues.empty());
    if (family == "cubic-quintic-plus")
      checks.expect("spectrum.internal_mode_pair", modes.eigenvalues.size() >= 2,
                    Json{{"modes", modes.eigenvalues}});
  }

  const ScatteringData scan = scattering_scan(f.pot, f.omega, XiGrid::hybrid(1e-3, 10.0, 120).nodes);
  checks.below("scattering.unitarity", scan.unitarity_defect, 1e-5);
  checks.below("scattering.reflection_symmetry", scan.symmetry_defect, 1e-5);
  const ResonanceReport rr = resonance_test(f.pot, f.omega);
  checks.note("scattering.resonance", to_json(rr));
  if (family == "cubic") checks.expect("scattering.resonant", rr.resonant);
  if (family == "cubic-quintic-minus") checks.expect("scattering.non_resonant", !rr.resonant);

  if (kb && !rr.resonant && !has_modes) {
    std::vector<VectorState> pe;
    for (unsigned s = 0; s < 3; ++s) pe.push_back(project_essential(seeded_state(f.grid, 11 + s, 3.0), *kb).essential);
    const EigenBasis b = cached_eigenbasis(f.pot, f.omega, dft_grid(2.0 * f.grid.x_max, 10.0));
    double worst = 0;
    for (const VectorState& s : pe)
      worst = std::max(worst, norm(inverse_transform(forward_transform(s, b), b) - s, f.grid) / norm(s, f.grid));
    checks.below("dft.round_trip", worst, 1e-3);
    checks.below("dft.diagonalization_defect", diagonalization_defect(b, op, pe), 1e-3);
    checks.below("asymptotics.singular_cancellation", singular_cancellation(f.pot, f.omega).max_abs, 1e-3);
  } else {
    checks.note("dft", "skipped: resonant threshold, internal modes or degenerate kernel");
  }

  if (kb) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    double worst = 0, orth = 0;
    for (int trial = 0; trial < 3; ++trial) {
      ModulationState truth;
      truth.gamma = U(rng);
      truth.p = U(rng);
      truth.y = U(rng);
      truth.omega = f.omega * (1.0 + 0.3 * U(rng));
      const CVec v = synthesize_field(truth, CVec(), f.spec, f.grid);
      const FitResult r = fit_parameters(v, f.omega, f.spec, f.grid);
      worst = std::max({worst, std::abs(r.state.gamma - truth.gamma), std::abs(r.state.p - truth.p),
                        std::abs(r.state.y - truth.y), std::abs(r.state.omega - truth.omega)});
      const double vn = std::sqrt(v.squaredNorm() * f.grid.dx);
      for (double q : r.state.residuals) orth = std::max(orth, std::abs(q) / vn);
    }
    checks.below("modulation.round_trip", worst, 1e-6);
    checks.below("modulation.orthogonality", orth, 1e-9);
  }

  SimConfig sim;
  sim.spec = f.spec;
  sim.omega0 = f.omega;
  sim.epsilon = 1e-2;
  sim.perturbation_width = 2.0;
  sim.perturbation_center = 1.0;
  sim.grid = Grid1D(f.grid.x_max, 2048);
  sim.dt = 2e-4;
  sim.t_end = get_number(c, "conservation_t_end", 5.0);
  sim.sample_every = 1000;
  sim.fit_modulation = kb.has_value();
  sim.mass_tolerance = 1.0;
  sim.hamiltonian_tolerance = 1.0;
  try {
    const SimRecord r = run_simulation(sim);
    checks.below("evolution.mass_drift", r.max_mass_drift, 1e-7);
    checks.below("evolution.hamiltonian_drift", r.max_hamiltonian_drift, 1e-7);
  } catch (const InvariantFailure& e) {
    checks.expect("evolution.conservation", false, Json{{"error", e.what()}});
  }

  int bad = 0;
  for (int bits = 0; bits < 32; ++bits) {
    PhaseSigns s{bits & 1 ? -1 : 1, bits & 2 ? -1 : 1, bits & 4 ? -1 : 1, bits & 8 ? -1 : 1, bits & 16 ? -1 : 1};
    const Eigen::Matrix2d hess = phase_hessian(s);
    if (hess.determinant() != -4.0 || matrix_signature(hess) != 0) ++bad;
  }
  checks.expect("asymptotics.hessian_determinant", bad == 0, Json{{"sign_sets_failing", bad}});
  write_json(out / "report.json", checks.to_json());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soliton stability workbench"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON configuration file");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol-scale", o.tol_scale, "multiplier on asserted tolerances")->check(CLI::PositiveNumber);
    sub->add_option("--F", o.field, "nonlinearity F(z), e.g. \"z^2-z^3\"");
    sub->add_option("--family", o.family, "cubic | quintic | cubic-quintic-minus | cubic-quintic-plus");
    sub->add_option("--omega", o.omega, "soliton frequency");
  };
  std::vector<std::pair<std::string, std::string>> names = {
      {"profile", "ground state profile"},
      {"spectrum", "generalised kernel and internal modes"},
      {"scattering", "transmission/reflection scan and resonance test"},
      {"dft-check", "distorted Fourier round trip and diagonalization"},
      {"simulate", "split-step evolution of a perturbed soliton"},
      {"analyze", "distorted spectra, decay and phase analysis of a simulation"},
      {"verify-all", "aggregate invariant checks for one family"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : names) {
    subs[name] = app.add_subcommand(name, help);
    common(subs[name]);
  }
  subs["analyze"]->add_option("--record", o.record, "directory written by simulate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string sub;
  for (const auto& [name, ptr] : subs)
    if (ptr->parsed()) sub = name;

  try {
    set_thread_count(o.threads);
    Json config;
    if (sub == "analyze") {
      config = o.config_path.empty() ? Json::object() : load_config(o.config_path);
    } else if (sub == "simulate") {
      if (o.config_path.empty()) throw ConfigParse("simulate requires --config");
      config = merged_config(o);
    } else {
      config = merged_config(o);
    }
    const fs::path out(o.out_dir);
    fs::create_directories(out);
    RunManifest manifest;
    manifest.subcommand = sub;
    manifest.code_version = code_version();
    manifest.started = utc_timestamp();
    manifest.config = config;
    manifest.config_hash = config_hash(config);
    if (config.contains("F") || config.contains("family")) manifest.field = field_from_config(config).to_string();

    CheckList checks(o.tol_scale);
    if (sub == "profile") run_profile(config, out, checks, manifest);
    else if (sub == "spectrum") run_spectrum(config, out, checks, manifest);
    else if (sub == "scattering") run_scattering(config, out, checks, manifest);
    else if (sub == "dft-check") run_dft_check(config, out, checks, manifest);
    else if (sub == "simulate") run_simulate(config, out, checks, manifest);
    else if (sub == "analyze") run_analyze(config, o.record, out, checks, manifest);
    else if (sub == "verify-all") run_verify_all(config, out, checks, manifest);

    manifest.checks = checks.to_json();
    manifest.passed = checks.passed();
    manifest.finished = utc_timestamp();
    manifest.take_inventory(out.string());
    manifest.write(out.string());
    if (!checks.passed()) {
      std::string names_failed;
      for (const auto& n : checks.failures()) names_failed += (names_failed.empty() ? "" : ", ") + n;
      throw InvariantFailure("failing checks: " + names_failed);
    }
    return 0;
  } catch (const ConfigParse& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const InvariantFailure& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
