#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ssw/dft.hpp"
#include "ssw/fft.hpp"
#include "ssw/modulation.hpp"

namespace ssw {

struct SimConfig {
  FieldSpec spec;
  double omega0 = 1.0;
  bool soliton = true;       // false: flat run, v0 is the perturbation alone
  double p0 = 0.0;           // initial momentum of the soliton
  std::string perturbation = "gaussian";  // gaussian | odd-gaussian | sech | none
  double epsilon = 0.0;
  double perturbation_width = 1.0;
  double perturbation_center = 0.0;
  double perturbation_kick = 0.0;  // carrier wavenumber of the perturbation
  Grid1D grid;
  double dt = 1e-3;
  double t_end = 1.0;
  double sponge_width = 0.0;
  double sponge_strength = 0.0;
  bool nonlinear = true;
  int sample_every = 0;               // steps between uniformly spaced samples; 0 disables
  std::vector<double> sample_times;   // additional sample times (rounded to the step grid)
  bool fit_modulation = true;
  bool keep_fields = true;
  double mass_tolerance = 1e-8;        // allowed relative mass drift per unit time (sponge off)
  double hamiltonian_tolerance = 1e-6; // allowed relative Hamiltonian drift over the run (sponge off)
  double blowup_factor = 1e3;

  void validate() const;
};

struct SimRecord {
  SimConfig config;
  std::vector<double> times;
  std::vector<double> mass, hamiltonian;
  std::vector<ModulationState> modulation;
  std::vector<double> u_sup;    // ||u||_inf of the radiation
  std::vector<double> u_local;  // ||<x>^{-1} u||_inf in the soliton frame
  std::vector<double> pythagoras_defect;  // |int|v|^2 - int Phi^2 - int |u|^2| / int |v|^2, NaN without a fit
  std::vector<CVec> fields;     // v at the sample times when keep_fields
  // Filled by analyze_record.
  std::vector<DistortedSpectrum> spectra;
  std::vector<Eigen::Vector4cd> discrete;  // a_j against the final-fit kernel
  double max_mass_drift = 0.0;
  double max_hamiltonian_drift = 0.0;
};

double field_mass(const CVec& v, const Grid1D& grid);
// E = int |v_x|^2 - F(|v|^2) dx with a spectral derivative; the F term is dropped for linear runs.
double field_hamiltonian(const CVec& v, const Grid1D& grid, const FieldSpec& spec, bool nonlinear = true);

CVec initial_field(const SimConfig& config);

// Strang splitting for i v_t - v_xx - F'(|v|^2) v = 0: exact kinetic phase in Fourier space and exact
// pointwise phase rotation for the nonlinearity.
class SplitStep {
 public:
  SplitStep(const FieldSpec& spec, const Grid1D& grid, double dt, bool nonlinear = true, double sponge_width = 0.0,
            double sponge_strength = 0.0);
  void advance(CVec& v, long steps);
  double dt() const { return dt_; }

 private:
  void nonlinear_phase(CVec& v, double tau) const;
  void kinetic(CVec& v);
  FieldSpec spec_;
  Grid1D grid_;
  double dt_;
  bool nonlinear_;
  std::vector<double> fprime_;  // coefficients of F'
  CVec kinetic_phase_;
  RVec sponge_;
  std::unique_ptr<Fft> fft_;
};

// Strang splitting for the linear system i U_t + H U = 0 (U_t = i H U).
class LinearPropagator {
 public:
  LinearPropagator(const PotentialSet& pot, double omega, double dt);
  void advance(VectorState& u, long steps);

 private:
  Grid1D grid_;
  double dt_;
  CVec phase_plus_, phase_minus_;   // half-step kinetic phases
  CVec cos_part_, sin_part_;        // exp(i dt M) = cos_part I + i sin_part M
  RVec V1_, V2_;
  std::unique_ptr<Fft> fft_;
  void kinetic(VectorState& u);
};

SimRecord run_simulation(const SimConfig& config);

struct AnalysisOptions {
  double xi_max = 5.0;
  double xi_step = 0.02;
  bool use_cache = true;
  EigenBasisOptions basis;
};

// Distorted spectra f~(t) = e^{-itH} Pe U(t) and a_j against the final-fit soliton (omega(t_end), p(t_end)).
void analyze_record(SimRecord& record, const AnalysisOptions& opt = {});

// Flat Fourier profile e^{-i xi^2 t} (2 pi)^{-1/2} int v e^{-i x xi} dx on the FFT wavenumbers with |xi| <= xi_max.
DistortedSpectrum flat_profile(const CVec& v, const Grid1D& grid, double t, double xi_max);

struct DecayFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double t0 = 0.0, t1 = 0.0;
  double fit_residual = 0.0;  // rms of log residuals
};

// Least squares of log(series) against log(t) on [t0, t1]; at least one decade.
DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& series, double t0, double t1);

struct DecayFits {
  DecayFit global, local;
};
DecayFits decay_fit(const SimRecord& record, double t0 = 10.0, double t1 = -1.0);

struct PhaseReport {
  std::vector<double> xi, slope, target, deviation, modulus_drift;
  double band_ratio = 0.0;       // sum slope / sum target over the band
  double max_modulus_drift = 0.0;
};

// Regression of arg f~(t, xi) against log t for |xi| in [band_lo, band_hi] and t in [t0, t1].
PhaseReport modified_scattering_phase(const std::vector<double>& times, const std::vector<DistortedSpectrum>& spectra,
                                      double L, double t0, double t1, double band_lo = 0.3, double band_hi = 3.0);

struct TrappedNorms {
  std::vector<double> sup, weighted_h1, sup_envelope, h1_envelope;
};
TrappedNorms trapped_norms(const std::vector<double>& times, const std::vector<DistortedSpectrum>& spectra,
                           double alpha);

}  // namespace ssw
