#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace ssw {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Uniform periodic-friendly grid on [-x_max, x_max) with n points; x = 0 sits at index n/2.
struct Grid1D {
  double x_max = 0.0;
  int n = 0;
  double dx = 0.0;

  Grid1D() = default;
  Grid1D(double x_max_, int n_);

  double x_min() const { return -x_max; }
  double x(int i) const { return -x_max + i * dx; }
  int zero_index() const { return n / 2; }
  RVec points() const;
  // Angular wavenumbers in FFT ordering.
  RVec wavenumbers() const;

  static Grid1D for_omega(double omega, int n = 4096, double width = 40.0);
};

bool is_power_of_two(int n);

// Trapezoid-type integral on the grid (sum * dx); spectrally accurate for decaying data.
double integrate(const RVec& f, const Grid1D& g);
cplx integrate(const CVec& f, const Grid1D& g);

// Fourth-order centred second derivative with zero (Dirichlet) extension.
RVec second_derivative_fd4(const RVec& f, double dx);
CVec second_derivative_fd4(const CVec& f, double dx);
CVec first_derivative_fd4(const CVec& f, double dx);

// Spectral derivative and sub-grid translation by FFT on the periodic grid.
CVec spectral_derivative(const CVec& f, const Grid1D& g);
CVec spectral_shift(const CVec& f, const Grid1D& g, double shift);  // returns f(x + shift)

// Linear interpolation of grid data onto arbitrary points (used only for diagnostics).
RVec resample(const RVec& f, const Grid1D& from, const Grid1D& to);

}  // namespace ssw
