#pragma once

#include <vector>

#include "ssw/jost.hpp"

namespace ssw {

// Symmetric frequency grid excluding 0 with quadrature weights for integrals in xi.
struct XiGrid {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // int g dxi ~ sum g(nodes) * weights

  int size() const { return static_cast<int>(nodes.size()); }
  // Composite midpoint rule: cells of width fine_h up to fine_max, then coarse_h up to coarse_max.
  static XiGrid composite(double fine_h, double fine_max, double coarse_h, double coarse_max);
  // Geometric spacing from xi_min to 1 followed by linear spacing to xi_max (per sign).
  static XiGrid hybrid(double xi_min, double xi_max, int total_nodes);
  // Positive half only.
  std::vector<double> positive() const;
};

struct Coefficients {
  cplx s = 0.0;
  cplx r = 0.0;
  cplx c3 = 0.0;  // weight of f3 in the generalised eigenfunction for x >= 0
  cplx b3 = 0.0;  // weight of g3 for x <= 0
};

struct ScatteringData {
  std::vector<double> xi_grid;
  std::vector<cplx> s, r, det_D;
  std::vector<double> constancy;
  std::vector<ScatteringMatrices> matrices;
  double unitarity_defect = 0.0;
  double symmetry_defect = 0.0;  // max ||conj(r) s + conj(s) r||
};

struct ResonanceReport {
  cplx det_D0_extrapolated = 0.0;
  double min_singular_value_D = 0.0;  // at the smallest xi
  double extrapolated_singular_value = 0.0;
  double threshold = 0.0;
  bool resonant = false;
  std::vector<double> xi_samples;
  std::vector<double> singular_values;
};

struct ResonanceOptions {
  double xi_min = 1e-3;
  int levels = 7;
  double relative_threshold = 1e-2;
  double agreement = 0.5;
  JostOptions jost;
};

struct EdgeLimits {
  cplx s0 = 0.0;
  cplx r0 = 0.0;
  std::vector<double> xi_samples;
  std::vector<cplx> s, r;
};

Coefficients transmission_reflection(const ScatteringMatrices& mats, double max_condition = 1e10);
double unitarity_defect(const Coefficients& c);

ScatteringData scattering_scan(const PotentialSet& pot, double omega, const std::vector<double>& xi_grid,
                               const JostOptions& opt = {});

ResonanceReport resonance_test(const PotentialSet& pot, double omega, const ResonanceOptions& opt = {});

// s(0+) and r(0+) by Richardson extrapolation from xi = xi_min * 2^k.
EdgeLimits edge_limits(const PotentialSet& pot, double omega, const ResonanceOptions& opt = {});

// Two-level Richardson extrapolation to zero from samples at geometrically doubling points.
template <class T>
T richardson_to_zero(const std::vector<T>& v, int k = 0) {
  const T r1a = 2.0 * v[k] - v[k + 1];
  const T r1b = 2.0 * v[k + 1] - v[k + 2];
  return (4.0 * r1a - r1b) / 3.0;
}

}  // namespace ssw
