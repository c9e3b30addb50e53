#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "ssw/profiles.hpp"

namespace ssw {

using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;
using FactorArray = Eigen::Matrix<cplx, Eigen::Dynamic, 2>;

enum class JostKind { f1, f2, f3, f4, f4dagger, g1, g2, g3, g4 };
std::string to_string(JostKind k);

struct JostOptions {
  double x_left = 6.0;       // left end of the sampling window is -x_left
  double branch_xi = 5.0;    // |xi| above which the f4 construction starts at the left end
  double x1_star = 1.0;      // starting point of the f4 construction for |xi| <= branch_xi
  double residual_window = 3.0;
  int branch = 0;            // 0: select by |xi|; 1: start at x1_star; 2: start at the left end
};

// Generalised eigenfunction sampled on grid indices [first, grid.n):
//   f(x) = e^{rate x} factor(x) - sum_k coef_k * part_k(x).
struct JostSolution {
  double xi = 0.0;
  double omega = 0.0;
  double kappa = 0.0;  // sqrt(xi^2 + 2 omega)
  JostKind kind = JostKind::f1;
  Grid1D grid;
  int first = 0;
  cplx rate = 0.0;
  FactorArray factor;
  FactorArray dfactor;
  std::vector<std::pair<cplx, std::shared_ptr<const JostSolution>>> minus;
  double eig_residual = 0.0;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(factor.rows()); }
  double x(int i) const { return grid.x(i); }
  bool contains(int i) const { return i >= first && i < grid.n; }
  Vec2c value(int i) const;
  Vec2c derivative(int i) const;
  // Reflected solution g(x) = f(-x) at grid index i (requires -x on the grid).
  Vec2c reflected_value(int i) const;
  Vec2c reflected_derivative(int i) const;
};

struct JostSet {
  std::shared_ptr<JostSolution> f1, f2, f3, f4, f4dagger;
  cplx c1 = 0.0, c2 = 0.0;
};

JostSolution solve_f3(const PotentialSet& pot, double omega, double xi, const JostOptions& opt = {});
JostSolution solve_f1(const PotentialSet& pot, double omega, double xi, const JostSolution& f3,
                      const JostOptions& opt = {});
JostSolution solve_f1(const PotentialSet& pot, double omega, double xi, const JostOptions& opt = {});
JostSolution conjugate_solution(const JostSolution& f1);
// f4 dagger started at the given point (use -infinity for the left end of the window).
JostSolution solve_f4dagger(const PotentialSet& pot, double omega, double xi, double x1, const JostOptions& opt = {});
// Full f4 = f4dagger - c1 f1 - c2 f2 with the branch selected by |xi|.
JostSet solve_jost_set(const PotentialSet& pot, double omega, double xi, const JostOptions& opt = {});
JostSolution solve_f4(const PotentialSet& pot, double omega, double xi, const JostOptions& opt = {});

// Scalar Wronskian f'^T g - f^T g' at grid index i.
cplx wronskian(const JostSolution& f, const JostSolution& g, int i);

// Max relative residual of H f - (omega + xi^2) f on |x| <= window via 4th-order differences.
double eigen_residual(const JostSolution& f, const PotentialSet& pot, double window);

struct ScatteringMatrices {
  double xi = 0.0;
  double bracket = 0.0;  // sqrt(xi^2 + 2 omega)
  Mat2c D, A, B;
  Mat2c W_F1G1;  // W[F1, G1]
  double constancy_defect = 0.0;
};

// D = W[F1, G2], A and B from the Wronskian identities, evaluated at x = 0.
ScatteringMatrices wronskian_matrices(const JostSet& set, double omega);
ScatteringMatrices wronskian_matrices(const PotentialSet& pot, double omega, double xi, const JostOptions& opt = {});
// W[F1, G2] evaluated at grid index i (constant in i for exact solutions).
Mat2c wronskian_D_at(const JostSet& set, int i);

}  // namespace ssw
