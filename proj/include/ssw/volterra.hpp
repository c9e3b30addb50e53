#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <vector>

namespace ssw {

using cplx = std::complex<double>;

// (e^z - 1)/z, stable near z = 0.
cplx phi1(cplx z);
// K(s) = (e^{a s} - e^{b s})/(a - b), stable as a -> b.
cplx exp_divided_difference(cplx a, cplx b, double s);

// Running Volterra sums along a uniform march of step dx, where s >= 0 is the distance
// from the current node back towards the start of the march:
//   T = int K_{a,b}(s) h ds,   E = int e^{b s} h ds.
// Local panels use Lagrange interpolation of degree up to 5 through the current node and
// the most recent previous nodes, integrated exactly against the kernel.
class MarchingSum {
 public:
  static constexpr int kMaxDegree = 5;

  MarchingSum(cplx a, cplx b, double dx, bool with_T = true);

  // Known part of (T, E) at the next node, excluding the contribution of h at that node.
  struct Pending {
    cplx T = 0.0;
    cplx E = 0.0;
    cplx wT = 0.0;  // weight multiplying the unknown h at the new node in T
    cplx wE = 0.0;  // same for E
  };
  Pending predict() const;
  // Values of h at virtual nodes preceding the start (most recent first); they only enter
  // the interpolation stencils, never the integrals.
  void seed_history(const std::vector<cplx>& previous);
  // Startup block: the first kMaxDegree panels use the fixed stencil on nodes 0..kMaxDegree,
  // with provisional values for nodes not yet reached (see run_with_startup).
  void set_lookahead(const std::array<cplx, kMaxDegree + 1>& provisional);
  void clear_lookahead() { lookahead_on_ = false; }
  const std::array<cplx, kMaxDegree + 1>& startup_values() const { return startup_h_; }
  void reset();
  // Finalise the new node with its h value; returns the committed (T, E).
  void commit(const Pending& p, cplx h);

  cplx T() const { return T_; }
  cplx E() const { return E_; }
  cplx a() const { return a_; }
  cplx b() const { return b_; }
  int steps() const { return static_cast<int>(count_); }

 private:
  cplx a_, b_;
  double dx_;
  bool with_T_;
  cplx growT_, growE_, cross_;
  // weightsT_[m][j]: degree-m panel weights, node j at distance j*dx.
  std::array<std::array<cplx, kMaxDegree + 1>, kMaxDegree + 1> weightsT_{}, weightsE_{};
  std::array<cplx, kMaxDegree> history_{};  // history_[0] = most recent node
  std::array<std::array<cplx, kMaxDegree + 1>, kMaxDegree + 1> startT_{}, startE_{};
  std::array<cplx, kMaxDegree + 1> startup_h_{}, lookahead_{};
  bool lookahead_on_ = false;
  long count_ = 0;
  int seeded_ = 0;
  cplx T_ = 0.0, E_ = 0.0;
};

// Panel weights int_0^dx k(s) l_j(s) ds for Lagrange basis polynomials on nodes at
// distances d_j * dx (default d_j = j, j = 0..degree), for a kernel given by (a, b) as above.
std::vector<cplx> panel_weights_T(cplx a, cplx b, double dx, int degree);
std::vector<cplx> panel_weights_E(cplx b, double dx, int degree);
std::vector<cplx> panel_weights_T(cplx a, cplx b, double dx, const std::vector<double>& distances);
std::vector<cplx> panel_weights_E(cplx b, double dx, const std::vector<double>& distances);

// Runs the first kMaxDegree + 1 nodes of a march with full-order stencils by fixed-point
// iteration on the provisional node values. `step(k)` must predict, solve and commit node k
// for every sum; afterwards the sums are positioned after node kMaxDegree.
template <class Step>
void run_with_startup(std::initializer_list<MarchingSum*> sums, Step step, int sweeps = 6) {
  for (int it = 0; it < sweeps; ++it) {
    for (MarchingSum* s : sums) s->reset();
    for (int k = 0; k <= MarchingSum::kMaxDegree; ++k) step(k);
    for (MarchingSum* s : sums) s->set_lookahead(s->startup_values());
  }
  for (MarchingSum* s : sums) s->clear_lookahead();
}

}  // namespace ssw
