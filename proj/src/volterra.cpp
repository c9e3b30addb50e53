#include "ssw/volterra.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace ssw {

cplx phi1(cplx z) {
  if (std::abs(z) < 0.1) {
    cplx term = 1.0, sum = 1.0;
    for (int k = 2; k < 14; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

cplx exp_divided_difference(cplx a, cplx b, double s) { return s * std::exp(b * s) * phi1((a - b) * s); }

namespace {

using Gauss = boost::math::quadrature::gauss<double, 30>;

// Lagrange basis evaluated at distance s for nodes at distances d_j * dx.
void lagrange(double s, double dx, const std::vector<double>& d, double* out) {
  const double t = s / dx;
  const int n = static_cast<int>(d.size());
  for (int j = 0; j < n; ++j) {
    double v = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) v *= (t - d[m]) / (d[j] - d[m]);
    out[j] = v;
  }
}

std::vector<double> default_distances(int degree) {
  std::vector<double> d(degree + 1);
  for (int j = 0; j <= degree; ++j) d[j] = j;
  return d;
}

template <class Kernel>
std::vector<cplx> panel_weights(Kernel kernel, double dx, const std::vector<double>& d) {
  const int degree = static_cast<int>(d.size()) - 1;
  std::vector<cplx> w(degree + 1, 0.0);
  const auto& xs = Gauss::abscissa();
  const auto& ws = Gauss::weights();
  double basis[MarchingSum::kMaxDegree + 1];
  auto add = [&](double u, double weight) {
    const double s = 0.5 * dx * (1.0 + u);
    lagrange(s, dx, d, basis);
    const cplx k = kernel(s) * (0.5 * dx * weight);
    for (int j = 0; j <= degree; ++j) w[j] += k * basis[j];
  };
  // The tabulated abscissae are non-negative; mirror them for the full rule.
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      add(0.0, ws[i]);
    } else {
      add(xs[i], ws[i]);
      add(-xs[i], ws[i]);
    }
  }
  return w;
}

}  // namespace

std::vector<cplx> panel_weights_T(cplx a, cplx b, double dx, const std::vector<double>& distances) {
  return panel_weights([&](double s) { return exp_divided_difference(a, b, s); }, dx, distances);
}

std::vector<cplx> panel_weights_E(cplx b, double dx, const std::vector<double>& distances) {
  return panel_weights([&](double s) { return std::exp(b * s); }, dx, distances);
}

std::vector<cplx> panel_weights_T(cplx a, cplx b, double dx, int degree) {
  return panel_weights_T(a, b, dx, default_distances(degree));
}

std::vector<cplx> panel_weights_E(cplx b, double dx, int degree) {
  return panel_weights_E(b, dx, default_distances(degree));
}

MarchingSum::MarchingSum(cplx a, cplx b, double dx, bool with_T)
    : a_(a), b_(b), dx_(dx), with_T_(with_T) {
  growT_ = std::exp(a * dx);
  growE_ = std::exp(b * dx);
  cross_ = exp_divided_difference(a, b, dx);
  for (int m = 1; m <= kMaxDegree; ++m) {
    const auto wE = panel_weights_E(b, dx, m);
    for (int j = 0; j <= m; ++j) weightsE_[m][j] = wE[j];
    if (with_T) {
      const auto wT = panel_weights_T(a, b, dx, m);
      for (int j = 0; j <= m; ++j) weightsT_[m][j] = wT[j];
    }
  }
  // Startup panel ending at node k uses nodes m = 0..kMaxDegree at distance k - m.
  for (int k = 1; k <= kMaxDegree; ++k) {
    std::vector<double> d(kMaxDegree + 1);
    for (int m = 0; m <= kMaxDegree; ++m) d[m] = k - m;
    const auto wE = panel_weights_E(b, dx, d);
    for (int m = 0; m <= kMaxDegree; ++m) startE_[k][m] = wE[m];
    if (with_T) {
      const auto wT = panel_weights_T(a, b, dx, d);
      for (int m = 0; m <= kMaxDegree; ++m) startT_[k][m] = wT[m];
    }
  }
}

void MarchingSum::set_lookahead(const std::array<cplx, kMaxDegree + 1>& provisional) {
  lookahead_ = provisional;
  lookahead_on_ = true;
}

void MarchingSum::reset() {
  count_ = 0;
  seeded_ = 0;
  T_ = E_ = 0.0;
  history_.fill(0.0);
}

void MarchingSum::seed_history(const std::vector<cplx>& previous) {
  seeded_ = static_cast<int>(std::min<std::size_t>(previous.size(), kMaxDegree));
  for (int j = 0; j < seeded_; ++j) history_[j] = previous[j];
}

MarchingSum::Pending MarchingSum::predict() const {
  Pending p;
  if (lookahead_on_ && count_ >= 1 && count_ <= kMaxDegree) {
    const int k = static_cast<int>(count_);
    p.E = growE_ * E_;
    if (with_T_) p.T = growT_ * T_ + cross_ * E_;
    for (int m = 0; m <= kMaxDegree; ++m) {
      if (m == k) continue;
      const cplx h = m < k ? startup_h_[m] : lookahead_[m];
      p.E += startE_[k][m] * h;
      if (with_T_) p.T += startT_[k][m] * h;
    }
    p.wE = startE_[k][k];
    if (with_T_) p.wT = startT_[k][k];
    return p;
  }
  const int m = static_cast<int>(std::min<long>(count_ + seeded_, kMaxDegree));
  if (m == 0) return p;
  p.E = growE_ * E_;
  const bool integrate_panel = count_ > 0;
  if (integrate_panel)
    for (int j = 1; j <= m; ++j) p.E += weightsE_[m][j] * history_[j - 1];
  p.wE = integrate_panel ? weightsE_[m][0] : cplx(0.0);
  if (with_T_) {
    p.T = growT_ * T_ + cross_ * E_;
    if (integrate_panel)
      for (int j = 1; j <= m; ++j) p.T += weightsT_[m][j] * history_[j - 1];
    p.wT = integrate_panel ? weightsT_[m][0] : cplx(0.0);
  }
  return p;
}

void MarchingSum::commit(const Pending& p, cplx h) {
  T_ = p.T + p.wT * h;
  E_ = p.E + p.wE * h;
  for (int j = kMaxDegree - 1; j > 0; --j) history_[j] = history_[j - 1];
  history_[0] = h;
  if (count_ <= kMaxDegree) startup_h_[count_] = h;
  ++count_;
}

}  // namespace ssw
