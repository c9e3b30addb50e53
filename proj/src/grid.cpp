#include "ssw/grid.hpp"

#include <cmath>
#include <mutex>

#include "ssw/errors.hpp"
#include "ssw/fft.hpp"

namespace ssw {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(plan_mutex());
  buf_ = fftw_alloc_complex(static_cast<std::size_t>(n));
  fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(buf_);
}

void Fft::forward(CVec& data) {
  std::copy(data.data(), data.data() + n_, reinterpret_cast<cplx*>(buf_));
  fftw_execute(fwd_);
  std::copy(reinterpret_cast<cplx*>(buf_), reinterpret_cast<cplx*>(buf_) + n_, data.data());
}

void Fft::inverse(CVec& data) {
  std::copy(data.data(), data.data() + n_, reinterpret_cast<cplx*>(buf_));
  fftw_execute(bwd_);
  const double s = 1.0 / n_;
  const cplx* b = reinterpret_cast<cplx*>(buf_);
  for (int i = 0; i < n_; ++i) data[i] = b[i] * s;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid1D::Grid1D(double x_max_, int n_) : x_max(x_max_), n(n_), dx(2.0 * x_max_ / n_) {
  if (!(x_max_ > 0.0)) throw ConfigParse("grid half-width must be positive");
  if (!is_power_of_two(n_) || n_ < 16) throw ConfigParse("grid size must be a power of two >= 16");
}

Grid1D Grid1D::for_omega(double omega, int n, double width) { return Grid1D(width / std::sqrt(omega), n); }

RVec Grid1D::points() const {
  RVec p(n);
  for (int i = 0; i < n; ++i) p[i] = x(i);
  return p;
}

RVec Grid1D::wavenumbers() const {
  RVec k(n);
  const double base = 2.0 * kPi / (n * dx);
  for (int i = 0; i < n; ++i) k[i] = base * (i < n / 2 ? i : i - n);
  return k;
}

double integrate(const RVec& f, const Grid1D& g) { return f.sum() * g.dx; }
cplx integrate(const CVec& f, const Grid1D& g) { return f.sum() * g.dx; }

namespace {
template <class V>
V d2_fd4(const V& f, double dx) {
  const int n = static_cast<int>(f.size());
  V out(n);
  auto at = [&](int i) { return (i < 0 || i >= n) ? typename V::Scalar(0) : f[i]; };
  const double c = 1.0 / (12.0 * dx * dx);
  for (int i = 0; i < n; ++i)
    out[i] = c * (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2));
  return out;
}
}  // namespace

RVec second_derivative_fd4(const RVec& f, double dx) { return d2_fd4(f, dx); }
CVec second_derivative_fd4(const CVec& f, double dx) { return d2_fd4(f, dx); }

CVec first_derivative_fd4(const CVec& f, double dx) {
  const int n = static_cast<int>(f.size());
  CVec out(n);
  auto at = [&](int i) { return (i < 0 || i >= n) ? cplx(0) : f[i]; };
  const double c = 1.0 / (12.0 * dx);
  for (int i = 0; i < n; ++i) out[i] = c * (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2));
  return out;
}

CVec spectral_derivative(const CVec& f, const Grid1D& g) {
  Fft fft(g.n);
  CVec h = f;
  fft.forward(h);
  const RVec k = g.wavenumbers();
  for (int i = 0; i < g.n; ++i) h[i] *= cplx(0.0, i == g.n / 2 ? 0.0 : k[i]);
  fft.inverse(h);
  return h;
}

CVec spectral_shift(const CVec& f, const Grid1D& g, double shift) {
  Fft fft(g.n);
  CVec h = f;
  fft.forward(h);
  const RVec k = g.wavenumbers();
  for (int i = 0; i < g.n; ++i) {
    if (i == g.n / 2) {
      h[i] *= std::cos(k[i] * shift);
    } else {
      h[i] *= std::polar(1.0, k[i] * shift);
    }
  }
  fft.inverse(h);
  return h;
}

RVec resample(const RVec& f, const Grid1D& from, const Grid1D& to) {
  RVec out(to.n);
  for (int i = 0; i < to.n; ++i) {
    const double s = (to.x(i) - from.x_min()) / from.dx;
    const int j = static_cast<int>(std::floor(s));
    if (j < 0 || j + 1 >= from.n) {
      out[i] = 0.0;
      continue;
    }
    const double t = s - j;
    out[i] = (1 - t) * f[j] + t * f[j + 1];
  }
  return out;
}

}  // namespace ssw
