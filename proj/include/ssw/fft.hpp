#pragma once

#include <fftw3.h>

#include "ssw/grid.hpp"

namespace ssw {

// Reusable in-place complex FFT of fixed length (unnormalised forward, normalised inverse).
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  void forward(CVec& data);
  void inverse(CVec& data);

 private:
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace ssw
