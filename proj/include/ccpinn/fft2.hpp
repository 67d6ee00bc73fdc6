#pragma once

#include <complex>
#include <memory>

namespace ccpinn {

/// Square 2D complex FFT of fixed side m, in place, unnormalized.
/// Plans use FFTW_ESTIMATE so the algorithm choice (and therefore rounding)
/// is reproducible run to run; plan creation is serialized internally.
/// forward()/inverse() are safe to call concurrently on distinct buffers.
class Fft2 {
 public:
  explicit Fft2(int m);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;
  Fft2(Fft2&& other) noexcept;
  Fft2& operator=(Fft2&& other) noexcept;

  int side() const { return m_; }
  void forward(std::complex<double>* inout) const;
  void inverse(std::complex<double>* inout) const;

 private:
  int m_ = 0;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

}  // namespace ccpinn
