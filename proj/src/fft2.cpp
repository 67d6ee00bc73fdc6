#include "ccpinn/fft2.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace ccpinn {

namespace {
// The FFTW planner mutates global state and is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2::Fft2(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("Fft2: side must be >= 1");
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(m) * m);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_2d(m, m, buf, buf, FFTW_FORWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  inv_ = fftw_plan_dft_2d(m, m, buf, buf, FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !inv_) throw std::runtime_error("Fft2: planning failed");
}

Fft2::~Fft2() {
  if (fwd_ || inv_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  }
}

Fft2::Fft2(Fft2&& other) noexcept
    : m_(other.m_), fwd_(other.fwd_), inv_(other.inv_) {
  other.fwd_ = nullptr;
  other.inv_ = nullptr;
  other.m_ = 0;
}

Fft2& Fft2::operator=(Fft2&& other) noexcept {
  if (this != &other) {
    this->~Fft2();
    m_ = other.m_;
    fwd_ = other.fwd_;
    inv_ = other.inv_;
    other.fwd_ = nullptr;
    other.inv_ = nullptr;
    other.m_ = 0;
  }
  return *this;
}

void Fft2::forward(std::complex<double>* inout) const {
  auto* buf = reinterpret_cast<fftw_complex*>(inout);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), buf, buf);
}

void Fft2::inverse(std::complex<double>* inout) const {
  auto* buf = reinterpret_cast<fftw_complex*>(inout);
  fftw_execute_dft(static_cast<fftw_plan>(inv_), buf, buf);
}

}  // namespace ccpinn
