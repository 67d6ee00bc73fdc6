#include "ccpinn/field.hpp"

#include <stdexcept>

namespace ccpinn {

double norm_sq(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return s;
}

double norm_sq(const std::vector<cplx>& x) { return norm_sq(x.data(), x.size()); }

double norm_sq(const CMatrix& x) { return norm_sq(x.data.data(), x.data.size()); }

double masked_norm_sq(const CMatrix& x, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != x.data.size()) {
    throw std::invalid_argument("masked_norm_sq: mask size mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    if (mask[i]) {
      s += x.data[i].real() * x.data[i].real() +
           x.data[i].imag() * x.data[i].imag();
    }
  }
  return s;
}

}  // namespace ccpinn
