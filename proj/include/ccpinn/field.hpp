#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ccpinn {

using cplx = std::complex<double>;

/// Row-major complex matrix. Rows index transmitters or receivers, columns
/// index receivers or grid cells.
struct CMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> data;

  CMatrix() = default;
  CMatrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

  cplx* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const cplx* row(int r) const {
    return data.data() + static_cast<std::size_t>(r) * cols;
  }
  cplx& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  const cplx& at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  std::size_t size() const { return data.size(); }
};

// Reductions below run in one fixed serial order: results are bitwise
// reproducible and independent of thread count.

double norm_sq(const cplx* x, std::size_t n);
double norm_sq(const std::vector<cplx>& x);
double norm_sq(const CMatrix& x);

/// Sum of |x|^2 over entries where mask is nonzero. mask.size() == x.size().
double masked_norm_sq(const CMatrix& x, const std::vector<std::uint8_t>& mask);

}  // namespace ccpinn
