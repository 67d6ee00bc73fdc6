#pragma once

#include <memory>
#include <vector>

#include "ccpinn/fft2.hpp"
#include "ccpinn/field.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/layout.hpp"

namespace ccpinn {

// Discretized Lippmann-Schwinger operators on the pulse-basis grid.
// Every entry is k0^2 * integral of G over a cell, approximated by the
// equivalent-circle quadrature with a = spacing/sqrt(pi):
//   off-cell:  -(j*pi*k0*a/2) * J1(k0*a) * H0^(2)(k0*d)
//   self cell: -(j*pi/2) * k0*a * H1^(2)(k0*a) - 1

/// E_inc[p, n] = -(j/4) * H0^(2)(k0 * |r_n - r_p|), unit-amplitude line
/// source. Throws when a transmitter sits inside the ROI or on a cell center.
CMatrix incident_fields(const ArrayLayout& layout, const Grid& grid, double k0);

/// Data operator, receivers x cells. Throws when a receiver is inside the ROI.
CMatrix data_operator(const ArrayLayout& layout, const Grid& grid, double k0);

/// Dense domain operator, cells x cells; symmetric, displacement-invariant.
CMatrix domain_operator_dense(const Grid& grid, double k0);

/// Circulant embedding of the domain operator for FFT application.
/// ghat holds the forward transform of the displacement kernel with the
/// 1/(side^2) inverse normalization folded in.
struct SpectralKernel {
  int n = 0;         // grid side
  int pad = 0;       // pad factor, >= 2
  int side = 0;      // padded side = pad * n
  double k0 = 0.0;
  std::vector<cplx> ghat;
  std::shared_ptr<Fft2> fft;
};

/// Throws std::invalid_argument for pad_factor < 2 (linear-convolution
/// correctness needs padded side >= 2n-1).
SpectralKernel build_spectral_kernel(const Grid& grid, double k0,
                                     int pad_factor);

/// out[b] = G_D * J[b] for `batch` fields of n*n cells each, laid out
/// row-major (idx = iy*n + ix), matching the dense operator to rounding.
void apply_domain_operator(const SpectralKernel& kernel, const cplx* J,
                           cplx* out, int batch);

/// Adjoint apply: out[b] = G_D^H * X[b]. Uses G_D^T = G_D (symmetry), so
/// G_D^H x = conj(G_D * conj(x)).
void apply_domain_adjoint(const SpectralKernel& kernel, const cplx* X,
                          cplx* out, int batch);

}  // namespace ccpinn
