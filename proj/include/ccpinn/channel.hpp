#pragma once

#include <cstdint>
#include <vector>

#include "ccpinn/field.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/layout.hpp"
#include "ccpinn/operators.hpp"

namespace ccpinn {

/// Everything the loss needs at one operating frequency: precomputed
/// operators, measurements, and the constant normalization denominators.
/// Masked measurement entries are stored as zero and excluded from both
/// residual norms and the denominators.
struct FrequencyChannel {
  double freq = 0.0;  // Hz
  double k0 = 0.0;    // rad/m
  CMatrix e_inc;      // tx x cells incident fields on the grid
  CMatrix gs;         // rx x cells data operator
  CMatrix gs_t;       // cells x rx transposed copy for the row-apply kernel
  SpectralKernel kernel;
  CMatrix e_meas;              // tx x rx scattered measurements
  std::vector<std::uint8_t> mask;  // tx x rx, 1 = active entry
  double d_meas = 0.0;  // sum of |e_meas|^2 over active entries
  double d_inc = 0.0;   // ||e_inc||_F^2
};

/// Build the operator side of a channel (incident fields, data operator and
/// its transpose, spectral domain kernel, incident-power denominator).
/// Measurements are attached separately.
FrequencyChannel make_channel(const ArrayLayout& layout, const Grid& grid,
                              double freq, int pad_factor);

/// Attach measurements and their mask; zeroes masked entries and fixes the
/// measurement denominator. Throws when shapes disagree, the mask has no
/// active entry, or the active measurement power is zero.
void attach_measurements(FrequencyChannel& ch, const CMatrix& e_meas,
                         const std::vector<std::uint8_t>& mask);

}  // namespace ccpinn
