#include "ccpinn/channel.hpp"

#include <stdexcept>

#include "ccpinn/constants.hpp"

namespace ccpinn {

FrequencyChannel make_channel(const ArrayLayout& layout, const Grid& grid,
                              double freq, int pad_factor) {
  if (!(freq > 0.0)) {
    throw std::invalid_argument("make_channel: frequency must be positive");
  }
  FrequencyChannel ch;
  ch.freq = freq;
  ch.k0 = 2.0 * pi * freq / c0;
  ch.e_inc = incident_fields(layout, grid, ch.k0);
  ch.gs = data_operator(layout, grid, ch.k0);
  ch.gs_t = CMatrix(ch.gs.cols, ch.gs.rows);
  for (int q = 0; q < ch.gs.rows; ++q) {
    for (int n = 0; n < ch.gs.cols; ++n) {
      ch.gs_t.at(n, q) = ch.gs.at(q, n);
    }
  }
  ch.kernel = build_spectral_kernel(grid, ch.k0, pad_factor);
  ch.d_inc = norm_sq(ch.e_inc);
  if (!(ch.d_inc > 0.0)) {
    throw std::runtime_error("make_channel: incident fields have zero power");
  }
  return ch;
}

void attach_measurements(FrequencyChannel& ch, const CMatrix& e_meas,
                         const std::vector<std::uint8_t>& mask) {
  const int P = ch.e_inc.rows;
  const int Q = ch.gs.rows;
  if (e_meas.rows != P || e_meas.cols != Q) {
    throw std::invalid_argument("attach_measurements: measurement shape does not match layout");
  }
  if (mask.size() != e_meas.size()) {
    throw std::invalid_argument("attach_measurements: mask size does not match measurements");
  }
  std::size_t active = 0;
  for (std::uint8_t m : mask) active += (m != 0);
  if (active == 0) {
    throw std::invalid_argument("attach_measurements: mask excludes every entry");
  }
  ch.e_meas = e_meas;
  ch.mask = mask;
  for (std::size_t i = 0; i < ch.mask.size(); ++i) {
    if (!ch.mask[i]) ch.e_meas.data[i] = cplx(0.0, 0.0);
  }
  ch.d_meas = masked_norm_sq(ch.e_meas, ch.mask);
  if (!(ch.d_meas > 0.0)) {
    throw std::runtime_error("attach_measurements: active measurements have zero power");
  }
}

}  // namespace ccpinn
