#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ccpinn {

/// Transmitter/receiver geometry plus the per-transmitter active-receiver
/// mask. mask is P x Q row-major; 1 = receiver active for that transmitter.
struct ArrayLayout {
  std::vector<std::array<double, 2>> tx;
  std::vector<std::array<double, 2>> rx;
  std::vector<std::uint8_t> mask;

  int ntx() const { return static_cast<int>(tx.size()); }
  int nrx() const { return static_cast<int>(rx.size()); }
  bool active(int p, int q) const {
    return mask[static_cast<std::size_t>(p) * rx.size() + q] != 0;
  }
  int active_count(int p) const;
};

/// Transmitters and receivers uniformly spaced on a circle starting at angle
/// 0. A receiver is masked out for a transmitter when their angular distance
/// is strictly below exclusion_halfangle_deg (1e-9 deg slack on the
/// boundary). Every transmitter must keep at least one active receiver; a
/// half-angle of 180 deg or more spans the whole circle and throws.
/// roi_half_width > 0 additionally requires radius > roi_half_width*sqrt(2).
ArrayLayout circular_layout(double radius, int n_tx, int n_rx,
                            double exclusion_halfangle_deg,
                            double roi_half_width = 0.0);

}  // namespace ccpinn
