#include "ccpinn/layout.hpp"

#include <cmath>
#include <stdexcept>

#include "ccpinn/constants.hpp"

namespace ccpinn {

int ArrayLayout::active_count(int p) const {
  int c = 0;
  for (int q = 0; q < nrx(); ++q) c += active(p, q) ? 1 : 0;
  return c;
}

ArrayLayout circular_layout(double radius, int n_tx, int n_rx,
                            double exclusion_halfangle_deg,
                            double roi_half_width) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("circular_layout: radius must be positive");
  }
  if (n_tx < 1 || n_rx < 1) {
    throw std::invalid_argument("circular_layout: counts must be >= 1");
  }
  if (exclusion_halfangle_deg < 0.0) {
    throw std::invalid_argument(
        "circular_layout: exclusion half-angle must be non-negative");
  }
  // +-180 deg spans the whole circle, which would blank every mask row.
  if (exclusion_halfangle_deg >= 180.0) {
    throw std::invalid_argument(
        "circular_layout: exclusion half-angle covers the full circle");
  }
  if (roi_half_width > 0.0 && radius <= roi_half_width * std::sqrt(2.0)) {
    throw std::invalid_argument(
        "circular_layout: observation circle intersects the ROI");
  }
  ArrayLayout layout;
  layout.tx.resize(n_tx);
  layout.rx.resize(n_rx);
  std::vector<double> tx_deg(n_tx), rx_deg(n_rx);
  for (int p = 0; p < n_tx; ++p) {
    tx_deg[p] = 360.0 * p / n_tx;
    const double a = tx_deg[p] * pi / 180.0;
    layout.tx[p] = {radius * std::cos(a), radius * std::sin(a)};
  }
  for (int q = 0; q < n_rx; ++q) {
    rx_deg[q] = 360.0 * q / n_rx;
    const double a = rx_deg[q] * pi / 180.0;
    layout.rx[q] = {radius * std::cos(a), radius * std::sin(a)};
  }
  layout.mask.assign(static_cast<std::size_t>(n_tx) * n_rx, 1);
  const double slack = 1e-9;
  for (int p = 0; p < n_tx; ++p) {
    int active = 0;
    for (int q = 0; q < n_rx; ++q) {
      double d = std::fabs(rx_deg[q] - tx_deg[p]);
      d = std::fmod(d, 360.0);
      if (d > 180.0) d = 360.0 - d;
      if (d < exclusion_halfangle_deg - slack) {
        layout.mask[static_cast<std::size_t>(p) * n_rx + q] = 0;
      } else {
        ++active;
      }
    }
    if (active == 0) {
      throw std::invalid_argument(
          "circular_layout: exclusion sector leaves a transmitter with no "
          "active receivers");
    }
  }
  return layout;
}

}  // namespace ccpinn
