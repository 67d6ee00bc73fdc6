#include "ccpinn/grid.hpp"

#include <stdexcept>

namespace ccpinn {

Grid build_grid(double half_width, int n) {
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("build_grid: half_width must be positive");
  }
  if (n < 2) {
    throw std::invalid_argument("build_grid: need at least 2 cells per side");
  }
  Grid g;
  g.half_width = half_width;
  g.n = n;
  g.spacing = 2.0 * half_width / n;
  return g;
}

}  // namespace ccpinn
