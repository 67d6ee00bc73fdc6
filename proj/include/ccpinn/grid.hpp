#pragma once

namespace ccpinn {

/// Uniform square discretization of the region of interest, centered on the
/// origin. Cells are indexed row-major: idx = iy * n + ix.
struct Grid {
  double half_width = 0.0;  // R, meters
  int n = 0;                // cells per side
  double spacing = 0.0;     // cell size = 2R/n, meters

  int num_cells() const { return n * n; }
  double cell_coord(int i) const {
    return -half_width + (i + 0.5) * spacing;
  }
  double center_x(int idx) const { return cell_coord(idx % n); }
  double center_y(int idx) const { return cell_coord(idx / n); }
};

/// Throws std::invalid_argument for half_width <= 0 or n < 2.
Grid build_grid(double half_width, int n);

}  // namespace ccpinn
