#pragma once

#include <array>
#include <string>
#include <vector>

#include "ccpinn/field.hpp"
#include "ccpinn/grid.hpp"

namespace ccpinn {

enum class ShapeKind { disk, annulus };

struct Shape {
  ShapeKind kind = ShapeKind::disk;
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;             // disk
  double outer = 0.0, inner = 0.0; // annulus, outer > inner > 0
  double eps_r = 1.0;              // >= 1
  double sigma = 0.0;              // S/m, >= 0

  bool contains(double x, double y) const;
};

/// Ordered shape list; on overlap, later shapes overwrite earlier ones.
struct Phantom {
  std::vector<Shape> shapes;
};

/// Throws std::invalid_argument on the first invalid shape.
void validate(const Phantom& phantom);

struct ShapeMedium {
  double eps_r;
  double sigma;
};

/// Two disks of radius 0.1 m at (0.3, -0.15) and (0.3, 0.15), plus a ring
/// centered at (-0.1, 0) with outer radius 0.3 m and inner radius 0.15 m.
Phantom austria_phantom(double eps_r, double sigma);

/// Per-shape medium override, ordered [disk 1, disk 2, ring].
Phantom austria_phantom(const std::array<ShapeMedium, 3>& media);

struct MediumMaps {
  Grid grid;
  std::vector<double> eps_r;  // dimensionless, >= 1
  std::vector<double> sigma;  // S/m, >= 0
};

/// Cell value = parameters of the last shape containing the cell center,
/// else background (eps_r = 1, sigma = 0).
MediumMaps rasterize(const Phantom& phantom, const Grid& grid);

/// Fraction of each cell covered by the shape. Cells fully inside or outside
/// are decided exactly; boundary cells are subsampled on an s x s lattice.
/// Used where staircase area jitter would mask the quantity under test
/// (smooth-scatterer solver validation against the analytic cylinder).
std::vector<double> coverage_fraction(const Shape& shape, const Grid& grid,
                                      int subsamples_per_side = 64);

struct ContrastMap {
  Grid grid;
  double freq = 0.0;
  std::vector<cplx> chi;
};

/// chi = (eps_r - 1) - j*sigma/(2*pi*freq*eps0), per cell.
ContrastMap contrast_map(const MediumMaps& medium, double freq);

/// Same contrast formula for a single cell.
cplx contrast_value(double eps_r, double sigma, double freq);

// JSON scene file round trip; schema documented in docs/formats.md.
std::string phantom_to_json(const Phantom& phantom);
Phantom phantom_from_json(const std::string& text);
void save_phantom(const Phantom& phantom, const std::string& path);
Phantom load_phantom(const std::string& path);

}  // namespace ccpinn
