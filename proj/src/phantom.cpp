#include "ccpinn/phantom.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ccpinn/constants.hpp"
#include "json.hpp"

namespace ccpinn {

bool Shape::contains(double x, double y) const {
  const double dx = x - cx;
  const double dy = y - cy;
  const double d2 = dx * dx + dy * dy;
  if (kind == ShapeKind::disk) return d2 <= radius * radius;
  return d2 >= inner * inner && d2 <= outer * outer;
}

void validate(const Phantom& phantom) {
  for (const Shape& s : phantom.shapes) {
    if (s.kind == ShapeKind::disk) {
      if (!(s.radius > 0.0)) {
        throw std::invalid_argument("phantom: disk radius must be positive");
      }
    } else {
      if (!(s.inner > 0.0) || !(s.outer > s.inner)) {
        throw std::invalid_argument("phantom: annulus needs outer > inner > 0");
      }
    }
    if (!(s.eps_r >= 1.0)) {
      throw std::invalid_argument("phantom: eps_r must be >= 1");
    }
    if (!(s.sigma >= 0.0)) {
      throw std::invalid_argument("phantom: sigma must be >= 0");
    }
  }
}

Phantom austria_phantom(const std::array<ShapeMedium, 3>& media) {
  Phantom p;
  Shape d1;
  d1.kind = ShapeKind::disk;
  d1.cx = 0.3;
  d1.cy = -0.15;
  d1.radius = 0.1;
  d1.eps_r = media[0].eps_r;
  d1.sigma = media[0].sigma;
  Shape d2 = d1;
  d2.cy = 0.15;
  d2.eps_r = media[1].eps_r;
  d2.sigma = media[1].sigma;
  Shape ring;
  ring.kind = ShapeKind::annulus;
  ring.cx = -0.1;
  ring.cy = 0.0;
  ring.outer = 0.3;
  ring.inner = 0.15;
  ring.eps_r = media[2].eps_r;
  ring.sigma = media[2].sigma;
  p.shapes = {d1, d2, ring};
  validate(p);
  return p;
}

Phantom austria_phantom(double eps_r, double sigma) {
  return austria_phantom({ShapeMedium{eps_r, sigma}, ShapeMedium{eps_r, sigma},
                          ShapeMedium{eps_r, sigma}});
}

MediumMaps rasterize(const Phantom& phantom, const Grid& grid) {
  validate(phantom);
  MediumMaps maps;
  maps.grid = grid;
  maps.eps_r.assign(static_cast<std::size_t>(grid.num_cells()), 1.0);
  maps.sigma.assign(static_cast<std::size_t>(grid.num_cells()), 0.0);
  for (int idx = 0; idx < grid.num_cells(); ++idx) {
    const double x = grid.center_x(idx);
    const double y = grid.center_y(idx);
    for (const Shape& s : phantom.shapes) {
      if (s.contains(x, y)) {
        maps.eps_r[idx] = s.eps_r;
        maps.sigma[idx] = s.sigma;
      }
    }
  }
  return maps;
}

namespace {

// Covered fraction of the square cell around (cx, cy) by the disk of radius
// r at (sx, sy). The cell is classified exactly via its nearest and farthest
// points from the disk center; only straddling cells are subsampled.
double disk_cell_fraction(double sx, double sy, double r, double cx, double cy,
                          double spacing, int s) {
  const double h = 0.5 * spacing;
  const double ax = std::fabs(cx - sx);
  const double ay = std::fabs(cy - sy);
  const double dmin = std::hypot(std::max(0.0, ax - h), std::max(0.0, ay - h));
  const double dmax = std::hypot(ax + h, ay + h);
  if (dmin >= r) return 0.0;
  if (dmax <= r) return 1.0;
  int inside = 0;
  for (int a = 0; a < s; ++a) {
    const double px = cx + ((a + 0.5) / s - 0.5) * spacing;
    for (int b = 0; b < s; ++b) {
      const double py = cy + ((b + 0.5) / s - 0.5) * spacing;
      const double dx = px - sx;
      const double dy = py - sy;
      if (dx * dx + dy * dy <= r * r) ++inside;
    }
  }
  return static_cast<double>(inside) / (static_cast<double>(s) * s);
}

}  // namespace

std::vector<double> coverage_fraction(const Shape& shape, const Grid& grid,
                                      int subsamples_per_side) {
  if (subsamples_per_side < 1) {
    throw std::invalid_argument("coverage_fraction: subsamples must be >= 1");
  }
  std::vector<double> frac(static_cast<std::size_t>(grid.num_cells()));
  for (int idx = 0; idx < grid.num_cells(); ++idx) {
    const double x = grid.center_x(idx);
    const double y = grid.center_y(idx);
    double f = disk_cell_fraction(
        shape.cx, shape.cy, shape.kind == ShapeKind::disk ? shape.radius
                                                          : shape.outer,
        x, y, grid.spacing, subsamples_per_side);
    if (shape.kind == ShapeKind::annulus) {
      f -= disk_cell_fraction(shape.cx, shape.cy, shape.inner, x, y,
                              grid.spacing, subsamples_per_side);
    }
    frac[static_cast<std::size_t>(idx)] = f;
  }
  return frac;
}

cplx contrast_value(double eps_r, double sigma, double freq) {
  if (!(freq > 0.0)) {
    throw std::invalid_argument("contrast: freq must be positive");
  }
  const double omega = 2.0 * pi * freq;
  return cplx(eps_r - 1.0, -sigma / (omega * eps0));
}

ContrastMap contrast_map(const MediumMaps& medium, double freq) {
  if (!(freq > 0.0)) {
    throw std::invalid_argument("contrast_map: freq must be positive");
  }
  ContrastMap cm;
  cm.grid = medium.grid;
  cm.freq = freq;
  cm.chi.resize(medium.eps_r.size());
  const double omega = 2.0 * pi * freq;
  for (std::size_t i = 0; i < medium.eps_r.size(); ++i) {
    cm.chi[i] = cplx(medium.eps_r[i] - 1.0, -medium.sigma[i] / (omega * eps0));
  }
  return cm;
}

namespace {

nlohmann::json shape_to_json(const Shape& s) {
  nlohmann::json j;
  j["kind"] = s.kind == ShapeKind::disk ? "disk" : "annulus";
  j["center"] = {s.cx, s.cy};
  if (s.kind == ShapeKind::disk) {
    j["radius"] = s.radius;
  } else {
    j["outer"] = s.outer;
    j["inner"] = s.inner;
  }
  j["eps_r"] = s.eps_r;
  j["sigma"] = s.sigma;
  return j;
}

Shape shape_from_json(const nlohmann::json& j) {
  Shape s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "disk") {
    s.kind = ShapeKind::disk;
    s.radius = j.at("radius").get<double>();
  } else if (kind == "annulus") {
    s.kind = ShapeKind::annulus;
    s.outer = j.at("outer").get<double>();
    s.inner = j.at("inner").get<double>();
  } else {
    throw std::invalid_argument("phantom: unknown shape kind '" + kind + "'");
  }
  s.cx = j.at("center").at(0).get<double>();
  s.cy = j.at("center").at(1).get<double>();
  s.eps_r = j.at("eps_r").get<double>();
  s.sigma = j.at("sigma").get<double>();
  return s;
}

}  // namespace

std::string phantom_to_json(const Phantom& phantom) {
  nlohmann::json j;
  j["shapes"] = nlohmann::json::array();
  for (const Shape& s : phantom.shapes) j["shapes"].push_back(shape_to_json(s));
  return j.dump(2);
}

Phantom phantom_from_json(const std::string& text) {
  Phantom p;
  nlohmann::json j = nlohmann::json::parse(text);
  for (const auto& js : j.at("shapes")) p.shapes.push_back(shape_from_json(js));
  validate(p);
  return p;
}

void save_phantom(const Phantom& phantom, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scene file: " + path);
  out << phantom_to_json(phantom) << "\n";
}

Phantom load_phantom(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return phantom_from_json(ss.str());
}

}  // namespace ccpinn
