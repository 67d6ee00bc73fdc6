#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "ccpinn/constants.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/phantom.hpp"
#include "doctest.h"

using namespace ccpinn;

TEST_CASE("grid spacing and cell centers") {
  Grid g = build_grid(0.5, 64);
  // These values are exact in binary floating point.
  CHECK(g.spacing == 0.015625);
  CHECK(g.num_cells() == 4096);
  CHECK(g.cell_coord(0) == -0.4921875);
  CHECK(g.cell_coord(63) == 0.4921875);

  Grid g2 = build_grid(0.5, 2);
  CHECK(g2.cell_coord(0) == -0.25);
  CHECK(g2.cell_coord(1) == 0.25);

  // Row-major indexing: idx = iy*n + ix.
  Grid g3 = build_grid(0.1, 8);
  int idx = 3 * 8 + 5;
  CHECK(g3.center_x(idx) == g3.cell_coord(5));
  CHECK(g3.center_y(idx) == g3.cell_coord(3));

  // Centers are symmetric about the origin.
  Grid g4 = build_grid(0.35, 17);
  for (int i = 0; i < 17; ++i) {
    CHECK(g4.cell_coord(i) == doctest::Approx(-g4.cell_coord(16 - i))
                                  .epsilon(1e-15));
  }
}

TEST_CASE("grid rejects bad parameters") {
  CHECK_THROWS_AS(build_grid(0.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(-0.5, 64), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.5, 0), std::invalid_argument);
}

namespace {

// Independent rasterization: direct enumeration against the shape list,
// applied back-to-front so the first hit is the last shape in order.
void reference_cell(const Phantom& ph, double x, double y, double* eps,
                    double* sig) {
  *eps = 1.0;
  *sig = 0.0;
  for (int s = static_cast<int>(ph.shapes.size()) - 1; s >= 0; --s) {
    const Shape& sh = ph.shapes[static_cast<std::size_t>(s)];
    double dx = x - sh.cx, dy = y - sh.cy;
    double dd = dx * dx + dy * dy;
    bool inside = sh.kind == ShapeKind::disk
                      ? dd <= sh.radius * sh.radius
                      : (dd >= sh.inner * sh.inner && dd <= sh.outer * sh.outer);
    if (inside) {
      *eps = sh.eps_r;
      *sig = sh.sigma;
      return;
    }
  }
}

int count_cells(const MediumMaps& maps, double eps) {
  int c = 0;
  for (double v : maps.eps_r)
    if (v == eps) ++c;
  return c;
}

}  // namespace

TEST_CASE("rasterized disk area approximates the analytic area") {
  Grid g = build_grid(0.5, 64);
  Phantom ph;
  Shape d;
  d.kind = ShapeKind::disk;
  d.cx = 0.0;
  d.cy = 0.0;
  d.radius = 0.1;
  d.eps_r = 2.0;
  ph.shapes.push_back(d);
  MediumMaps maps = rasterize(ph, g);
  double area = count_cells(maps, 2.0) * g.spacing * g.spacing;
  double exact = pi * 0.1 * 0.1;
  CHECK(std::abs(area - exact) / exact <= 0.04);
}

TEST_CASE("rasterize matches per-cell enumeration for random phantoms") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-0.35, 0.35);
  std::uniform_real_distribution<double> rad(0.03, 0.25);
  std::uniform_real_distribution<double> mat(1.0, 10.0);
  for (int trial = 0; trial < 8; ++trial) {
    Phantom ph;
    int nshapes = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < nshapes; ++s) {
      Shape sh;
      sh.cx = pos(rng);
      sh.cy = pos(rng);
      sh.eps_r = mat(rng);
      sh.sigma = 0.1 * mat(rng);
      if (rng() % 2 == 0) {
        sh.kind = ShapeKind::disk;
        sh.radius = rad(rng);
      } else {
        sh.kind = ShapeKind::annulus;
        double r1 = rad(rng), r2 = rad(rng);
        sh.outer = std::max(r1, r2) + 0.02;
        sh.inner = std::min(r1, r2);
      }
      ph.shapes.push_back(sh);
    }
    validate(ph);
    Grid g = build_grid(0.5, 32);
    MediumMaps maps = rasterize(ph, g);
    for (int idx = 0; idx < g.num_cells(); ++idx) {
      double eps, sig;
      reference_cell(ph, g.center_x(idx), g.center_y(idx), &eps, &sig);
      REQUIRE(maps.eps_r[static_cast<std::size_t>(idx)] == eps);
      REQUIRE(maps.sigma[static_cast<std::size_t>(idx)] == sig);
    }
  }
}

TEST_CASE("coverage fractions integrate to the analytic areas") {
  Grid g = build_grid(0.5, 64);
  Shape d;
  d.kind = ShapeKind::disk;
  d.cx = 0.13;
  d.cy = -0.07;
  d.radius = 0.1;
  d.eps_r = 2.0;
  std::vector<double> frac = coverage_fraction(d, g);
  double area = 0.0;
  for (double f : frac) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    area += f;
  }
  area *= g.spacing * g.spacing;
  CHECK(area == doctest::Approx(pi * 0.1 * 0.1).epsilon(1e-4));

  Shape ring;
  ring.kind = ShapeKind::annulus;
  ring.cx = -0.1;
  ring.outer = 0.3;
  ring.inner = 0.15;
  ring.eps_r = 2.0;
  std::vector<double> rfrac = coverage_fraction(ring, g);
  double rarea = 0.0;
  for (double f : rfrac) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    rarea += f;
  }
  rarea *= g.spacing * g.spacing;
  CHECK(rarea == doctest::Approx(pi * (0.3 * 0.3 - 0.15 * 0.15)).epsilon(1e-4));
}

TEST_CASE("later shapes overwrite earlier ones") {
  Phantom ph;
  Shape a, b;
  a.kind = ShapeKind::disk;
  a.cx = 0.0;
  a.radius = 0.2;
  a.eps_r = 3.0;
  b.kind = ShapeKind::disk;
  b.cx = 0.1;
  b.radius = 0.2;
  b.eps_r = 7.0;
  ph.shapes = {a, b};
  Grid g = build_grid(0.5, 64);
  MediumMaps maps = rasterize(ph, g);
  // Cell nearest the shared region (0.05, 0) lies inside both disks.
  int ix = 0;
  double best = 1e9;
  for (int i = 0; i < g.n; ++i) {
    double d = std::abs(g.cell_coord(i) - 0.05);
    if (d < best) {
      best = d;
      ix = i;
    }
  }
  int iy = g.n / 2;
  CHECK(maps.eps_r[static_cast<std::size_t>(iy) * g.n + ix] == 7.0);
}

TEST_CASE("austria phantom geometry") {
  Phantom ph = austria_phantom(6.0, 0.0);
  REQUIRE(ph.shapes.size() == 3);
  CHECK(ph.shapes[0].kind == ShapeKind::disk);
  CHECK(ph.shapes[0].cx == 0.3);
  CHECK(ph.shapes[0].cy == -0.15);
  CHECK(ph.shapes[0].radius == 0.1);
  CHECK(ph.shapes[1].cx == 0.3);
  CHECK(ph.shapes[1].cy == 0.15);
  CHECK(ph.shapes[2].kind == ShapeKind::annulus);
  CHECK(ph.shapes[2].cx == -0.1);
  CHECK(ph.shapes[2].cy == 0.0);
  CHECK(ph.shapes[2].outer == 0.3);
  CHECK(ph.shapes[2].inner == 0.15);
  for (const Shape& s : ph.shapes) {
    CHECK(s.eps_r == 6.0);
    CHECK(s.sigma == 0.0);
  }

  Grid g = build_grid(0.5, 64);
  MediumMaps maps = rasterize(ph, g);
  double cell_area = g.spacing * g.spacing;
  double object_area = count_cells(maps, 6.0) * cell_area;
  double exact = 2.0 * pi * 0.1 * 0.1 + pi * (0.3 * 0.3 - 0.15 * 0.15);
  CHECK(std::abs(object_area - exact) / exact <= 0.02);

  // Ring interior is background.
  int mid = 0;
  double best = 1e9;
  for (int i = 0; i < g.n; ++i) {
    double d = std::abs(g.cell_coord(i) + 0.1);
    if (d < best) {
      best = d;
      mid = i;
    }
  }
  CHECK(maps.eps_r[static_cast<std::size_t>(g.n / 2) * g.n + mid] == 1.0);
}

TEST_CASE("austria phantom with per-shape media") {
  Phantom ph = austria_phantom({ShapeMedium{6.0, 0.05}, ShapeMedium{6.0, 0.05},
                                ShapeMedium{9.0, 0.03}});
  REQUIRE(ph.shapes.size() == 3);
  CHECK(ph.shapes[0].eps_r == 6.0);
  CHECK(ph.shapes[0].sigma == 0.05);
  CHECK(ph.shapes[1].sigma == 0.05);
  CHECK(ph.shapes[2].eps_r == 9.0);
  CHECK(ph.shapes[2].sigma == 0.03);
  validate(ph);
}

TEST_CASE("phantom validation rejects bad shapes") {
  Phantom ph;
  Shape s;
  s.kind = ShapeKind::disk;
  s.radius = 0.0;
  s.eps_r = 2.0;
  ph.shapes = {s};
  CHECK_THROWS_AS(validate(ph), std::invalid_argument);

  s.radius = 0.1;
  s.eps_r = 0.5;
  ph.shapes = {s};
  CHECK_THROWS_AS(validate(ph), std::invalid_argument);

  s.eps_r = 2.0;
  s.sigma = -0.1;
  ph.shapes = {s};
  CHECK_THROWS_AS(validate(ph), std::invalid_argument);

  Shape ann;
  ann.kind = ShapeKind::annulus;
  ann.outer = 0.1;
  ann.inner = 0.2;
  ann.eps_r = 2.0;
  ph.shapes = {ann};
  CHECK_THROWS_AS(validate(ph), std::invalid_argument);

  ann.outer = 0.2;
  ann.inner = 0.0;
  ph.shapes = {ann};
  CHECK_THROWS_AS(validate(ph), std::invalid_argument);
}

TEST_CASE("contrast values") {
  cplx chi = contrast_value(6.0, 0.03, 0.3e9);
  CHECK(chi.real() == 5.0);
  CHECK(chi.imag() == doctest::Approx(-1.7975).epsilon(2e-4));

  // Lossless: purely real.
  cplx lossless = contrast_value(4.0, 0.0, 1.0e9);
  CHECK(lossless.real() == 3.0);
  CHECK(lossless.imag() == 0.0);

  // Background: exactly zero.
  cplx bg = contrast_value(1.0, 0.0, 0.5e9);
  CHECK(bg == cplx(0.0, 0.0));

  // Imaginary part scales as 1/frequency.
  cplx c1 = contrast_value(3.0, 0.2, 0.4e9);
  cplx c2 = contrast_value(3.0, 0.2, 0.8e9);
  CHECK(c1.imag() == doctest::Approx(2.0 * c2.imag()).epsilon(1e-14));

  // Closed form cross-check.
  double f = 0.7e9;
  double expected = -0.11 / (2.0 * pi * f * eps0);
  CHECK(contrast_value(2.5, 0.11, f).imag() ==
        doctest::Approx(expected).epsilon(1e-14));

  CHECK_THROWS_AS(contrast_value(6.0, 0.03, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(contrast_value(6.0, 0.03, -1.0e9), std::invalid_argument);
}

TEST_CASE("contrast map matches per-cell values") {
  Phantom ph = austria_phantom(6.0, 0.05);
  Grid g = build_grid(0.5, 32);
  MediumMaps maps = rasterize(ph, g);
  ContrastMap cm = contrast_map(maps, 0.4e9);
  REQUIRE(cm.chi.size() == static_cast<std::size_t>(g.num_cells()));
  CHECK(cm.freq == 0.4e9);
  for (int idx = 0; idx < g.num_cells(); ++idx) {
    auto u = static_cast<std::size_t>(idx);
    cplx expect = contrast_value(maps.eps_r[u], maps.sigma[u], 0.4e9);
    REQUIRE(cm.chi[u] == expect);
  }
}

TEST_CASE("phantom JSON round trip") {
  Phantom ph = austria_phantom(6.5, 0.0314159);
  Shape extra;
  extra.kind = ShapeKind::annulus;
  extra.cx = -0.123456789;
  extra.cy = 0.2718281828;
  extra.outer = 0.31;
  extra.inner = 0.07;
  extra.eps_r = 3.25;
  extra.sigma = 0.001;
  ph.shapes.push_back(extra);

  std::string text = phantom_to_json(ph);
  Phantom back = phantom_from_json(text);
  REQUIRE(back.shapes.size() == ph.shapes.size());
  for (std::size_t i = 0; i < ph.shapes.size(); ++i) {
    const Shape& a = ph.shapes[i];
    const Shape& b = back.shapes[i];
    CHECK(a.kind == b.kind);
    CHECK(a.cx == b.cx);
    CHECK(a.cy == b.cy);
    CHECK(a.radius == b.radius);
    CHECK(a.outer == b.outer);
    CHECK(a.inner == b.inner);
    CHECK(a.eps_r == b.eps_r);
    CHECK(a.sigma == b.sigma);
  }

  std::string path = "scene_roundtrip_test.json";
  save_phantom(ph, path);
  Phantom loaded = load_phantom(path);
  CHECK(loaded.shapes.size() == ph.shapes.size());
  CHECK(loaded.shapes.back().cy == extra.cy);
  std::remove(path.c_str());

  CHECK_THROWS(phantom_from_json("{not json"));
  CHECK_THROWS(phantom_from_json(R"({"shapes":[{"kind":"blob"}]})"));
}
