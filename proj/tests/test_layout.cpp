#include <cmath>
#include <stdexcept>

#include "ccpinn/layout.hpp"
#include "doctest.h"

using namespace ccpinn;

TEST_CASE("synthetic ring: 12 transmitters, 120 receivers, 30 deg exclusion") {
  ArrayLayout lay = circular_layout(3.0, 12, 120, 30.0);
  REQUIRE(lay.ntx() == 12);
  REQUIRE(lay.nrx() == 120);
  // 120 receivers at 3 deg pitch; strict < 30 deg removes offsets
  // 0, +-3, ..., +-27 deg: 19 receivers, leaving 101 active.
  for (int p = 0; p < 12; ++p) CHECK(lay.active_count(p) == 101);

  // All positions on the circle of radius 3.
  for (const auto& t : lay.tx)
    CHECK(std::hypot(t[0], t[1]) == doctest::Approx(3.0).epsilon(1e-12));
  for (const auto& r : lay.rx)
    CHECK(std::hypot(r[0], r[1]) == doctest::Approx(3.0).epsilon(1e-12));

  // First transmitter sits at angle 0.
  CHECK(lay.tx[0][0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(lay.tx[0][1] == doctest::Approx(0.0).epsilon(1e-12));

  // Transmitter 0 at 0 deg: receiver at 30 deg (index 10) is exactly on the
  // boundary and stays active; 27 deg (index 9) is masked.
  CHECK(lay.active(0, 10));
  CHECK(!lay.active(0, 9));
  CHECK(!lay.active(0, 0));
  CHECK(lay.active(0, 60));  // opposite side
  CHECK(!lay.active(0, 111));  // -27 deg wraps to index 111

  // Mask is symmetric under the shared rotation of tx and rx indices.
  for (int p = 0; p < 12; ++p) {
    for (int q = 0; q < 120; ++q) {
      int q_shift = (q + 10) % 120;  // one tx step = 10 rx steps
      CHECK(lay.active(p, q) == lay.active((p + 1) % 12, q_shift));
    }
  }
}

TEST_CASE("measured-geometry ring: 18 transmitters, 49 receivers, no exclusion") {
  ArrayLayout lay = circular_layout(1.67, 18, 49, 0.0);
  REQUIRE(lay.ntx() == 18);
  REQUIRE(lay.nrx() == 49);
  for (int p = 0; p < 18; ++p) CHECK(lay.active_count(p) == 49);
  int total = 0;
  for (int p = 0; p < 18; ++p) total += lay.active_count(p);
  CHECK(total == 18 * 49);
}

TEST_CASE("exclusion wide enough to blank a transmitter row throws") {
  CHECK_THROWS_AS(circular_layout(3.0, 12, 120, 180.0), std::invalid_argument);
  // 179 deg keeps the single receiver at 180 deg offset.
  ArrayLayout lay = circular_layout(3.0, 4, 4, 89.0);
  for (int p = 0; p < 4; ++p) CHECK(lay.active_count(p) >= 1);
}

TEST_CASE("layout parameter validation") {
  CHECK_THROWS_AS(circular_layout(0.0, 12, 120, 30.0), std::invalid_argument);
  CHECK_THROWS_AS(circular_layout(-1.0, 12, 120, 30.0), std::invalid_argument);
  CHECK_THROWS_AS(circular_layout(3.0, 0, 120, 30.0), std::invalid_argument);
  CHECK_THROWS_AS(circular_layout(3.0, 12, 0, 30.0), std::invalid_argument);
  CHECK_THROWS_AS(circular_layout(3.0, 12, 120, -5.0), std::invalid_argument);
}

TEST_CASE("ring must clear the region of interest when a half-width is given") {
  // radius must exceed half_width * sqrt(2); 0.5 * sqrt(2) ~ 0.7071.
  CHECK_THROWS_AS(circular_layout(0.7, 12, 120, 30.0, 0.5),
                  std::invalid_argument);
  ArrayLayout ok = circular_layout(0.75, 12, 120, 30.0, 0.5);
  CHECK(ok.ntx() == 12);
  // Without the half-width the same radius is accepted.
  ArrayLayout no_check = circular_layout(0.7, 12, 120, 30.0);
  CHECK(no_check.ntx() == 12);
}
