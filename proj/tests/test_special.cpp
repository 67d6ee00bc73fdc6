#include <cmath>
#include <complex>
#include <random>

#include "ccpinn/special.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccpinn;

// The power-series oracles in oracles.hpp are independent of the library
// implementation (which delegates to std::cyl_bessel_j / std::cyl_neumann).
// Series accuracy holds to ~1e-12 relative for arguments up to about 8.

TEST_CASE("order-zero Hankel function against series oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> arg(0.5, 8.0);
  for (int i = 0; i < 40; ++i) {
    double x = arg(rng);
    cplx lib = hankel2_0(x);
    cplx ref = oracle::h0_2_series(x);
    CHECK(std::abs(lib - ref) <= 1e-10 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("order-one Hankel function against series oracle") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> arg(0.5, 8.0);
  for (int i = 0; i < 40; ++i) {
    double x = arg(rng);
    cplx lib = hankel2_1(x);
    cplx ref = oracle::h1_2_series(x);
    CHECK(std::abs(lib - ref) <= 1e-10 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("general-order Hankel agrees with fixed-order versions") {
  for (double x : {0.7, 1.3, 2.9, 6.1}) {
    CHECK(std::abs(hankel2(0, x) - hankel2_0(x)) == 0.0);
    CHECK(std::abs(hankel2(1, x) - hankel2_1(x)) == 0.0);
  }
}

TEST_CASE("Hankel recurrence H_{n+1} = (2n/x) H_n - H_{n-1}") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> arg(1.0, 8.0);
  for (int i = 0; i < 20; ++i) {
    double x = arg(rng);
    for (int n = 1; n <= 6; ++n) {
      cplx lhs = hankel2(n + 1, x);
      cplx rhs = (2.0 * n / x) * hankel2(n, x) - hankel2(n - 1, x);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("negative-order parity") {
  for (double x : {0.8, 2.2, 5.5}) {
    for (int n = 1; n <= 5; ++n) {
      double sign = (n % 2 == 0) ? 1.0 : -1.0;
      CHECK(bessel_j(-n, x) == doctest::Approx(sign * bessel_j(n, x))
                                   .epsilon(1e-14));
      cplx h = hankel2(-n, x);
      cplx expect = sign * hankel2(n, x);
      CHECK(std::abs(h - expect) <= 1e-14 * (1.0 + std::abs(expect)));
    }
  }
}

TEST_CASE("real Bessel J against series oracle") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> arg(0.1, 8.0);
  for (int i = 0; i < 40; ++i) {
    double x = arg(rng);
    CHECK(bessel_j(0, x) == doctest::Approx(oracle::j0_series(x))
                                .epsilon(1e-11));
    CHECK(bessel_j(1, x) == doctest::Approx(oracle::j1_series(x))
                                .epsilon(1e-11));
  }
}

TEST_CASE("complex Bessel J reduces to the real one on the real axis") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> arg(0.1, 10.0);
  for (int i = 0; i < 30; ++i) {
    double x = arg(rng);
    for (int n = 0; n <= 4; ++n) {
      cplx z = bessel_j_complex(n, cplx(x, 0.0));
      double ref = bessel_j(n, x);
      CHECK(std::abs(z - cplx(ref, 0.0)) <= 1e-11 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("complex Bessel J satisfies the recurrence off the real axis") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> re(0.3, 6.0);
  std::uniform_real_distribution<double> im(-2.0, -0.01);
  for (int i = 0; i < 20; ++i) {
    cplx z(re(rng), im(rng));
    for (int n = 1; n <= 4; ++n) {
      cplx lhs = bessel_j_complex(n + 1, z);
      cplx rhs = (2.0 * n / z) * bessel_j_complex(n, z) -
                 bessel_j_complex(n - 1, z);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("Wronskian J_{n+1} Y_n - J_n Y_{n+1} = 2/(pi x)") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> arg(0.5, 12.0);
  for (int i = 0; i < 30; ++i) {
    double x = arg(rng);
    for (int n = 0; n <= 3; ++n) {
      // Y_n = -imag part of H_n^(2).
      double yn = -hankel2(n, x).imag();
      double yn1 = -hankel2(n + 1, x).imag();
      double w = bessel_j(n + 1, x) * yn - bessel_j(n, x) * yn1;
      CHECK(w == doctest::Approx(2.0 / (oracle::pi_const * x)).epsilon(1e-10));
    }
  }
}
