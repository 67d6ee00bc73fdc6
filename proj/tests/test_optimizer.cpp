#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <vector>

#include "ccpinn/optimizer.hpp"
#include "doctest.h"

using namespace ccpinn;

TEST_CASE("adam reproduces hand-computed trajectories") {
  // Frozen oracle: params [1, -2], lr 0.1, default moments, three steps with
  // gradients [0.5,-1], [-0.25,0.75], [2,0.125].
  std::vector<double> p = {1.0, -2.0};
  AdamState st;
  adam_init(st, 2);

  const double g1[] = {0.5, -1.0};
  adam_step(st, p.data(), g1, 2, 0.1);
  CHECK(st.step == 1);
  CHECK(p[0] == doctest::Approx(0.900000002).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-1.900000001).epsilon(1e-14));
  CHECK(st.m[0] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(st.v[1] == doctest::Approx(0.001).epsilon(1e-12));

  const double g2[] = {-0.25, 0.75};
  adam_step(st, p.data(), g2, 2, 0.1);
  CHECK(p[0] == doctest::Approx(0.8733662987078463).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-1.8910675003605355).epsilon(1e-14));

  const double g3[] = {2.0, 0.125};
  adam_step(st, p.data(), g3, 2, 0.1);
  CHECK(st.step == 3);
  CHECK(p[0] == doctest::Approx(0.8063015345291531).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-1.8905585725409244).epsilon(1e-14));
}

TEST_CASE("first step moves by roughly the learning rate") {
  // Bias correction makes m_hat = g and v_hat = g^2 at step one, so the
  // update is lr * sign(g) up to the eps guard.
  std::vector<double> p = {0.0, 5.0, -3.0};
  AdamState st;
  adam_init(st, 3);
  const double g[] = {0.3, -40.0, 1e-3};
  adam_step(st, p.data(), g, 3, 0.01);
  CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(5.01).epsilon(1e-9));
  CHECK(p[2] == doctest::Approx(-3.01).epsilon(1e-4));
}

TEST_CASE("adam drives a quadratic to its minimum") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> target(16), x(16, 0.0), g(16);
  for (double& t : target) t = dist(rng);

  AdamState st;
  adam_init(st, x.size());
  for (int it = 0; it < 4000; ++it) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * (x[i] - target[i]);
    adam_step(st, x.data(), g.data(), x.size(), 0.05);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::fabs(x[i] - target[i]) < 1e-3);
  }
}

TEST_CASE("complex tensors viewed as real pairs update identically") {
  // The trainer feeds complex currents to adam as interleaved doubles; that
  // must equal running adam on the equivalent real array.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist(0.0, 1.0);
  const std::size_t nc = 9;
  std::vector<std::complex<double>> jc(nc);
  std::vector<double> jr(2 * nc), gr(2 * nc);
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = dist(rng), im = dist(rng);
    jc[i] = {re, im};
    jr[2 * i] = re;
    jr[2 * i + 1] = im;
  }
  for (double& g : gr) g = dist(rng);

  AdamState s1, s2;
  adam_init(s1, 2 * nc);
  adam_init(s2, 2 * nc);
  for (int it = 0; it < 5; ++it) {
    adam_step(s1, reinterpret_cast<double*>(jc.data()), gr.data(), 2 * nc, 0.02);
    adam_step(s2, jr.data(), gr.data(), 2 * nc, 0.02);
  }
  CHECK(std::memcmp(jc.data(), jr.data(), jr.size() * sizeof(double)) == 0);
}

TEST_CASE("adam rejects non-finite gradients and size mismatches") {
  std::vector<double> p = {1.0, 2.0, 3.0};
  AdamState st;
  adam_init(st, 3);
  const double bad_nan[] = {0.1, std::nan(""), 0.2};
  CHECK_THROWS_AS(adam_step(st, p.data(), bad_nan, 3, 0.1), std::runtime_error);
  const double bad_inf[] = {0.1, 0.2, INFINITY};
  CHECK_THROWS_AS(adam_step(st, p.data(), bad_inf, 3, 0.1), std::runtime_error);
  // A rejected step must not have touched the state.
  CHECK(st.step == 0);
  CHECK(st.m[1] == 0.0);
  const double ok[] = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(adam_step(st, p.data(), ok, 2, 0.1), std::invalid_argument);
}

TEST_CASE("cosine schedule hits its endpoints bitwise") {
  const double lr0 = 1e-3, fl = 1e-5;
  CHECK(cosine_lr(0, 3000, lr0, fl) == lr0);
  CHECK(cosine_lr(3000, 3000, lr0, fl) == fl);
  CHECK(cosine_lr(50, 100, lr0, fl) ==
        doctest::Approx(0.000505).epsilon(1e-12));
  CHECK(cosine_lr(25, 100, lr0, fl) ==
        doctest::Approx(0.000855017856687341).epsilon(1e-12));
  // Monotone non-increasing across the run.
  double prev = cosine_lr(0, 200, lr0, fl);
  for (int e = 1; e <= 200; ++e) {
    const double lr = cosine_lr(e, 200, lr0, fl);
    CHECK(lr <= prev);
    prev = lr;
  }
  CHECK_THROWS_AS(cosine_lr(0, 0, lr0, fl), std::invalid_argument);
  CHECK_THROWS_AS(cosine_lr(-1, 10, lr0, fl), std::invalid_argument);
  CHECK_THROWS_AS(cosine_lr(11, 10, lr0, fl), std::invalid_argument);
}
