#include "ccpinn/special.hpp"

#include <cmath>
#include <stdexcept>

namespace ccpinn {

cplx hankel2_0(double x) {
  return cplx(std::cyl_bessel_j(0.0, x), -std::cyl_neumann(0.0, x));
}

cplx hankel2_1(double x) {
  return cplx(std::cyl_bessel_j(1.0, x), -std::cyl_neumann(1.0, x));
}

cplx hankel2(int n, double x) {
  const double nu = static_cast<double>(n < 0 ? -n : n);
  cplx h(std::cyl_bessel_j(nu, x), -std::cyl_neumann(nu, x));
  if (n < 0 && (n & 1)) h = -h;
  return h;
}

double bessel_j(int n, double x) {
  const double v = std::cyl_bessel_j(static_cast<double>(n < 0 ? -n : n), x);
  return (n < 0 && (n & 1)) ? -v : v;
}

cplx bessel_j_complex(int n, cplx z) {
  if (n < 0) {
    const cplx v = bessel_j_complex(-n, z);
    return (n & 1) ? -v : v;
  }
  // term_0 = (z/2)^n / n!, term_{s+1} = term_s * (-(z/2)^2) / ((s+1)(n+s+1))
  cplx term = 1.0;
  const cplx half = 0.5 * z;
  for (int k = 1; k <= n; ++k) term *= half / static_cast<double>(k);
  const cplx ratio_base = -half * half;
  cplx sum = term;
  for (int s = 0; s < 400; ++s) {
    term *= ratio_base / static_cast<double>((s + 1) * (n + s + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) return sum;
  }
  if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) {
    throw std::runtime_error("bessel_j_complex: series diverged");
  }
  return sum;
}

}  // namespace ccpinn
