#pragma once

#include <complex>

namespace ccpinn {

using cplx = std::complex<double>;

/// Hankel functions of the second kind, H_n^(2)(x) = J_n(x) - j*Y_n(x),
/// for real x > 0. These fix the radiation convention under e^{j omega t}.
cplx hankel2_0(double x);
cplx hankel2_1(double x);
cplx hankel2(int n, double x);

double bessel_j(int n, double x);

/// J_n(z) for complex argument by the ascending power series; accurate for
/// |z| up to a few tens, which covers every wavenumber*radius used here.
cplx bessel_j_complex(int n, cplx z);

}  // namespace ccpinn
