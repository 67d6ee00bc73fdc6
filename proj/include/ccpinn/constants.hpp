#pragma once

namespace ccpinn {

inline constexpr double c0 = 299792458.0;           // vacuum speed of light, m/s
inline constexpr double eps0 = 8.8541878128e-12;    // vacuum permittivity, F/m
inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace ccpinn
