#pragma once

#include <array>
#include <random>
#include <vector>

#include "ccpinn/field.hpp"
#include "ccpinn/operators.hpp"

namespace ccpinn {

/// Direct dense solve of (I - G_D diag(chi)) E_tot = E_inc for all incident
/// rows. Intended for modest grids; the iterative path covers refined ones.
CMatrix forward_solve_dense(const std::vector<cplx>& chi, const CMatrix& e_inc,
                            const CMatrix& g_dense);

/// BiCGSTAB on the state equation with FFT-accelerated operator applies.
/// Converges to ||r|| <= tol * ||E_inc row||; throws a diagnostic carrying
/// the residual history when an incident row fails to converge.
CMatrix forward_solve_fft(const std::vector<cplx>& chi, const CMatrix& e_inc,
                          const SpectralKernel& kernel, double tol = 1e-10,
                          int max_iter = 5000);

/// Scattered field of a homogeneous circular cylinder centered at the origin,
/// illuminated by a unit line source, via the cylindrical-harmonic series.
/// Truncation at max(ceil(k0*radius), 1) + 15 orders unless overridden.
std::vector<cplx> mie_cylinder_scattered(
    double radius, double eps_r, double sigma, double k0,
    std::array<double, 2> tx_pos,
    const std::vector<std::array<double, 2>>& rx_positions,
    int truncation_override = -1);

/// y' = y + sqrt(||y||^2 / (N * 10^(snr/10))) * (n_re + j*n_im)/sqrt(2) with
/// standard-normal draws, n_re before n_im per element. Infinite snr_db is a
/// no-op; an empty vector throws.
void add_noise(std::vector<cplx>& y, double snr_db, std::mt19937_64& rng);

}  // namespace ccpinn
