#include "ccpinn/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "ccpinn/constants.hpp"
#include "ccpinn/parallel.hpp"
#include "ccpinn/special.hpp"

namespace ccpinn {

namespace {

struct CellQuadrature {
  double k0 = 0.0;
  double a = 0.0;     // equivalent-circle radius, spacing/sqrt(pi)
  cplx off_pref;      // -(j*pi*k0*a/2) * J1(k0*a)
  cplx self_entry;    // -(j*pi/2)*k0*a*H1^(2)(k0*a) - 1
};

CellQuadrature make_quadrature(const Grid& grid, double k0) {
  if (!(k0 > 0.0)) {
    throw std::invalid_argument("operators: k0 must be positive");
  }
  CellQuadrature q;
  q.k0 = k0;
  q.a = grid.spacing / std::sqrt(pi);
  const double ka = k0 * q.a;
  q.off_pref = cplx(0.0, -pi * ka / 2.0) * bessel_j(1, ka);
  q.self_entry = cplx(0.0, -pi / 2.0) * ka * hankel2_1(ka) - 1.0;
  return q;
}

bool inside_roi(double x, double y, const Grid& grid) {
  return std::fabs(x) <= grid.half_width && std::fabs(y) <= grid.half_width;
}

// Displacement table for the dense operator and the spectral kernel:
// entry(dx, dy) for dx, dy in [-(n-1), n-1].
std::vector<cplx> displacement_table(const Grid& grid,
                                     const CellQuadrature& q) {
  const int n = grid.n;
  const int w = 2 * n - 1;
  std::vector<cplx> table(static_cast<std::size_t>(w) * w);
  for (int dy = -(n - 1); dy <= n - 1; ++dy) {
    for (int dx = -(n - 1); dx <= n - 1; ++dx) {
      const std::size_t idx =
          static_cast<std::size_t>(dy + n - 1) * w + (dx + n - 1);
      if (dx == 0 && dy == 0) {
        table[idx] = q.self_entry;
      } else {
        const double d = grid.spacing * std::sqrt(double(dx) * dx +
                                                  double(dy) * dy);
        table[idx] = q.off_pref * hankel2_0(q.k0 * d);
      }
    }
  }
  return table;
}

}  // namespace

CMatrix incident_fields(const ArrayLayout& layout, const Grid& grid,
                        double k0) {
  if (!(k0 > 0.0)) {
    throw std::invalid_argument("incident_fields: k0 must be positive");
  }
  const int P = layout.ntx();
  const int ng = grid.num_cells();
  for (const auto& t : layout.tx) {
    if (inside_roi(t[0], t[1], grid)) {
      throw std::invalid_argument(
          "incident_fields: transmitter inside the ROI");
    }
  }
  const double singular = grid.spacing * 1e-9;
  for (int p = 0; p < P; ++p) {
    for (int n = 0; n < ng; ++n) {
      const double d = std::hypot(grid.center_x(n) - layout.tx[p][0],
                                  grid.center_y(n) - layout.tx[p][1]);
      if (d <= singular) {
        throw std::invalid_argument(
            "incident_fields: transmitter coincides with a cell center");
      }
    }
  }
  CMatrix e(P, ng);
  const cplx pref(0.0, -0.25);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && P >= 2)
#endif
  for (int p = 0; p < P; ++p) {
    const double txx = layout.tx[p][0];
    const double txy = layout.tx[p][1];
    cplx* row = e.row(p);
    for (int n = 0; n < ng; ++n) {
      const double d =
          std::hypot(grid.center_x(n) - txx, grid.center_y(n) - txy);
      row[n] = pref * hankel2_0(k0 * d);
    }
  }
  return e;
}

CMatrix data_operator(const ArrayLayout& layout, const Grid& grid, double k0) {
  const CellQuadrature quad = make_quadrature(grid, k0);
  const int Q = layout.nrx();
  const int ng = grid.num_cells();
  for (const auto& r : layout.rx) {
    if (inside_roi(r[0], r[1], grid)) {
      throw std::invalid_argument("data_operator: receiver inside the ROI");
    }
  }
  CMatrix gs(Q, ng);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && Q >= 2)
#endif
  for (int q = 0; q < Q; ++q) {
    const double rxx = layout.rx[q][0];
    const double rxy = layout.rx[q][1];
    cplx* row = gs.row(q);
    for (int n = 0; n < ng; ++n) {
      const double d =
          std::hypot(grid.center_x(n) - rxx, grid.center_y(n) - rxy);
      row[n] = quad.off_pref * hankel2_0(k0 * d);
    }
  }
  return gs;
}

CMatrix domain_operator_dense(const Grid& grid, double k0) {
  const CellQuadrature quad = make_quadrature(grid, k0);
  const std::vector<cplx> table = displacement_table(grid, quad);
  const int n = grid.n;
  const int ng = grid.num_cells();
  const int w = 2 * n - 1;
  CMatrix gd(ng, ng);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && ng >= 64)
#endif
  for (int m = 0; m < ng; ++m) {
    const int mx = m % n;
    const int my = m / n;
    cplx* row = gd.row(m);
    for (int c = 0; c < ng; ++c) {
      const int dx = (c % n) - mx;
      const int dy = (c / n) - my;
      row[c] = table[static_cast<std::size_t>(dy + n - 1) * w + (dx + n - 1)];
    }
  }
  return gd;
}

SpectralKernel build_spectral_kernel(const Grid& grid, double k0,
                                     int pad_factor) {
  if (pad_factor < 2) {
    throw std::invalid_argument(
        "build_spectral_kernel: pad_factor must be >= 2 for linear "
        "convolution");
  }
  const CellQuadrature quad = make_quadrature(grid, k0);
  const std::vector<cplx> table = displacement_table(grid, quad);
  const int n = grid.n;
  const int w = 2 * n - 1;
  SpectralKernel kernel;
  kernel.n = n;
  kernel.pad = pad_factor;
  kernel.side = pad_factor * n;
  kernel.k0 = k0;
  const int m = kernel.side;
  kernel.ghat.assign(static_cast<std::size_t>(m) * m, cplx(0.0, 0.0));
  for (int dy = -(n - 1); dy <= n - 1; ++dy) {
    const int ry = ((dy % m) + m) % m;
    for (int dx = -(n - 1); dx <= n - 1; ++dx) {
      const int rxc = ((dx % m) + m) % m;
      kernel.ghat[static_cast<std::size_t>(ry) * m + rxc] =
          table[static_cast<std::size_t>(dy + n - 1) * w + (dx + n - 1)];
    }
  }
  kernel.fft = std::make_shared<Fft2>(m);
  kernel.fft->forward(kernel.ghat.data());
  const double inv_norm = 1.0 / (static_cast<double>(m) * m);
  for (cplx& v : kernel.ghat) v *= inv_norm;
  return kernel;
}

namespace {

// Shared pipeline for the forward and adjoint applies; conjugating input and
// output turns G_D into G_D^H because the operator matrix is symmetric.
template <bool Adjoint>
void apply_spectral(const SpectralKernel& kernel, const cplx* J, cplx* out,
                    int batch) {
  if (!kernel.fft || kernel.fft->side() != kernel.side) {
    throw std::invalid_argument("apply_domain_operator: kernel not built");
  }
  const int n = kernel.n;
  const int m = kernel.side;
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  const std::size_t padded = static_cast<std::size_t>(m) * m;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    if (parallel::enabled() && batch >= 2)
#endif
  for (int b = 0; b < batch; ++b) {
    static thread_local std::vector<cplx> buf;
    buf.assign(padded, cplx(0.0, 0.0));
    const cplx* src = J + static_cast<std::size_t>(b) * cells;
    for (int iy = 0; iy < n; ++iy) {
      cplx* dstrow = buf.data() + static_cast<std::size_t>(iy) * m;
      const cplx* srow = src + static_cast<std::size_t>(iy) * n;
      if constexpr (Adjoint) {
        for (int ix = 0; ix < n; ++ix) dstrow[ix] = std::conj(srow[ix]);
      } else {
        for (int ix = 0; ix < n; ++ix) dstrow[ix] = srow[ix];
      }
    }
    kernel.fft->forward(buf.data());
    for (std::size_t i = 0; i < padded; ++i) buf[i] *= kernel.ghat[i];
    kernel.fft->inverse(buf.data());
    cplx* dst = out + static_cast<std::size_t>(b) * cells;
    for (int iy = 0; iy < n; ++iy) {
      const cplx* srow = buf.data() + static_cast<std::size_t>(iy) * m;
      cplx* drow = dst + static_cast<std::size_t>(iy) * n;
      if constexpr (Adjoint) {
        for (int ix = 0; ix < n; ++ix) drow[ix] = std::conj(srow[ix]);
      } else {
        for (int ix = 0; ix < n; ++ix) drow[ix] = srow[ix];
      }
    }
  }
}

}  // namespace

void apply_domain_operator(const SpectralKernel& kernel, const cplx* J,
                           cplx* out, int batch) {
  apply_spectral<false>(kernel, J, out, batch);
}

void apply_domain_adjoint(const SpectralKernel& kernel, const cplx* X,
                          cplx* out, int batch) {
  apply_spectral<true>(kernel, X, out, batch);
}

}  // namespace ccpinn
