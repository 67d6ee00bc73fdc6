#include "ccpinn/kernels.hpp"

#include <algorithm>
#include <cstring>

#include "ccpinn/parallel.hpp"

namespace ccpinn::kernels {

namespace {

// Single-row i-k-j product used for the tail of the blocked loops.
void forward_one_row(const double* x, const double* WT, const double* bias,
                     double* y, int K, int O) {
  std::memcpy(y, bias, sizeof(double) * static_cast<std::size_t>(O));
  for (int k = 0; k < K; ++k) {
    const double a = x[k];
    const double* w = WT + static_cast<std::size_t>(k) * O;
    for (int o = 0; o < O; ++o) y[o] += a * w[o];
  }
}

void grad_input_one_row(const double* dy, const double* W, double* dx,
                        int K, int O) {
  std::memset(dx, 0, sizeof(double) * static_cast<std::size_t>(K));
  for (int o = 0; o < O; ++o) {
    const double a = dy[o];
    const double* w = W + static_cast<std::size_t>(o) * K;
    for (int k = 0; k < K; ++k) dx[k] += a * w[k];
  }
}

}  // namespace

void linear_forward(const double* X, const double* WT, const double* bias,
                    double* Y, int B, int K, int O) {
  const int B4 = B - (B % 4);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    if (parallel::enabled() && B4 >= 256)
#endif
  for (int b = 0; b < B4; b += 4) {
    const double* x0 = X + static_cast<std::size_t>(b) * K;
    const double* x1 = x0 + K;
    const double* x2 = x1 + K;
    const double* x3 = x2 + K;
    double* y0 = Y + static_cast<std::size_t>(b) * O;
    double* y1 = y0 + O;
    double* y2 = y1 + O;
    double* y3 = y2 + O;
    for (int o = 0; o < O; ++o) {
      const double bv = bias[o];
      y0[o] = bv;
      y1[o] = bv;
      y2[o] = bv;
      y3[o] = bv;
    }
    for (int k = 0; k < K; ++k) {
      const double a0 = x0[k];
      const double a1 = x1[k];
      const double a2 = x2[k];
      const double a3 = x3[k];
      const double* w = WT + static_cast<std::size_t>(k) * O;
      for (int o = 0; o < O; ++o) {
        const double wv = w[o];
        y0[o] += a0 * wv;
        y1[o] += a1 * wv;
        y2[o] += a2 * wv;
        y3[o] += a3 * wv;
      }
    }
  }
  for (int b = B4; b < B; ++b) {
    forward_one_row(X + static_cast<std::size_t>(b) * K, WT, bias,
                    Y + static_cast<std::size_t>(b) * O, K, O);
  }
}

void linear_grad_input(const double* dY, const double* W, double* dX,
                       int B, int K, int O) {
  const int B4 = B - (B % 4);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    if (parallel::enabled() && B4 >= 256)
#endif
  for (int b = 0; b < B4; b += 4) {
    const double* d0 = dY + static_cast<std::size_t>(b) * O;
    const double* d1 = d0 + O;
    const double* d2 = d1 + O;
    const double* d3 = d2 + O;
    double* x0 = dX + static_cast<std::size_t>(b) * K;
    double* x1 = x0 + K;
    double* x2 = x1 + K;
    double* x3 = x2 + K;
    std::memset(x0, 0, sizeof(double) * static_cast<std::size_t>(4 * K));
    for (int o = 0; o < O; ++o) {
      const double a0 = d0[o];
      const double a1 = d1[o];
      const double a2 = d2[o];
      const double a3 = d3[o];
      const double* w = W + static_cast<std::size_t>(o) * K;
      for (int k = 0; k < K; ++k) {
        const double wv = w[k];
        x0[k] += a0 * wv;
        x1[k] += a1 * wv;
        x2[k] += a2 * wv;
        x3[k] += a3 * wv;
      }
    }
  }
  for (int b = B4; b < B; ++b) {
    grad_input_one_row(dY + static_cast<std::size_t>(b) * O, W,
                       dX + static_cast<std::size_t>(b) * K, K, O);
  }
}

void linear_grad_params(const double* X, const double* dY, double* dW,
                        double* db, int B, int K, int O) {
  constexpr int tile = 32;
  const int ntiles = (O + tile - 1) / tile;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    if (parallel::enabled() && ntiles >= 4)
#endif
  for (int t = 0; t < ntiles; ++t) {
    const int o0 = t * tile;
    const int o1 = std::min(o0 + tile, O);
    for (int b = 0; b < B; ++b) {
      const double* x = X + static_cast<std::size_t>(b) * K;
      const double* dy = dY + static_cast<std::size_t>(b) * O;
      for (int o = o0; o < o1; ++o) {
        const double a = dy[o];
        double* w = dW + static_cast<std::size_t>(o) * K;
        for (int k = 0; k < K; ++k) w[k] += a * x[k];
        db[o] += a;
      }
    }
  }
}

void cmat_apply_rows(const cplx* AT, const cplx* X, cplx* Y,
                     int P, int N, int Q) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && P >= 4)
#endif
  for (int p = 0; p < P; ++p) {
    const double* xp =
        reinterpret_cast<const double*>(X + static_cast<std::size_t>(p) * N);
    double* yp = reinterpret_cast<double*>(Y + static_cast<std::size_t>(p) * Q);
    std::memset(yp, 0, sizeof(double) * static_cast<std::size_t>(2 * Q));
    for (int n = 0; n < N; ++n) {
      const double ar = xp[2 * n];
      const double ai = xp[2 * n + 1];
      const double* w =
          reinterpret_cast<const double*>(AT + static_cast<std::size_t>(n) * Q);
      for (int q = 0; q < Q; ++q) {
        const double wr = w[2 * q];
        const double wi = w[2 * q + 1];
        yp[2 * q] += ar * wr - ai * wi;
        yp[2 * q + 1] += ar * wi + ai * wr;
      }
    }
  }
}

void cmat_adjoint_rows(const cplx* A, const cplx* X, cplx* Y,
                       int P, int Q, int N) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && P >= 4)
#endif
  for (int p = 0; p < P; ++p) {
    const double* xp =
        reinterpret_cast<const double*>(X + static_cast<std::size_t>(p) * Q);
    double* yp = reinterpret_cast<double*>(Y + static_cast<std::size_t>(p) * N);
    std::memset(yp, 0, sizeof(double) * static_cast<std::size_t>(2 * N));
    for (int q = 0; q < Q; ++q) {
      const double ar = xp[2 * q];
      const double ai = xp[2 * q + 1];
      const double* w =
          reinterpret_cast<const double*>(A + static_cast<std::size_t>(q) * N);
      for (int n = 0; n < N; ++n) {
        // conj(w) * a
        const double wr = w[2 * n];
        const double wi = w[2 * n + 1];
        yp[2 * n] += ar * wr + ai * wi;
        yp[2 * n + 1] += ai * wr - ar * wi;
      }
    }
  }
}

}  // namespace ccpinn::kernels
