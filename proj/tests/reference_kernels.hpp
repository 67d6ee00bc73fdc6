#pragma once

// Naive serial reference implementations of the hot kernels, kept for
// differential testing and benchmarking against the blocked/OpenMP versions.

#include <complex>
#include <cstddef>

namespace refk {

using cplx = std::complex<double>;

inline void linear_forward(const double* X, const double* WT,
                           const double* bias, double* Y, int B, int K,
                           int O) {
  for (int b = 0; b < B; ++b) {
    for (int o = 0; o < O; ++o) {
      double acc = bias[o];
      for (int k = 0; k < K; ++k) {
        acc += X[std::size_t(b) * K + k] * WT[std::size_t(k) * O + o];
      }
      Y[std::size_t(b) * O + o] = acc;
    }
  }
}

inline void linear_grad_input(const double* dY, const double* W, double* dX,
                              int B, int K, int O) {
  for (int b = 0; b < B; ++b) {
    for (int k = 0; k < K; ++k) {
      double acc = 0.0;
      for (int o = 0; o < O; ++o) {
        acc += dY[std::size_t(b) * O + o] * W[std::size_t(o) * K + k];
      }
      dX[std::size_t(b) * K + k] = acc;
    }
  }
}

inline void linear_grad_params(const double* X, const double* dY, double* dW,
                               double* db, int B, int K, int O) {
  for (int o = 0; o < O; ++o) {
    for (int k = 0; k < K; ++k) {
      double acc = 0.0;
      for (int b = 0; b < B; ++b) {
        acc += dY[std::size_t(b) * O + o] * X[std::size_t(b) * K + k];
      }
      dW[std::size_t(o) * K + k] += acc;
    }
    double acc = 0.0;
    for (int b = 0; b < B; ++b) acc += dY[std::size_t(b) * O + o];
    db[o] += acc;
  }
}

inline void cmat_apply_rows(const cplx* AT, const cplx* X, cplx* Y, int P,
                            int N, int Q) {
  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < Q; ++q) {
      cplx acc(0.0, 0.0);
      for (int n = 0; n < N; ++n) {
        acc += AT[std::size_t(n) * Q + q] * X[std::size_t(p) * N + n];
      }
      Y[std::size_t(p) * Q + q] = acc;
    }
  }
}

inline void cmat_adjoint_rows(const cplx* A, const cplx* X, cplx* Y, int P,
                              int Q, int N) {
  for (int p = 0; p < P; ++p) {
    for (int n = 0; n < N; ++n) {
      cplx acc(0.0, 0.0);
      for (int q = 0; q < Q; ++q) {
        acc += std::conj(A[std::size_t(q) * N + n]) * X[std::size_t(p) * Q + q];
      }
      Y[std::size_t(p) * N + n] = acc;
    }
  }
}

}  // namespace refk
