#pragma once

#include <complex>
#include <cstddef>

namespace ccpinn::kernels {

using cplx = std::complex<double>;

// Dense kernels behind the coordinate network and the measurement operator.
// Every loop nest accumulates each output element in one fixed serial order,
// so results are bitwise identical for any thread count (OpenMP splits work
// only across independent output rows or tiles).

/// Y[b,o] = bias[o] + sum_k X[b,k] * WT[k,o].  WT is K x O row-major.
void linear_forward(const double* X, const double* WT, const double* bias,
                    double* Y, int B, int K, int O);

/// dX[b,k] = sum_o dY[b,o] * W[o,k].  W is O x K row-major.
void linear_grad_input(const double* dY, const double* W, double* dX,
                       int B, int K, int O);

/// dW[o,k] += sum_b dY[b,o] * X[b,k] and db[o] += sum_b dY[b,o],
/// with b ascending for every output element. Caller zeroes dW, db.
void linear_grad_params(const double* X, const double* dY, double* dW,
                        double* db, int B, int K, int O);

/// Y[p,q] = sum_n AT[n,q] * X[p,n].  AT is N x Q row-major (operator stored
/// transposed so the inner loop runs over contiguous memory).
void cmat_apply_rows(const cplx* AT, const cplx* X, cplx* Y,
                     int P, int N, int Q);

/// Y[p,n] = sum_q conj(A[q,n]) * X[p,q].  A is Q x N row-major.
void cmat_adjoint_rows(const cplx* A, const cplx* X, cplx* Y,
                       int P, int Q, int N);

}  // namespace ccpinn::kernels
