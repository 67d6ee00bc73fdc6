#include "ccpinn/forward.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ccpinn/constants.hpp"
#include "ccpinn/parallel.hpp"
#include "ccpinn/special.hpp"

namespace ccpinn {

CMatrix forward_solve_dense(const std::vector<cplx>& chi, const CMatrix& e_inc,
                            const CMatrix& g_dense) {
  const int ng = e_inc.cols;
  if (static_cast<int>(chi.size()) != ng || g_dense.rows != ng ||
      g_dense.cols != ng) {
    throw std::invalid_argument("forward_solve_dense: shape mismatch");
  }
  // A = I - G_D * diag(chi)
  Eigen::MatrixXcd a(ng, ng);
  for (int r = 0; r < ng; ++r) {
    for (int c = 0; c < ng; ++c) {
      a(r, c) = -g_dense.at(r, c) * chi[c];
    }
    a(r, r) += 1.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  CMatrix e_tot(e_inc.rows, ng);
  Eigen::VectorXcd b(ng);
  for (int p = 0; p < e_inc.rows; ++p) {
    for (int n = 0; n < ng; ++n) b(n) = e_inc.at(p, n);
    const Eigen::VectorXcd x = lu.solve(b);
    for (int n = 0; n < ng; ++n) e_tot.at(p, n) = x(n);
  }
  return e_tot;
}

namespace {

// x -> x - G_D(chi .* x)
void state_matvec(const SpectralKernel& kernel, const std::vector<cplx>& chi,
                  const cplx* x, cplx* out, std::vector<cplx>& scratch) {
  const std::size_t ng = chi.size();
  for (std::size_t i = 0; i < ng; ++i) scratch[i] = chi[i] * x[i];
  apply_domain_operator(kernel, scratch.data(), out, 1);
  for (std::size_t i = 0; i < ng; ++i) out[i] = x[i] - out[i];
}

cplx dotc(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

CMatrix forward_solve_fft(const std::vector<cplx>& chi, const CMatrix& e_inc,
                          const SpectralKernel& kernel, double tol,
                          int max_iter) {
  const int ng = e_inc.cols;
  if (static_cast<int>(chi.size()) != ng ||
      kernel.n * kernel.n != ng) {
    throw std::invalid_argument("forward_solve_fft: shape mismatch");
  }
  CMatrix e_tot(e_inc.rows, ng);
  std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    if (parallel::enabled() && e_inc.rows >= 2)
#endif
  for (int p = 0; p < e_inc.rows; ++p) {
    const std::size_t n = static_cast<std::size_t>(ng);
    std::vector<cplx> x(n, cplx(0.0, 0.0)), r(n), rhat(n), v(n, cplx(0.0, 0.0)),
        pv(n, cplx(0.0, 0.0)), s(n), t(n), scratch(n);
    const cplx* b = e_inc.row(p);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i];
    rhat = r;
    const double bnorm = std::sqrt(norm_sq(r));
    std::vector<double> history;
    bool converged = bnorm == 0.0;
    cplx rho(1.0, 0.0), alpha(1.0, 0.0), omega(1.0, 0.0);
    for (int it = 0; it < max_iter && !converged; ++it) {
      const cplx rho_new = dotc(rhat, r);
      if (std::abs(rho_new) < 1e-300) break;
      const cplx beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) {
        pv[i] = r[i] + beta * (pv[i] - omega * v[i]);
      }
      state_matvec(kernel, chi, pv.data(), v.data(), scratch);
      alpha = rho / dotc(rhat, v);
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      double rn = std::sqrt(norm_sq(s));
      if (rn <= tol * bnorm) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * pv[i];
        history.push_back(rn / bnorm);
        converged = true;
        break;
      }
      state_matvec(kernel, chi, s.data(), t.data(), scratch);
      omega = dotc(t, s) / dotc(t, t);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * pv[i] + omega * s[i];
        r[i] = s[i] - omega * t[i];
      }
      rn = std::sqrt(norm_sq(r));
      history.push_back(rn / bnorm);
      if (rn <= tol * bnorm) converged = true;
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "forward_solve_fft: no convergence for incident row " << p
          << " after " << history.size() << " iterations; relative residuals";
      const std::size_t tail = history.size() > 8 ? history.size() - 8 : 0;
      for (std::size_t i = tail; i < history.size(); ++i) {
        msg << " " << history[i];
      }
#ifdef _OPENMP
#pragma omp critical
#endif
      if (failure.empty()) failure = msg.str();
    } else {
      cplx* dst = e_tot.row(p);
      for (std::size_t i = 0; i < n; ++i) dst[i] = x[i];
    }
  }
  if (!failure.empty()) throw std::runtime_error(failure);
  return e_tot;
}

std::vector<cplx> mie_cylinder_scattered(
    double radius, double eps_r, double sigma, double k0,
    std::array<double, 2> tx_pos,
    const std::vector<std::array<double, 2>>& rx_positions,
    int truncation_override) {
  if (!(radius > 0.0) || !(k0 > 0.0)) {
    throw std::invalid_argument("mie: radius and k0 must be positive");
  }
  if (!(eps_r >= 1.0) || !(sigma >= 0.0)) {
    throw std::invalid_argument("mie: need eps_r >= 1 and sigma >= 0");
  }
  const double rho_t = std::hypot(tx_pos[0], tx_pos[1]);
  if (rho_t <= radius) {
    throw std::invalid_argument("mie: transmitter inside the cylinder");
  }
  std::vector<cplx> out(rx_positions.size(), cplx(0.0, 0.0));
  if (eps_r == 1.0 && sigma == 0.0) return out;

  const double omega = k0 * c0;
  const cplx eps_c(eps_r, -sigma / (omega * eps0));
  const cplx k1 = k0 * std::sqrt(eps_c);  // principal branch, Im <= 0
  const int order = truncation_override >= 0
                        ? truncation_override
                        : static_cast<int>(std::ceil(
                              std::max(k0 * radius, 1.0))) + 15;

  // Interface coefficients b_n from continuity of E_z and dE_z/drho at the
  // cylinder surface (internal J_n(k1 rho), external J_n + b_n H_n^(2)).
  std::vector<cplx> bcoef(order + 1);
  for (int n = 0; n <= order; ++n) {
    const double ka = k0 * radius;
    const cplx k1a = k1 * radius;
    const double jn = bessel_j(n, ka);
    const double jn_p = 0.5 * (bessel_j(n - 1, ka) - bessel_j(n + 1, ka));
    const cplx h = hankel2(n, ka);
    const cplx h_p = 0.5 * (hankel2(n - 1, ka) - hankel2(n + 1, ka));
    const cplx j1n = bessel_j_complex(n, k1a);
    const cplx j1n_p =
        0.5 * (bessel_j_complex(n - 1, k1a) - bessel_j_complex(n + 1, k1a));
    const cplx num = k1 * j1n_p * jn - k0 * j1n * jn_p;
    const cplx den = k0 * j1n * h_p - k1 * j1n_p * h;
    bcoef[n] = num / den;
    if (!std::isfinite(bcoef[n].real()) || !std::isfinite(bcoef[n].imag())) {
      throw std::runtime_error(
          "mie: series coefficient not finite at order " + std::to_string(n));
    }
  }
  const double phi_t = std::atan2(tx_pos[1], tx_pos[0]);
  std::vector<cplx> ht(order + 1);
  for (int n = 0; n <= order; ++n) ht[n] = hankel2(n, k0 * rho_t);
  const cplx pref(0.0, -0.25);
  for (std::size_t q = 0; q < rx_positions.size(); ++q) {
    const double rho_q = std::hypot(rx_positions[q][0], rx_positions[q][1]);
    if (rho_q <= radius) {
      throw std::invalid_argument("mie: receiver inside the cylinder");
    }
    const double phi_q = std::atan2(rx_positions[q][1], rx_positions[q][0]);
    const double dphi = phi_q - phi_t;
    cplx sum = bcoef[0] * ht[0] * hankel2(0, k0 * rho_q);
    for (int n = 1; n <= order; ++n) {
      sum += 2.0 * std::cos(n * dphi) * bcoef[n] * ht[n] *
             hankel2(n, k0 * rho_q);
    }
    out[q] = pref * sum;
    if (!std::isfinite(out[q].real()) || !std::isfinite(out[q].imag())) {
      throw std::runtime_error("mie: series did not converge");
    }
  }
  return out;
}

void add_noise(std::vector<cplx>& y, double snr_db, std::mt19937_64& rng) {
  if (y.empty()) throw std::invalid_argument("add_noise: empty trace");
  if (std::isinf(snr_db) && snr_db > 0.0) return;
  const double power = norm_sq(y);
  if (!(power > 0.0)) {
    throw std::invalid_argument("add_noise: zero trace with finite snr");
  }
  const double scale = std::sqrt(
      power / (static_cast<double>(y.size()) * std::pow(10.0, snr_db / 10.0)));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (cplx& v : y) {
    const double n_re = normal(rng);
    const double n_im = normal(rng);
    v += scale * inv_sqrt2 * cplx(n_re, n_im);
  }
}

}  // namespace ccpinn
