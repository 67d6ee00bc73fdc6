#include "ccpinn/gradient.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ccpinn/constants.hpp"
#include "ccpinn/kernels.hpp"
#include "ccpinn/parallel.hpp"

namespace ccpinn {

std::vector<double> normalized_grid_coords(const Grid& grid, double half_width) {
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("normalized_grid_coords: half-width must be positive");
  }
  const int ng = grid.num_cells();
  std::vector<double> coords(static_cast<std::size_t>(ng) * 2);
  for (int idx = 0; idx < ng; ++idx) {
    coords[2 * static_cast<std::size_t>(idx)] = grid.center_x(idx) / half_width;
    coords[2 * static_cast<std::size_t>(idx) + 1] = grid.center_y(idx) / half_width;
  }
  return coords;
}

namespace {

double finite_or_throw(double value, const char* term) {
  if (!std::isfinite(value)) {
    throw std::runtime_error(std::string("loss_and_gradient: ") + term + " is not finite");
  }
  return value;
}

/// Masked measurement residual of G_S X against the channel data, plus the
/// normalized misfit. R has masked entries zeroed so it can feed the adjoint.
double masked_residual(const FrequencyChannel& ch, const CMatrix& X, CMatrix* R) {
  const int P = X.rows, Ng = X.cols, Q = ch.gs.rows;
  *R = CMatrix(P, Q);
  kernels::cmat_apply_rows(ch.gs_t.data.data(), X.data.data(), R->data.data(),
                           P, Ng, Q);
  for (std::size_t i = 0; i < R->data.size(); ++i) {
    R->data[i] = ch.mask[i] ? R->data[i] - ch.e_meas.data[i] : cplx(0.0, 0.0);
  }
  return norm_sq(*R) / ch.d_meas;
}

}  // namespace

Evaluation loss_and_gradient(const FourierEmbedding& embedding,
                             const NetworkParams& params,
                             const std::vector<double>& features,
                             const std::vector<const FrequencyChannel*>& channels,
                             const std::vector<const CMatrix*>& currents,
                             const TermWeights& weights, bool want_grad) {
  if (channels.empty()) {
    throw std::invalid_argument("loss_and_gradient: no channels");
  }
  if (channels.size() != currents.size()) {
    throw std::invalid_argument("loss_and_gradient: channel/current count mismatch");
  }
  const int ng = channels.front()->e_inc.cols;
  const int feat_width = 2 * embedding.m;
  if (features.size() != static_cast<std::size_t>(ng) * feat_width) {
    throw std::invalid_argument("loss_and_gradient: feature batch does not match grid size");
  }

  Evaluation ev;
  ForwardCache cache;
  ev.maps = forward_from_features(params, features.data(), ng,
                                  want_grad ? &cache : nullptr);

  if (want_grad) {
    ev.d_eps.assign(ng, 0.0);
    ev.d_sig.assign(ng, 0.0);
    ev.d_j.resize(channels.size());
  }
  ev.per_freq.resize(channels.size());
  std::vector<double>& d_eps = ev.d_eps;
  std::vector<double>& d_sig = ev.d_sig;

  std::vector<cplx> chi(ng);
  for (std::size_t ci = 0; ci < channels.size(); ++ci) {
    const FrequencyChannel& ch = *channels[ci];
    const CMatrix& J = *currents[ci];
    if (ch.e_inc.cols != ng) {
      throw std::invalid_argument("loss_and_gradient: channels disagree on grid size");
    }
    if (J.rows != ch.e_inc.rows || J.cols != ng) {
      throw std::invalid_argument("loss_and_gradient: current shape does not match channel");
    }
    if (!(ch.d_meas > 0.0)) {
      throw std::runtime_error("loss_and_gradient: channel has no measurements attached");
    }
    const int P = J.rows;
    const double omega_eps0 = 2.0 * pi * ch.freq * eps0;
    for (int n = 0; n < ng; ++n) {
      chi[n] = cplx(ev.maps.eps_r[n] - 1.0, -ev.maps.sigma[n] / omega_eps0);
    }

    // Shared pieces: E_tot = E_inc + G_D J and the substituted source
    // S = chi .* E_tot feed both the state and cross terms.
    CMatrix e_tot(P, ng);
    apply_domain_operator(ch.kernel, J.data.data(), e_tot.data.data(), P);
    for (std::size_t i = 0; i < e_tot.data.size(); ++i) {
      e_tot.data[i] += ch.e_inc.data[i];
    }
    CMatrix s(P, ng);
    for (int p = 0; p < P; ++p) {
      const cplx* et = e_tot.row(p);
      cplx* sp = s.row(p);
      for (int n = 0; n < ng; ++n) sp[n] = chi[n] * et[n];
    }

    CMatrix r_data;
    TermValues& t = ev.per_freq[ci];
    t.data = finite_or_throw(masked_residual(ch, J, &r_data), "data term");
    CMatrix r_cross;
    t.cross = finite_or_throw(masked_residual(ch, s, &r_cross), "cross term");
    CMatrix r_state = std::move(s);  // S - J reuses the buffer
    for (std::size_t i = 0; i < r_state.data.size(); ++i) {
      r_state.data[i] -= J.data[i];
    }
    t.state = finite_or_throw(norm_sq(r_state) / ch.d_inc, "state term");
    ev.loss += weights.data * t.data + weights.state * t.state +
               weights.cross * t.cross;

    if (!want_grad) continue;

    const double wd = 2.0 * weights.data / ch.d_meas;
    const double ws = 2.0 * weights.state / ch.d_inc;
    const double wc = 2.0 * weights.cross / ch.d_meas;

    CMatrix& gj = ev.d_j[ci];
    gj = CMatrix(P, ng);

    // Data term: wd * G_S^H R_d.
    if (weights.data != 0.0) {
      kernels::cmat_adjoint_rows(ch.gs.data.data(), r_data.data.data(),
                                 gj.data.data(), P, ch.gs.rows, ng);
      for (cplx& v : gj.data) v *= wd;
    }

    // Cross term pullback to the substituted source: A_c = wc * G_S^H R_c.
    CMatrix a_c;
    if (weights.cross != 0.0) {
      a_c = CMatrix(P, ng);
      kernels::cmat_adjoint_rows(ch.gs.data.data(), r_cross.data.data(),
                                 a_c.data.data(), P, ch.gs.rows, ng);
      for (cplx& v : a_c.data) v *= wc;
    }

    // g_S = ws * R_s + A_c is the sensitivity at the substituted source;
    // through S = chi .* E_tot it reaches J via conj(chi) and G_D^H, while
    // the state term's explicit -J contributes -ws * R_s directly.
    if (weights.state != 0.0 || weights.cross != 0.0) {
      CMatrix back(P, ng);
      for (int p = 0; p < P; ++p) {
        const cplx* rs = r_state.row(p);
        const cplx* ac = weights.cross != 0.0 ? a_c.row(p) : nullptr;
        cplx* bp = back.row(p);
        for (int n = 0; n < ng; ++n) {
          cplx g_s = ws * rs[n];
          if (ac) g_s += ac[n];
          bp[n] = std::conj(chi[n]) * g_s;
        }
      }
      CMatrix gj_dom(P, ng);
      apply_domain_adjoint(ch.kernel, back.data.data(), gj_dom.data.data(), P);
      for (std::size_t i = 0; i < gj.data.size(); ++i) {
        gj.data[i] += gj_dom.data[i];
        if (weights.state != 0.0) gj.data[i] -= ws * r_state.data[i];
      }

      // Contrast sensitivity: g_chi[n] = sum_p g_S[p,n] * conj(E_tot[p,n]),
      // then chi = (eps_r - 1) - j sigma / (omega eps0) maps it to the
      // real-valued map gradients.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && ng >= 256)
#endif
      for (int n = 0; n < ng; ++n) {
        cplx g_chi(0.0, 0.0);
        for (int p = 0; p < P; ++p) {
          cplx g_s = ws * r_state.at(p, n);
          if (weights.cross != 0.0) g_s += a_c.at(p, n);
          g_chi += g_s * std::conj(e_tot.at(p, n));
        }
        d_eps[n] += g_chi.real();
        d_sig[n] += -g_chi.imag() / omega_eps0;
      }
    }
  }

  if (want_grad) {
    backward(params, cache, features.data(), d_eps.data(), d_sig.data(),
             &ev.d_theta);
  }
  return ev;
}

}  // namespace ccpinn
