#include "ccpinn/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ccpinn/kernels.hpp"

namespace ccpinn {

namespace {

void check_shapes(const FrequencyChannel& ch, const CMatrix& J) {
  if (J.rows != ch.e_inc.rows || J.cols != ch.e_inc.cols) {
    throw std::invalid_argument("objective: current shape does not match channel");
  }
}

void check_measurements(const FrequencyChannel& ch) {
  if (!(ch.d_meas > 0.0) || ch.e_meas.size() == 0) {
    throw std::runtime_error("objective: channel has no measurements attached");
  }
}

double finite_or_throw(double value, const char* term) {
  if (!std::isfinite(value)) {
    throw std::runtime_error(std::string("objective: ") + term + " is not finite");
  }
  return value;
}

/// || M (G_S X - E_meas) ||^2 / d_meas for X either J (data) or the
/// substituted source chi .* E_tot (cross). Optionally returns the masked
/// residual for adjoint reuse.
double measurement_misfit(const FrequencyChannel& ch, const CMatrix& X,
                          CMatrix* residual_out = nullptr) {
  const int P = X.rows, Ng = X.cols, Q = ch.gs.rows;
  CMatrix r(P, Q);
  kernels::cmat_apply_rows(ch.gs_t.data.data(), X.data.data(), r.data.data(),
                           P, Ng, Q);
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    r.data[i] = ch.mask[i] ? r.data[i] - ch.e_meas.data[i] : cplx(0.0, 0.0);
  }
  const double value = norm_sq(r) / ch.d_meas;
  if (residual_out) *residual_out = std::move(r);
  return value;
}

void total_field(const FrequencyChannel& ch, const CMatrix& J, CMatrix* e_tot) {
  *e_tot = CMatrix(J.rows, J.cols);
  apply_domain_operator(ch.kernel, J.data.data(), e_tot->data.data(), J.rows);
  for (std::size_t i = 0; i < e_tot->data.size(); ++i) {
    e_tot->data[i] += ch.e_inc.data[i];
  }
}

void substituted_source(const std::vector<cplx>& chi, const CMatrix& e_tot,
                        CMatrix* s) {
  if (static_cast<int>(chi.size()) != e_tot.cols) {
    throw std::invalid_argument("objective: contrast length does not match grid");
  }
  *s = CMatrix(e_tot.rows, e_tot.cols);
  for (int p = 0; p < e_tot.rows; ++p) {
    const cplx* et = e_tot.row(p);
    cplx* sp = s->row(p);
    for (int n = 0; n < e_tot.cols; ++n) sp[n] = chi[n] * et[n];
  }
}

}  // namespace

double loss_data(const FrequencyChannel& ch, const CMatrix& J) {
  check_shapes(ch, J);
  check_measurements(ch);
  return finite_or_throw(measurement_misfit(ch, J), "data term");
}

double loss_state(const FrequencyChannel& ch, const std::vector<cplx>& chi,
                  const CMatrix& J) {
  check_shapes(ch, J);
  CMatrix e_tot, s;
  total_field(ch, J, &e_tot);
  substituted_source(chi, e_tot, &s);
  for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] -= J.data[i];
  return finite_or_throw(norm_sq(s) / ch.d_inc, "state term");
}

double loss_cross(const FrequencyChannel& ch, const std::vector<cplx>& chi,
                  const CMatrix& J) {
  check_shapes(ch, J);
  check_measurements(ch);
  CMatrix e_tot, s;
  total_field(ch, J, &e_tot);
  substituted_source(chi, e_tot, &s);
  return finite_or_throw(measurement_misfit(ch, s), "cross term");
}

TermValues evaluate_terms(const FrequencyChannel& ch,
                          const std::vector<cplx>& chi, const CMatrix& J) {
  check_shapes(ch, J);
  check_measurements(ch);
  TermValues t;
  t.data = finite_or_throw(measurement_misfit(ch, J), "data term");
  CMatrix e_tot, s;
  total_field(ch, J, &e_tot);
  substituted_source(chi, e_tot, &s);
  t.cross = finite_or_throw(measurement_misfit(ch, s), "cross term");
  for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] -= J.data[i];
  t.state = finite_or_throw(norm_sq(s) / ch.d_inc, "state term");
  return t;
}

double beta_decay(int epoch, int total_epochs) {
  if (total_epochs <= 0) {
    throw std::invalid_argument("beta_decay: total_epochs must be positive");
  }
  if (epoch < 0) {
    throw std::invalid_argument("beta_decay: epoch must be non-negative");
  }
  return std::exp(-10.0 * static_cast<double>(epoch) /
                  static_cast<double>(total_epochs));
}

LossBreakdown total_loss(const std::vector<const FrequencyChannel*>& channels,
                         const std::vector<const std::vector<cplx>*>& chi,
                         const std::vector<const CMatrix*>& currents,
                         double beta) {
  if (channels.size() != chi.size() || channels.size() != currents.size()) {
    throw std::invalid_argument("total_loss: mismatched channel/contrast/current counts");
  }
  LossBreakdown out;
  out.beta = beta;
  out.per_freq.reserve(channels.size());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const TermValues t = evaluate_terms(*channels[i], *chi[i], *currents[i]);
    out.per_freq.push_back(t);
    out.total += t.data + t.state + beta * t.cross;
  }
  return out;
}

}  // namespace ccpinn
