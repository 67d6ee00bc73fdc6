#pragma once

#include <vector>

#include "ccpinn/channel.hpp"
#include "ccpinn/field.hpp"

namespace ccpinn {

// Normalized residual terms at one frequency, with J the contrast-source
// unknown (tx x cells) and chi the per-cell contrast derived from the maps:
//   data:  || M (G_S J - E_meas) ||^2 / d_meas
//   state: || chi .* (E_inc + G_D J) - J ||^2 / d_inc
//   cross: || M (G_S (chi .* (E_inc + G_D J)) - E_meas) ||^2 / d_meas
// The denominators are constants fixed when the channel is built, so a
// collapsing trivial solution cannot shrink them: J = 0 gives data = 1 and
// chi = 0 gives cross = 1 exactly.

double loss_data(const FrequencyChannel& ch, const CMatrix& J);
double loss_state(const FrequencyChannel& ch, const std::vector<cplx>& chi,
                  const CMatrix& J);
double loss_cross(const FrequencyChannel& ch, const std::vector<cplx>& chi,
                  const CMatrix& J);

struct TermValues {
  double data = 0.0;
  double state = 0.0;
  double cross = 0.0;
};

/// All three terms sharing a single domain-operator application.
TermValues evaluate_terms(const FrequencyChannel& ch,
                          const std::vector<cplx>& chi, const CMatrix& J);

/// Coupling-weight schedule: exp(-10 * epoch / total_epochs), so it starts
/// at 1 and decays to e^-10 at the final epoch. In stage-wise training the
/// caller passes stage-local epoch counters to restart the decay per stage.
double beta_decay(int epoch, int total_epochs);

struct LossBreakdown {
  std::vector<TermValues> per_freq;
  double beta = 0.0;
  double total = 0.0;  // sum over frequencies of data + state + beta * cross
};

LossBreakdown total_loss(const std::vector<const FrequencyChannel*>& channels,
                         const std::vector<const std::vector<cplx>*>& chi,
                         const std::vector<const CMatrix*>& currents,
                         double beta);

}  // namespace ccpinn
