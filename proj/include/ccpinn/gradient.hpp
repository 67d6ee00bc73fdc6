#pragma once

#include <vector>

#include "ccpinn/channel.hpp"
#include "ccpinn/field.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/network.hpp"
#include "ccpinn/objective.hpp"

namespace ccpinn {

/// Cell-center coordinates normalized by the ROI half-width, Ng x 2
/// row-major in grid index order. Coordinates may fall outside [-1, 1] when
/// evaluating a checkpoint on a wider region.
std::vector<double> normalized_grid_coords(const Grid& grid, double half_width);

/// Multipliers on the three residual terms. The full objective uses
/// {1, 1, beta}; setting exactly one to 1 recovers a single term for
/// finite-difference checks; {1, 1, 0} is the classical baseline.
struct TermWeights {
  double data = 1.0;
  double state = 1.0;
  double cross = 0.0;
};

/// One fused evaluation of the weighted objective and, optionally, its exact
/// gradients with respect to the network parameters and every contrast
/// source. Complex gradients follow g = dL/dRe + j dL/dIm, so the real pair
/// layout of d_j lines up elementwise with the optimizer's view of J.
struct Evaluation {
  double loss = 0.0;
  std::vector<TermValues> per_freq;  // unweighted term values
  NetworkOutput maps;                // eps_r, sigma on the grid
  NetworkGrads d_theta;
  std::vector<CMatrix> d_j;          // per channel, tx x cells
  std::vector<double> d_eps, d_sig;  // map gradients before the net backward
};

/// channels[i], currents[i] pair up; features is the precomputed embedding of
/// the normalized grid coordinates (cells x 2m). Throws on shape mismatches
/// and when any term evaluates non-finite.
Evaluation loss_and_gradient(const FourierEmbedding& embedding,
                             const NetworkParams& params,
                             const std::vector<double>& features,
                             const std::vector<const FrequencyChannel*>& channels,
                             const std::vector<const CMatrix*>& currents,
                             const TermWeights& weights, bool want_grad = true);

}  // namespace ccpinn
