#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ccpinn {

/// Adam with bias correction. One state per flat tensor; complex tensors are
/// viewed as interleaved real pairs so each component keeps its own moments.
struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  std::int64_t step = 0;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_init(AdamState& state, std::size_t n);

/// In-place update: params -= lr * m_hat / (sqrt(v_hat) + eps). Throws on a
/// non-finite gradient entry (reporting its index) so a diverged run stops
/// at the source instead of poisoning the moments.
void adam_step(AdamState& state, double* params, const double* grads,
               std::size_t n, double lr, const AdamConfig& cfg = {});

/// Cosine decay from lr0 at epoch 0 to lr_floor at epoch total_epochs:
/// floor + 0.5 * (lr0 - floor) * (1 + cos(pi * epoch / total)).
double cosine_lr(int epoch, int total_epochs, double lr0, double lr_floor);

}  // namespace ccpinn
