#include "ccpinn/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ccpinn {

void adam_init(AdamState& state, std::size_t n) {
  state.m.assign(n, 0.0);
  state.v.assign(n, 0.0);
  state.step = 0;
}

void adam_step(AdamState& state, double* params, const double* grads,
               std::size_t n, double lr, const AdamConfig& cfg) {
  if (state.m.size() != n || state.v.size() != n) {
    throw std::invalid_argument("adam_step: state size does not match tensor");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i])) {
      throw std::runtime_error("adam_step: non-finite gradient at flat index " +
                               std::to_string(i));
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

double cosine_lr(int epoch, int total_epochs, double lr0, double lr_floor) {
  if (total_epochs <= 0) {
    throw std::invalid_argument("cosine_lr: total_epochs must be positive");
  }
  if (epoch < 0 || epoch > total_epochs) {
    throw std::invalid_argument("cosine_lr: epoch outside [0, total_epochs]");
  }
  // Endpoints are pinned bitwise; the cosine form would land within an ulp
  // but not provably on the nose.
  if (epoch == 0) return lr0;
  if (epoch == total_epochs) return lr_floor;
  constexpr double pi = 3.141592653589793238462643383279502884;
  const double phase = pi * static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return lr_floor + 0.5 * (lr0 - lr_floor) * (1.0 + std::cos(phase));
}

}  // namespace ccpinn
