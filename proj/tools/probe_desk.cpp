// Scratch probe: desk-scale inversion timing and PSNR trajectory.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "ccpinn/dataset.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/trainer.hpp"

using namespace ccpinn;

int main(int argc, char** argv) {
  const int epochs = argc > 1 ? std::atoi(argv[1]) : 3000;
  const int classical = argc > 2 ? std::atoi(argv[2]) : 0;
  const unsigned long seed = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 1;
  const int simultaneous = argc > 4 ? std::atoi(argv[4]) : 0;
  const unsigned long noise_seed = argc > 5 ? std::strtoul(argv[5], nullptr, 10) : 7;

  SyntheticSpec spec;
  spec.phantom = austria_phantom(3.0, 0.0);
  spec.roi_half_width = 0.75;
  spec.inversion_n = 32;
  spec.freqs = {0.3e9, 0.4e9};
  spec.snr_db = 20.0;
  spec.noise_seed = noise_seed;

  auto t0 = std::chrono::steady_clock::now();
  SyntheticDataset ds = generate_synthetic(spec);
  std::printf("generate: %.2fs\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  auto channels = build_channels(ds, 2);
  Grid grid = build_grid(ds.roi_half_width, ds.n);

  TrainConfig cfg;
  cfg.total_epochs = epochs;
  cfg.beta_mode = classical ? BetaMode::classical : BetaMode::cross_correlated;
  cfg.strategy = simultaneous ? Strategy::simultaneous : Strategy::hopping;
  cfg.seed = seed;

  RunRecord rec = run_inversion(grid, channels, ds.truth_eps, ds.truth_sig, cfg);
  std::printf("failed=%d %s\nelapsed=%.1fs (%.1f ms/epoch)\n", rec.failed ? 1 : 0,
              rec.failure_reason.c_str(), rec.elapsed_seconds,
              epochs > 0 ? 1000.0 * rec.elapsed_seconds / epochs : 0.0);
  for (std::size_t i = 0; i < rec.psnr_epochs.size(); ++i)
    std::printf("%5d  eps %8.3f dB\n", rec.psnr_epochs[i], rec.psnr_eps[i]);
  if (!rec.loss_trace.empty()) {
    const LossRow& r0 = rec.loss_trace.front();
    const LossRow& rl = rec.loss_trace.back();
    std::printf("first total=%.6g  last total=%.6g\n", r0.total, rl.total);
  }
  return rec.failed ? 1 : 0;
}
