#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ccpinn/channel.hpp"
#include "ccpinn/field.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/layout.hpp"
#include "ccpinn/phantom.hpp"

namespace ccpinn {

/// Recipe for a synthetic scattering dataset. Measurements are simulated on a
/// grid fine_factor times finer than the inversion grid so the inversion
/// never sees data produced by its own discretization, then fixed noise is
/// added once at generation time.
struct SyntheticSpec {
  Phantom phantom;
  double roi_half_width = 0.75;
  int inversion_n = 32;
  int fine_factor = 2;  // >= 2 keeps the generation grid distinct
  std::vector<double> freqs;
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t noise_seed = 0;
  double array_radius = 3.0;
  int n_tx = 12;
  int n_rx = 120;
  double exclusion_halfangle_deg = 30.0;
};

/// Self-contained dataset: measured scattered fields per frequency plus the
/// truth maps rasterized on the inversion grid for scoring.
struct SyntheticDataset {
  std::uint32_t schema_version = 1;
  double roi_half_width = 0.0;
  int n = 0;  // inversion grid side
  ArrayLayout layout;
  std::vector<double> freqs;
  std::vector<CMatrix> e_meas;  // per frequency, tx x rx, masked entries zero
  std::vector<double> truth_eps, truth_sig;  // n*n
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t noise_seed = 0;
};

/// Forward-solve the phantom on the refined grid at every frequency, project
/// to the receivers, and add one fixed noise realization per frequency over
/// the active (unmasked) entries.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

/// Versioned binary container; array blobs round-trip bitwise.
void save_dataset(const std::string& path, const SyntheticDataset& ds);
SyntheticDataset load_dataset(const std::string& path);

/// Operator channels for inversion on the dataset's grid: make_channel per
/// frequency plus attach_measurements, ascending-frequency order preserved.
std::vector<FrequencyChannel> build_channels(const SyntheticDataset& ds,
                                             int pad_factor);

}  // namespace ccpinn
