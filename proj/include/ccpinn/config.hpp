#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccpinn/trainer.hpp"

namespace ccpinn {

/// Everything one experiment needs, in one serializable record: the scene or
/// dataset it reads, how synthetic data is generated, how the inversion is
/// trained, and how results are rendered. A snapshot of this record lands in
/// every output directory.
struct ExperimentConfig {
  std::string scene;    // phantom JSON path (synthetic generation)
  std::string dataset;  // dataset container path (inversion input/output)

  // Synthetic generation.
  double roi_half_width = 0.75;
  int grid_n = 32;
  int fine_factor = 2;
  std::vector<double> frequencies_hz = {0.3e9, 0.4e9, 0.5e9};
  double snr_db = 0.0;  // +inf = noiseless; serialized as JSON null
  std::uint64_t noise_seed = 0;
  double array_radius = 3.0;
  int n_tx = 12;
  int n_rx = 120;
  double exclusion_halfangle_deg = 30.0;

  TrainConfig train;
  int pad_factor = 2;
  int n_runs = 11;

  std::string output_dir;

  // Rendering ranges, fixed per experiment for figure comparability.
  double eps_vmin = 1.0, eps_vmax = 3.0;
  double sig_vmin = 0.0, sig_vmax = 0.02;
  int render_upscale = 4;

  ExperimentConfig();  // sets snr_db to +inf (noiseless default)
};

const char* strategy_name(Strategy s);
const char* beta_mode_name(BetaMode m);
Strategy strategy_from_name(const std::string& name);
BetaMode beta_mode_from_name(const std::string& name);

/// Strict parse: every key must be known and well-typed (unknown or
/// ill-typed keys throw with their JSON path); missing keys keep defaults.
ExperimentConfig config_from_json(const std::string& text);

/// Full dump with every field written out explicitly, defaults included, in
/// a stable key order. Round trips bit-exactly through config_from_json.
std::string config_to_json(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

/// Range checks that do not need the data: grid sizes, frequency ordering,
/// learning rates, stage fractions, render ranges. Throws
/// std::invalid_argument naming the offending field.
void validate(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace ccpinn
