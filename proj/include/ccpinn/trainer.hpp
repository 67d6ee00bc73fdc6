#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccpinn/channel.hpp"
#include "ccpinn/field.hpp"
#include "ccpinn/grid.hpp"
#include "ccpinn/network.hpp"

namespace ccpinn {

/// hopping: frequencies enter one stage at a time, low to high, each stage
/// restarting the cross-term decay. simultaneous: every frequency is active
/// from epoch 0 and the decay runs over the whole schedule once.
enum class Strategy { hopping, simultaneous };

/// cross_correlated keeps the decayed cross term in the objective; classical
/// runs the identical code path with the cross weight pinned to zero.
enum class BetaMode { cross_correlated, classical };

struct TrainConfig {
  int total_epochs = 3000;
  Strategy strategy = Strategy::hopping;
  /// Per-stage share of total_epochs under hopping; empty selects the
  /// default split. Must match the channel count and sum to 1.
  std::vector<double> stage_fractions;
  double lr_theta = 1e-3;
  double lr_j = 2e-3;
  double lr_floor = 0.0;
  BetaMode beta_mode = BetaMode::cross_correlated;
  std::uint64_t seed = 0;
  int psnr_every = 100;
  std::vector<int> dims;  // empty selects default_dims()
  double feature_std = 1.0;
};

/// Final stage gets 60% of the run; the earlier stages share the remaining
/// 40% equally. One stage gets everything.
std::vector<double> default_stage_fractions(int n_stages);

/// Cumulative stage end epochs (rounded, non-decreasing, last pinned to
/// total_epochs). Stage s covers [ends[s-1], ends[s]).
std::vector<int> stage_boundaries(const std::vector<double>& fractions,
                                  int total_epochs);

/// One pre-update objective evaluation. Term vectors carry one entry per
/// channel; entries beyond the active stage are zero.
struct LossRow {
  int epoch = 0;
  int stage = 0;
  double beta = 0.0;
  std::vector<double> data, state, cross;
  double total = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure_reason;
  /// Reconstruction quality sampled every psnr_every epochs plus once after
  /// the final update; psnr_epochs[i] counts the updates applied so far.
  std::vector<int> psnr_epochs;
  std::vector<double> psnr_eps;
  std::vector<double> psnr_sig;  // empty when the true sigma map is all zero
  std::vector<LossRow> loss_trace;
  std::vector<double> final_eps, final_sig;
  Checkpoint checkpoint;
  double elapsed_seconds = 0.0;
};

/// 10*log10(peak^2 / MSE) with peak = max of the truth map. A zero-MSE match
/// returns +infinity; a non-positive peak throws.
double psnr(const std::vector<double>& truth,
            const std::vector<double>& estimate);

/// Per-transmitter scaled adjoint start J0_p = alpha_p * Gs^H y_p with
/// alpha_p minimizing the active-entry misfit along that direction, so the
/// initial data term never exceeds the J = 0 anchor of 1. Zero rows stay 0.
CMatrix backprojection_init(const FrequencyChannel& ch);

/// Full-batch joint optimization of the network and the per-frequency
/// contrast sources against the attached measurements. Numeric failures mark
/// the record failed (with the partial trace kept) instead of throwing.
RunRecord run_inversion(const Grid& grid,
                        const std::vector<FrequencyChannel>& channels,
                        const std::vector<double>& truth_eps,
                        const std::vector<double>& truth_sig,
                        const TrainConfig& cfg);

/// Network forward pass at the cell centers of an arbitrary grid, normalized
/// by the checkpoint's training half-width.
NetworkOutput infer(const Checkpoint& ckpt, const Grid& grid);

/// Min, linear-interpolation quartiles, and max of a sample.
struct FiveNumber {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};
FiveNumber five_number_summary(std::vector<double> sample);

/// Pointwise mean and sample standard deviation of the PSNR curves over the
/// completed runs, plus a five-number summary (linear-interpolation
/// quantiles) of the final eps_r PSNR across completed runs.
struct EnsembleStats {
  std::vector<int> epochs;
  std::vector<double> mean_eps, std_eps;
  std::vector<double> mean_sig, std_sig;  // empty when sigma is not scored
  FiveNumber final_eps;
  /// Completed run whose final eps_r PSNR is closest to the median (ties to
  /// the lower seed); the one whose images an ensemble report shows.
  int median_run = -1;
};

struct EnsembleResult {
  std::vector<RunRecord> records;
  EnsembleStats stats;
};

/// n_runs >= 2 independent inversions seeded cfg.seed .. cfg.seed+n_runs-1.
/// Failed runs stay in records but are excluded from the statistics; all
/// runs failing is an error.
EnsembleResult multi_run(const Grid& grid,
                         const std::vector<FrequencyChannel>& channels,
                         const std::vector<double>& truth_eps,
                         const std::vector<double>& truth_sig,
                         const TrainConfig& cfg, int n_runs);

}  // namespace ccpinn
