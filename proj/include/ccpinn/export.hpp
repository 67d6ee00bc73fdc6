#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ccpinn/phantom.hpp"
#include "ccpinn/trainer.hpp"

namespace ccpinn {

/// 8-bit RGB PNG, zlib-compressed, no interlacing. Throws on I/O failure.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

/// Perceptually uniform colormap sampled at t in [0, 1] (clamped).
std::array<std::uint8_t, 3> viridis(double t);

/// Upscaled boundary mask of the phantom: pixel set when the shape
/// memberships of adjacent pixel centers differ. n * upscale per side,
/// row-major with row 0 at the top of the image.
std::vector<std::uint8_t> contour_mask(const Phantom& phantom,
                                       double half_width, int n, int upscale);

struct RenderOptions {
  double vmin = 0.0;  // fixed color range per experiment, not per frame
  double vmax = 1.0;
  int upscale = 4;
  const Phantom* contour = nullptr;  // dashed true-contour overlay when set
  double half_width = 0.0;           // required with contour
};

/// Map a row-major field (row 0 at the bottom, as the grid stores it) onto
/// colormapped pixels, optionally overlaying the dashed true contour.
void write_map_png(const std::string& path, const std::vector<double>& values,
                   int n, const RenderOptions& opt);

/// One row per epoch: epoch, stage, beta, total, then per-channel data,
/// state, and cross columns. 17 significant digits throughout.
void write_loss_csv(const std::string& path,
                    const std::vector<LossRow>& trace);

/// Columns epoch, psnr_eps and, when sigma is scored, psnr_sig.
void write_psnr_csv(const std::string& path, const RunRecord& rec);

/// Columns epoch, mean, std.
void write_mean_curve_csv(const std::string& path,
                          const std::vector<int>& epochs,
                          const std::vector<double>& mean,
                          const std::vector<double>& std_dev);

/// Columns min, q1, median, q3, max; the metric is named by the file.
void write_boxplot_csv(const std::string& path, const FiveNumber& fn);

/// n x n grid of 17-significant-digit values, one grid row per line.
void write_map_csv(const std::string& path, const std::vector<double>& values,
                   int n);

/// Numeric CSV reader for the report path and round-trip tests: skips the
/// header line, splits the rest on commas. Non-numeric fields throw.
std::vector<std::vector<double>> read_csv(const std::string& path);

struct ExportOptions {
  double eps_vmin = 1.0, eps_vmax = 3.0;
  double sig_vmin = 0.0, sig_vmax = 0.02;
  int upscale = 4;
  Phantom truth;  // contour overlay; leave empty for no overlay
  double half_width = 0.0;
};

/// Loss and PSNR CSVs, final maps as CSV and PNG, and the checkpoint,
/// written into dir (created if needed).
void export_run(const std::string& dir, const RunRecord& rec, int grid_n,
                const ExportOptions& opt);

/// Mean-curve and boxplot CSVs, per-run exports under run_<seed>/, and
/// exactly one median-flagged image set per metric at the top level.
void export_ensemble(const std::string& dir, const EnsembleResult& ens,
                     int grid_n, const ExportOptions& opt);

}  // namespace ccpinn
