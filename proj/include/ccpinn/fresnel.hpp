#pragma once

#include <string>
#include <vector>

#include "ccpinn/dataset.hpp"
#include "ccpinn/field.hpp"
#include "ccpinn/layout.hpp"
#include "ccpinn/phantom.hpp"

namespace ccpinn {

/// One line of the measured-data distribution: transmitter and receiver
/// angles on the 1.67 m arc, frequency, and the raw total/incident fields in
/// the instrument's own units and phase convention.
struct RawFresnelRecord {
  double tx_angle_deg = 0.0;
  double rx_angle_deg = 0.0;
  double freq_ghz = 0.0;
  cplx total;
  cplx incident;
};

/// Text format documented in docs/fresnel_format.json: comment lines start
/// with '%' or '#', data rows carry 7 whitespace-separated numbers. Expects
/// the published 18 x 241 x 9 record structure with frequencies 2..10 GHz.
std::vector<RawFresnelRecord> parse_fresnel(const std::string& path);

/// Inverse of parse_fresnel for building synthetic fixtures.
void write_fresnel(const std::string& path,
                   const std::vector<RawFresnelRecord>& records);

/// Measurement arc: 18 transmitters at 20 degrees and the 72 global
/// receiver positions at 5 degrees on radius 1.67 m, with the +-60 degree
/// sector behind each transmitter masked out (49 active receivers each).
ArrayLayout fresnel_layout();

/// One frequency's subsampled (not yet calibrated) measurements placed on
/// the fresnel_layout grid; masked entries are zero.
struct FresnelChannelRaw {
  double freq = 0.0;  // Hz
  CMatrix total;
  CMatrix incident;
};

struct FresnelBandRaw {
  ArrayLayout layout;
  std::vector<FresnelChannelRaw> channels;  // ascending frequency
};

/// Keep only receivers on the 5-degree raster (1e-6 degree tolerance on the
/// transmitter-relative angle) and the requested band. Every frequency of
/// the band must be present, and every active layout entry must be covered
/// by exactly one record.
FresnelBandRaw subsample_and_split(const std::vector<RawFresnelRecord>& records,
                                   const std::vector<double>& band_ghz,
                                   double rx_step_deg = 5.0);

/// Scattered field in the simulation convention: per transmitter, the
/// factor E_inc_sim(r*) / E_inc_meas(r*) at the receiver opposite the
/// transmitter rescales total - incident. Throws when a measured incident
/// at a reference receiver vanishes.
CMatrix calibrate(const FresnelChannelRaw& raw, const ArrayLayout& layout);

/// Diagnostic: maximum relative deviation of |E_inc_sim / E_inc_meas|
/// across active receivers from the reference receiver's factor magnitude.
/// Near zero when the measured incident matches the line-source model up to
/// one complex unit per transmitter.
double calibration_spread(const FresnelChannelRaw& raw,
                          const ArrayLayout& layout);

/// Scoring phantom: foam cylinder (eps_r 1.45, diameter 80 mm) centered at
/// the origin, one plastic cylinder (eps_r 3, diameter 31 mm) embedded
/// touching the foam boundary from inside and one attached outside, both on
/// the x axis.
Phantom foamtwindiel_reference();

/// Inversion-ready container: calibrated measurements per band frequency
/// plus the reference phantom rasterized on the inversion grid.
SyntheticDataset fresnel_to_dataset(const FresnelBandRaw& raw, int inversion_n,
                                    double roi_half_width);

}  // namespace ccpinn
