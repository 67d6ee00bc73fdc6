#include "ccpinn/fresnel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ccpinn/constants.hpp"
#include "ccpinn/special.hpp"

namespace ccpinn {

namespace {

constexpr int fresnel_ntx = 18;
constexpr int fresnel_nrx_raw = 241;  // 1-degree raster, 60..300 degrees
constexpr int fresnel_nfreq = 9;
constexpr double fresnel_radius = 1.67;
constexpr double angle_tol_deg = 1e-6;

double wrap_deg(double a) {
  double w = std::fmod(a, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

/// Index on a uniform raster, or -1 when the angle is off the raster.
int raster_index(double angle_deg, double step_deg, int count) {
  const double ratio = wrap_deg(angle_deg) / step_deg;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) * step_deg > angle_tol_deg) return -1;
  int idx = static_cast<int>(nearest);
  if (idx == count) idx = 0;
  return idx >= 0 && idx < count ? idx : -1;
}

cplx line_source(double k0, double dx, double dy) {
  return cplx(0.0, -0.25) * hankel2_0(k0 * std::hypot(dx, dy));
}

}  // namespace

std::vector<RawFresnelRecord> parse_fresnel(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);

  std::vector<RawFresnelRecord> records;
  records.reserve(static_cast<std::size_t>(fresnel_ntx) * fresnel_nrx_raw *
                  fresnel_nfreq);
  std::vector<bool> freq_seen(11, false);

  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '%' || line[start] == '#') continue;

    std::istringstream row(line);
    RawFresnelRecord rec;
    double tr, ti, ir, ii;
    if (!(row >> rec.tx_angle_deg >> rec.rx_angle_deg >> rec.freq_ghz >> tr >>
          ti >> ir >> ii))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed data row");
    std::string trailing;
    if (row >> trailing)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": trailing fields on data row");
    if (rec.tx_angle_deg < 0.0 || rec.tx_angle_deg >= 360.0 ||
        rec.rx_angle_deg < 0.0 || rec.rx_angle_deg >= 360.0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": angle outside [0, 360)");
    const double fi = std::round(rec.freq_ghz);
    if (std::abs(rec.freq_ghz - fi) > 1e-9 || fi < 2.0 || fi > 10.0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": frequency outside the published 2..10 GHz set");
    freq_seen[static_cast<int>(fi)] = true;
    rec.total = cplx(tr, ti);
    rec.incident = cplx(ir, ii);
    records.push_back(rec);
  }

  const std::size_t expected =
      static_cast<std::size_t>(fresnel_ntx) * fresnel_nrx_raw * fresnel_nfreq;
  if (records.size() != expected)
    throw std::runtime_error(
        path + ": expected " + std::to_string(expected) + " records, found " +
        std::to_string(records.size()));
  for (int f = 2; f <= 10; ++f)
    if (!freq_seen[f])
      throw std::runtime_error(path + ": frequency " + std::to_string(f) +
                               " GHz missing from the record set");
  return records;
}

void write_fresnel(const std::string& path,
                   const std::vector<RawFresnelRecord>& records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "% tx_angle_deg rx_angle_deg freq_GHz Re(total) Im(total) "
        "Re(incident) Im(incident)\n";
  char buf[256];
  for (const RawFresnelRecord& r : records) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  r.tx_angle_deg, r.rx_angle_deg, r.freq_ghz, r.total.real(),
                  r.total.imag(), r.incident.real(), r.incident.imag());
    os << buf;
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

ArrayLayout fresnel_layout() {
  return circular_layout(fresnel_radius, fresnel_ntx, 72, 60.0);
}

FresnelBandRaw subsample_and_split(const std::vector<RawFresnelRecord>& records,
                                   const std::vector<double>& band_ghz,
                                   double rx_step_deg) {
  if (band_ghz.empty())
    throw std::invalid_argument("band must name at least one frequency");
  for (std::size_t i = 1; i < band_ghz.size(); ++i)
    if (!(band_ghz[i] > band_ghz[i - 1]))
      throw std::invalid_argument("band frequencies must be ascending");
  if (!(rx_step_deg > 0.0) ||
      std::abs(360.0 / rx_step_deg - std::round(360.0 / rx_step_deg)) > 1e-9)
    throw std::invalid_argument("rx_step_deg must divide the circle");
  const int nrx = static_cast<int>(std::round(360.0 / rx_step_deg));

  FresnelBandRaw band;
  band.layout = circular_layout(fresnel_radius, fresnel_ntx, nrx, 60.0);
  band.channels.resize(band_ghz.size());
  std::vector<std::vector<int>> hits(band_ghz.size());
  for (std::size_t i = 0; i < band_ghz.size(); ++i) {
    band.channels[i].freq = band_ghz[i] * 1e9;
    band.channels[i].total = CMatrix(fresnel_ntx, nrx);
    band.channels[i].incident = CMatrix(fresnel_ntx, nrx);
    hits[i].assign(static_cast<std::size_t>(fresnel_ntx) * nrx, 0);
  }

  for (const RawFresnelRecord& rec : records) {
    int fi = -1;
    for (std::size_t i = 0; i < band_ghz.size(); ++i)
      if (std::abs(rec.freq_ghz - band_ghz[i]) < 1e-9) fi = static_cast<int>(i);
    if (fi < 0) continue;

    const int p = raster_index(rec.tx_angle_deg, 360.0 / fresnel_ntx,
                               fresnel_ntx);
    if (p < 0)
      throw std::runtime_error("transmitter angle off the 20-degree raster");
    // Subsampling is defined on the transmitter-relative angle.
    const double rel = wrap_deg(rec.rx_angle_deg - rec.tx_angle_deg);
    const double ratio = rel / rx_step_deg;
    if (std::abs(ratio - std::round(ratio)) * rx_step_deg > angle_tol_deg)
      continue;
    const int q = raster_index(rec.rx_angle_deg, rx_step_deg, nrx);
    if (q < 0)
      throw std::runtime_error(
          "receiver angle off the global raster despite matching the "
          "relative raster");
    if (!band.layout.active(p, q))
      throw std::runtime_error(
          "record falls inside the masked sector behind its transmitter");
    const std::size_t slot = static_cast<std::size_t>(p) * nrx + q;
    if (hits[fi][slot]++)
      throw std::runtime_error("duplicate record for one (tx, rx, freq)");
    band.channels[fi].total.at(p, q) = rec.total;
    band.channels[fi].incident.at(p, q) = rec.incident;
  }

  for (std::size_t i = 0; i < band_ghz.size(); ++i) {
    long covered = 0;
    for (int p = 0; p < fresnel_ntx; ++p)
      for (int q = 0; q < nrx; ++q)
        if (band.layout.active(p, q)) {
          if (!hits[i][static_cast<std::size_t>(p) * nrx + q])
            throw std::runtime_error(
                "band frequency " + std::to_string(band_ghz[i]) +
                " GHz does not cover the subsampled layout");
          ++covered;
        }
    if (covered == 0)
      throw std::runtime_error("band frequency missing from the records");
  }
  return band;
}

namespace {

int opposite_receiver(const ArrayLayout& layout, int p) {
  const double txa =
      std::atan2(layout.tx[p][1], layout.tx[p][0]) * 180.0 / pi;
  const double want = wrap_deg(txa + 180.0);
  int best = -1;
  double best_dist = 1e300;
  for (int q = 0; q < layout.nrx(); ++q) {
    const double rxa =
        wrap_deg(std::atan2(layout.rx[q][1], layout.rx[q][0]) * 180.0 / pi);
    double d = std::abs(rxa - want);
    d = std::min(d, 360.0 - d);
    if (d < best_dist) {
      best_dist = d;
      best = q;
    }
  }
  return best;
}

}  // namespace

CMatrix calibrate(const FresnelChannelRaw& raw, const ArrayLayout& layout) {
  const int p_tx = layout.ntx();
  const int q_rx = layout.nrx();
  if (raw.total.rows != p_tx || raw.total.cols != q_rx ||
      raw.incident.rows != p_tx || raw.incident.cols != q_rx)
    throw std::invalid_argument("measurement shape does not match the layout");
  if (!(raw.freq > 0.0)) throw std::invalid_argument("frequency must be positive");
  const double k0 = 2.0 * pi * raw.freq / c0;

  CMatrix out(p_tx, q_rx);
  for (int p = 0; p < p_tx; ++p) {
    const int ref = opposite_receiver(layout, p);
    if (!layout.active(p, ref))
      throw std::runtime_error("reference receiver is masked out");
    const cplx meas_inc = raw.incident.at(p, ref);
    if (std::abs(meas_inc) == 0.0)
      throw std::runtime_error(
          "measured incident field vanishes at the reference receiver");
    const cplx sim_inc = line_source(k0, layout.rx[ref][0] - layout.tx[p][0],
                                     layout.rx[ref][1] - layout.tx[p][1]);
    const cplx factor = sim_inc / meas_inc;
    for (int q = 0; q < q_rx; ++q)
      if (layout.active(p, q))
        out.at(p, q) = factor * (raw.total.at(p, q) - raw.incident.at(p, q));
  }
  return out;
}

double calibration_spread(const FresnelChannelRaw& raw,
                          const ArrayLayout& layout) {
  const double k0 = 2.0 * pi * raw.freq / c0;
  double worst = 0.0;
  for (int p = 0; p < layout.ntx(); ++p) {
    const int ref = opposite_receiver(layout, p);
    const cplx ref_inc = raw.incident.at(p, ref);
    if (std::abs(ref_inc) == 0.0) continue;
    const double ref_mag =
        std::abs(line_source(k0, layout.rx[ref][0] - layout.tx[p][0],
                             layout.rx[ref][1] - layout.tx[p][1]) /
                 ref_inc);
    for (int q = 0; q < layout.nrx(); ++q) {
      if (!layout.active(p, q)) continue;
      const cplx inc = raw.incident.at(p, q);
      if (std::abs(inc) == 0.0) continue;
      const double mag =
          std::abs(line_source(k0, layout.rx[q][0] - layout.tx[p][0],
                               layout.rx[q][1] - layout.tx[p][1]) /
                   inc);
      worst = std::max(worst, std::abs(mag - ref_mag) / ref_mag);
    }
  }
  return worst;
}

Phantom foamtwindiel_reference() {
  Phantom phantom;
  Shape foam;
  foam.kind = ShapeKind::disk;
  foam.cx = 0.0;
  foam.cy = 0.0;
  foam.radius = 0.04;
  foam.eps_r = 1.45;
  foam.sigma = 0.0;

  Shape inner;
  inner.kind = ShapeKind::disk;
  inner.cx = 0.04 - 0.0155;  // embedded, touching the foam boundary
  inner.cy = 0.0;
  inner.radius = 0.0155;
  inner.eps_r = 3.0;
  inner.sigma = 0.0;

  Shape outer;
  outer.kind = ShapeKind::disk;
  outer.cx = -(0.04 + 0.0155);  // attached outside the foam
  outer.cy = 0.0;
  outer.radius = 0.0155;
  outer.eps_r = 3.0;
  outer.sigma = 0.0;

  phantom.shapes = {foam, inner, outer};
  return phantom;
}

SyntheticDataset fresnel_to_dataset(const FresnelBandRaw& raw, int inversion_n,
                                    double roi_half_width) {
  if (raw.channels.empty())
    throw std::invalid_argument("band has no channels");
  if (inversion_n < 2 || !(roi_half_width > 0.0))
    throw std::invalid_argument("invalid inversion grid");

  SyntheticDataset ds;
  ds.roi_half_width = roi_half_width;
  ds.n = inversion_n;
  ds.layout = raw.layout;
  ds.snr_db = std::numeric_limits<double>::infinity();
  ds.noise_seed = 0;
  for (const FresnelChannelRaw& ch : raw.channels) {
    ds.freqs.push_back(ch.freq);
    ds.e_meas.push_back(calibrate(ch, raw.layout));
  }
  const Grid grid = build_grid(roi_half_width, inversion_n);
  const MediumMaps truth = rasterize(foamtwindiel_reference(), grid);
  ds.truth_eps = truth.eps_r;
  ds.truth_sig = truth.sigma;
  return ds;
}

}  // namespace ccpinn
