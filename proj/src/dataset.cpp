#include "ccpinn/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "ccpinn/forward.hpp"
#include "ccpinn/kernels.hpp"

namespace ccpinn {

namespace {

constexpr char dataset_magic[8] = {'C', 'C', 'P', 'I', 'N', 'N', 'D', 'S'};

template <typename T>
void write_pod(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& value) {
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("dataset file truncated");
}

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_vec(std::istream& is, std::vector<T>& v, std::size_t count) {
  v.resize(count);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(count * sizeof(T)));
  if (!is) throw std::runtime_error("dataset file truncated");
}

void validate_spec(const SyntheticSpec& spec) {
  validate(spec.phantom);
  if (spec.roi_half_width <= 0.0)
    throw std::invalid_argument("roi_half_width must be positive");
  if (spec.inversion_n < 2)
    throw std::invalid_argument("inversion grid side must be at least 2");
  if (spec.fine_factor < 2)
    throw std::invalid_argument(
        "generation grid must be at least twice as fine as the inversion "
        "grid");
  if (spec.freqs.empty())
    throw std::invalid_argument("at least one frequency is required");
  for (std::size_t i = 0; i < spec.freqs.size(); ++i) {
    if (!(spec.freqs[i] > 0.0))
      throw std::invalid_argument("frequencies must be positive");
    if (i > 0 && !(spec.freqs[i] > spec.freqs[i - 1]))
      throw std::invalid_argument("frequencies must be strictly ascending");
  }
  if (std::isnan(spec.snr_db))
    throw std::invalid_argument("snr_db must not be NaN");
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  validate_spec(spec);

  SyntheticDataset ds;
  ds.roi_half_width = spec.roi_half_width;
  ds.n = spec.inversion_n;
  ds.layout = circular_layout(spec.array_radius, spec.n_tx, spec.n_rx,
                              spec.exclusion_halfangle_deg,
                              spec.roi_half_width);
  ds.freqs = spec.freqs;
  ds.snr_db = spec.snr_db;
  ds.noise_seed = spec.noise_seed;

  const Grid coarse = build_grid(spec.roi_half_width, spec.inversion_n);
  const MediumMaps truth = rasterize(spec.phantom, coarse);
  ds.truth_eps = truth.eps_r;
  ds.truth_sig = truth.sigma;

  const Grid fine =
      build_grid(spec.roi_half_width, spec.inversion_n * spec.fine_factor);
  const MediumMaps medium = rasterize(spec.phantom, fine);

  const int ntx = ds.layout.ntx();
  const int nrx = ds.layout.nrx();
  const int cells = fine.num_cells();

  // Single noise stream consumed in ascending-frequency order keeps the
  // realization a pure function of (spec, noise_seed).
  std::mt19937_64 rng(spec.noise_seed);

  ds.e_meas.reserve(spec.freqs.size());
  for (double freq : spec.freqs) {
    FrequencyChannel ch = make_channel(ds.layout, fine, freq, 2);
    const ContrastMap cm = contrast_map(medium, freq);
    const CMatrix e_tot = forward_solve_fft(cm.chi, ch.e_inc, ch.kernel);

    CMatrix source(ntx, cells);
    for (int p = 0; p < ntx; ++p) {
      const cplx* row = e_tot.row(p);
      cplx* out = source.row(p);
      for (int n = 0; n < cells; ++n) out[n] = cm.chi[n] * row[n];
    }

    CMatrix e_sc(ntx, nrx);
    kernels::cmat_apply_rows(ch.gs_t.data.data(), source.data.data(),
                             e_sc.data.data(), ntx, cells, nrx);

    std::vector<cplx> active;
    active.reserve(static_cast<std::size_t>(ntx) * nrx);
    for (int p = 0; p < ntx; ++p)
      for (int q = 0; q < nrx; ++q)
        if (ds.layout.active(p, q)) active.push_back(e_sc.at(p, q));
    add_noise(active, spec.snr_db, rng);

    CMatrix meas(ntx, nrx);
    std::size_t k = 0;
    for (int p = 0; p < ntx; ++p)
      for (int q = 0; q < nrx; ++q)
        if (ds.layout.active(p, q)) meas.at(p, q) = active[k++];
    ds.e_meas.push_back(std::move(meas));
  }
  return ds;
}

void save_dataset(const std::string& path, const SyntheticDataset& ds) {
  if (ds.n < 2 || ds.freqs.empty() ||
      ds.e_meas.size() != ds.freqs.size() ||
      ds.truth_eps.size() != static_cast<std::size_t>(ds.n) * ds.n ||
      ds.truth_sig.size() != ds.truth_eps.size())
    throw std::invalid_argument("dataset is internally inconsistent");
  const int ntx = ds.layout.ntx();
  const int nrx = ds.layout.nrx();
  if (ntx <= 0 || nrx <= 0 ||
      ds.layout.mask.size() != static_cast<std::size_t>(ntx) * nrx)
    throw std::invalid_argument("dataset layout is malformed");
  for (const CMatrix& m : ds.e_meas)
    if (m.rows != ntx || m.cols != nrx)
      throw std::invalid_argument("measurement block shape mismatch");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(dataset_magic, sizeof(dataset_magic));
  write_pod(os, ds.schema_version);
  write_pod(os, ds.roi_half_width);
  write_pod(os, static_cast<std::int32_t>(ds.n));
  write_pod(os, ds.snr_db);
  write_pod(os, ds.noise_seed);
  write_pod(os, static_cast<std::uint32_t>(ntx));
  write_pod(os, static_cast<std::uint32_t>(nrx));
  write_vec(os, ds.layout.tx);
  write_vec(os, ds.layout.rx);
  write_vec(os, ds.layout.mask);
  write_pod(os, static_cast<std::uint32_t>(ds.freqs.size()));
  write_vec(os, ds.freqs);
  for (const CMatrix& m : ds.e_meas) write_vec(os, m.data);
  write_vec(os, ds.truth_eps);
  write_vec(os, ds.truth_sig);
  if (!os) throw std::runtime_error("write failed for " + path);
}

SyntheticDataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);

  char magic[sizeof(dataset_magic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, dataset_magic, sizeof(magic)) != 0)
    throw std::runtime_error(path + " is not a dataset file");

  SyntheticDataset ds;
  read_pod(is, ds.schema_version);
  if (ds.schema_version != 1)
    throw std::runtime_error("unsupported dataset schema version " +
                             std::to_string(ds.schema_version));
  read_pod(is, ds.roi_half_width);
  std::int32_t n = 0;
  read_pod(is, n);
  read_pod(is, ds.snr_db);
  read_pod(is, ds.noise_seed);
  std::uint32_t ntx = 0, nrx = 0;
  read_pod(is, ntx);
  read_pod(is, nrx);
  if (n < 2 || n > 16384 || ntx == 0 || nrx == 0 || ntx > 100000 ||
      nrx > 100000)
    throw std::runtime_error(path + " has implausible dimensions");
  ds.n = n;
  read_vec(is, ds.layout.tx, ntx);
  read_vec(is, ds.layout.rx, nrx);
  read_vec(is, ds.layout.mask, static_cast<std::size_t>(ntx) * nrx);
  for (std::uint8_t b : ds.layout.mask)
    if (b > 1) throw std::runtime_error(path + " has a corrupt mask");
  std::uint32_t nfreq = 0;
  read_pod(is, nfreq);
  if (nfreq == 0 || nfreq > 1024)
    throw std::runtime_error(path + " has an implausible frequency count");
  read_vec(is, ds.freqs, nfreq);
  ds.e_meas.reserve(nfreq);
  for (std::uint32_t i = 0; i < nfreq; ++i) {
    CMatrix m(static_cast<int>(ntx), static_cast<int>(nrx));
    read_vec(is, m.data, static_cast<std::size_t>(ntx) * nrx);
    ds.e_meas.push_back(std::move(m));
  }
  const std::size_t cells = static_cast<std::size_t>(ds.n) * ds.n;
  read_vec(is, ds.truth_eps, cells);
  read_vec(is, ds.truth_sig, cells);
  return ds;
}

std::vector<FrequencyChannel> build_channels(const SyntheticDataset& ds,
                                             int pad_factor) {
  if (ds.freqs.size() != ds.e_meas.size())
    throw std::invalid_argument("dataset is internally inconsistent");
  const Grid grid = build_grid(ds.roi_half_width, ds.n);
  std::vector<FrequencyChannel> channels;
  channels.reserve(ds.freqs.size());
  for (std::size_t i = 0; i < ds.freqs.size(); ++i) {
    FrequencyChannel ch = make_channel(ds.layout, grid, ds.freqs[i], pad_factor);
    attach_measurements(ch, ds.e_meas[i], ds.layout.mask);
    channels.push_back(std::move(ch));
  }
  return channels;
}

}  // namespace ccpinn
