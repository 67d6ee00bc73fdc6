#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccpinn/constants.hpp"
#include "ccpinn/dataset.hpp"
#include "ccpinn/forward.hpp"
#include "ccpinn/operators.hpp"
#include "doctest.h"

using namespace ccpinn;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.phantom = austria_phantom(2.0, 0.003);
  spec.roi_half_width = 0.75;
  spec.inversion_n = 8;
  spec.fine_factor = 2;
  spec.freqs = {0.3e9, 0.4e9};
  spec.noise_seed = 11;
  spec.n_tx = 4;
  spec.n_rx = 16;
  return spec;
}

std::string temp_path(const char* name) {
  return std::string("/tmp/ccpinn_dataset_") + name;
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(bool(is));
  return std::vector<char>(std::istreambuf_iterator<char>(is),
                           std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream os(path, std::ios::binary);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("generated dataset carries the spec geometry and truth maps") {
  const SyntheticSpec spec = small_spec();
  const SyntheticDataset ds = generate_synthetic(spec);

  CHECK(ds.n == spec.inversion_n);
  CHECK(ds.roi_half_width == spec.roi_half_width);
  CHECK(ds.freqs == spec.freqs);
  CHECK(ds.snr_db == spec.snr_db);
  CHECK(ds.noise_seed == spec.noise_seed);
  CHECK(ds.layout.ntx() == spec.n_tx);
  CHECK(ds.layout.nrx() == spec.n_rx);
  REQUIRE(ds.e_meas.size() == spec.freqs.size());
  for (const CMatrix& m : ds.e_meas) {
    CHECK(m.rows == spec.n_tx);
    CHECK(m.cols == spec.n_rx);
  }

  // Masked entries must be stored as exact zeros.
  for (const CMatrix& m : ds.e_meas)
    for (int p = 0; p < m.rows; ++p)
      for (int q = 0; q < m.cols; ++q)
        if (!ds.layout.active(p, q)) CHECK(m.at(p, q) == cplx(0.0, 0.0));

  // Truth maps are the phantom rasterized on the inversion grid itself.
  const Grid coarse = build_grid(spec.roi_half_width, spec.inversion_n);
  const MediumMaps truth = rasterize(spec.phantom, coarse);
  CHECK(std::memcmp(ds.truth_eps.data(), truth.eps_r.data(),
                    truth.eps_r.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(ds.truth_sig.data(), truth.sigma.data(),
                    truth.sigma.size() * sizeof(double)) == 0);
}

TEST_CASE("noiseless measurements match an independent dense fine-grid solve") {
  SyntheticSpec spec = small_spec();
  const SyntheticDataset ds = generate_synthetic(spec);

  const Grid fine =
      build_grid(spec.roi_half_width, spec.inversion_n * spec.fine_factor);
  const MediumMaps medium = rasterize(spec.phantom, fine);
  const int cells = fine.num_cells();

  for (std::size_t i = 0; i < spec.freqs.size(); ++i) {
    const double freq = spec.freqs[i];
    const double k0 = 2.0 * pi * freq / c0;
    const ContrastMap cm = contrast_map(medium, freq);
    const CMatrix e_inc = incident_fields(ds.layout, fine, k0);
    const CMatrix g_dense = domain_operator_dense(fine, k0);
    const CMatrix e_tot = forward_solve_dense(cm.chi, e_inc, g_dense);
    const CMatrix gs = data_operator(ds.layout, fine, k0);

    double num = 0.0, den = 0.0;
    for (int p = 0; p < ds.layout.ntx(); ++p) {
      for (int q = 0; q < ds.layout.nrx(); ++q) {
        if (!ds.layout.active(p, q)) continue;
        cplx ref(0.0, 0.0);
        for (int n = 0; n < cells; ++n)
          ref += gs.at(q, n) * cm.chi[n] * e_tot.at(p, n);
        num += std::norm(ds.e_meas[i].at(p, q) - ref);
        den += std::norm(ref);
      }
    }
    REQUIRE(den > 0.0);
    CHECK(std::sqrt(num / den) < 1e-8);
  }
}

TEST_CASE("noise realization is a fixed function of the seed") {
  SyntheticSpec spec = small_spec();
  spec.snr_db = 20.0;

  const SyntheticDataset a = generate_synthetic(spec);
  const SyntheticDataset b = generate_synthetic(spec);
  for (std::size_t i = 0; i < a.e_meas.size(); ++i)
    CHECK(std::memcmp(a.e_meas[i].data.data(), b.e_meas[i].data.data(),
                      a.e_meas[i].data.size() * sizeof(cplx)) == 0);

  SyntheticSpec other = spec;
  other.noise_seed = spec.noise_seed + 1;
  const SyntheticDataset c = generate_synthetic(other);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.e_meas.size(); ++i)
    if (std::memcmp(a.e_meas[i].data.data(), c.e_meas[i].data.data(),
                    a.e_meas[i].data.size() * sizeof(cplx)) != 0)
      any_diff = true;
  CHECK(any_diff);

  // Empirical SNR of the single stored realization (all channels pooled)
  // should sit near the requested level.
  SyntheticSpec clean_spec = spec;
  clean_spec.snr_db = std::numeric_limits<double>::infinity();
  const SyntheticDataset clean = generate_synthetic(clean_spec);
  double sig = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < a.e_meas.size(); ++i)
    for (std::size_t k = 0; k < a.e_meas[i].data.size(); ++k) {
      sig += std::norm(clean.e_meas[i].data[k]);
      noise += std::norm(a.e_meas[i].data[k] - clean.e_meas[i].data[k]);
    }
  REQUIRE(noise > 0.0);
  const double snr = 10.0 * std::log10(sig / noise);
  CHECK(snr > 17.0);
  CHECK(snr < 23.0);
}

TEST_CASE("dataset container round trips bitwise") {
  SyntheticSpec spec = small_spec();
  for (double snr : {20.0, 10.0, 0.0}) {
    spec.snr_db = snr;
    const SyntheticDataset ds = generate_synthetic(spec);
    const std::string path = temp_path("roundtrip.bin");
    save_dataset(path, ds);
    const SyntheticDataset in = load_dataset(path);

    CHECK(in.schema_version == ds.schema_version);
    CHECK(in.roi_half_width == ds.roi_half_width);
    CHECK(in.n == ds.n);
    CHECK(in.snr_db == ds.snr_db);
    CHECK(in.noise_seed == ds.noise_seed);
    CHECK(in.freqs == ds.freqs);
    CHECK(in.layout.tx == ds.layout.tx);
    CHECK(in.layout.rx == ds.layout.rx);
    CHECK(in.layout.mask == ds.layout.mask);
    REQUIRE(in.e_meas.size() == ds.e_meas.size());
    for (std::size_t i = 0; i < ds.e_meas.size(); ++i)
      CHECK(std::memcmp(in.e_meas[i].data.data(), ds.e_meas[i].data.data(),
                        ds.e_meas[i].data.size() * sizeof(cplx)) == 0);
    CHECK(std::memcmp(in.truth_eps.data(), ds.truth_eps.data(),
                      ds.truth_eps.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(in.truth_sig.data(), ds.truth_sig.data(),
                      ds.truth_sig.size() * sizeof(double)) == 0);

    // Re-saving the loaded dataset reproduces the file byte for byte.
    const std::string path2 = temp_path("roundtrip2.bin");
    save_dataset(path2, in);
    CHECK(slurp(path) == slurp(path2));
  }
}

TEST_CASE("loader rejects corrupt containers") {
  const SyntheticDataset ds = generate_synthetic(small_spec());
  const std::string good = temp_path("good.bin");
  save_dataset(good, ds);
  const std::vector<char> bytes = slurp(good);

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset(temp_path("nonexistent.bin")),
                    std::runtime_error);
  }
  SUBCASE("wrong magic") {
    std::vector<char> bad = bytes;
    bad[0] = 'X';
    const std::string p = temp_path("badmagic.bin");
    spit(p, bad);
    CHECK_THROWS_AS(load_dataset(p), std::runtime_error);
  }
  SUBCASE("unsupported schema version") {
    std::vector<char> bad = bytes;
    bad[8] = 99;  // version field follows the 8-byte magic
    const std::string p = temp_path("badversion.bin");
    spit(p, bad);
    CHECK_THROWS_AS(load_dataset(p), std::runtime_error);
  }
  SUBCASE("truncation at several depths") {
    for (std::size_t keep :
         {std::size_t(4), std::size_t(16), bytes.size() / 2,
          bytes.size() - 1}) {
      std::vector<char> bad(bytes.begin(),
                            bytes.begin() + static_cast<std::ptrdiff_t>(keep));
      const std::string p = temp_path("truncated.bin");
      spit(p, bad);
      CHECK_THROWS_AS(load_dataset(p), std::runtime_error);
    }
  }
}

TEST_CASE("generation validates its spec") {
  SUBCASE("fine factor below 2") {
    SyntheticSpec s = small_spec();
    s.fine_factor = 1;
    CHECK_THROWS_AS(generate_synthetic(s), std::invalid_argument);
  }
  SUBCASE("no frequencies") {
    SyntheticSpec s = small_spec();
    s.freqs.clear();
    CHECK_THROWS_AS(generate_synthetic(s), std::invalid_argument);
  }
  SUBCASE("descending frequencies") {
    SyntheticSpec s = small_spec();
    s.freqs = {0.4e9, 0.3e9};
    CHECK_THROWS_AS(generate_synthetic(s), std::invalid_argument);
  }
  SUBCASE("non-positive frequency") {
    SyntheticSpec s = small_spec();
    s.freqs = {0.0, 0.3e9};
    CHECK_THROWS_AS(generate_synthetic(s), std::invalid_argument);
  }
  SUBCASE("NaN snr") {
    SyntheticSpec s = small_spec();
    s.snr_db = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(generate_synthetic(s), std::invalid_argument);
  }
  SUBCASE("non-positive half width") {
    SyntheticSpec s = small_spec();
    s.roi_half_width = 0.0;
    CHECK_THROWS_AS(generate_synthetic(s), std::invalid_argument);
  }
}

TEST_CASE("build_channels reproduces the stored measurements and order") {
  SyntheticSpec spec = small_spec();
  spec.snr_db = 20.0;
  const SyntheticDataset ds = generate_synthetic(spec);
  const std::vector<FrequencyChannel> channels = build_channels(ds, 2);

  REQUIRE(channels.size() == ds.freqs.size());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    CHECK(channels[i].freq == ds.freqs[i]);
    CHECK(channels[i].kernel.n == ds.n);
    CHECK(channels[i].d_meas > 0.0);
    CHECK(std::memcmp(channels[i].e_meas.data.data(),
                      ds.e_meas[i].data.data(),
                      ds.e_meas[i].data.size() * sizeof(cplx)) == 0);
    CHECK(channels[i].mask == ds.layout.mask);
  }
}
