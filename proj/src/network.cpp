#include "ccpinn/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "ccpinn/kernels.hpp"
#include "ccpinn/parallel.hpp"

namespace ccpinn {

namespace {

constexpr double two_pi = 6.28318530717958647692;

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double row_norm(const double* row, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += row[k] * row[k];
  return std::sqrt(s);
}

/// Effective weights W = g .* v / ||v|| plus the transposed copy the batched
/// forward kernel wants. Row norms are kept for the weight-norm backward.
void effective_weights(const WnLayer& layer, std::vector<double>& w_eff,
                       std::vector<double>& wt, std::vector<double>& norm) {
  const int out = layer.out, in = layer.in;
  w_eff.resize(static_cast<std::size_t>(out) * in);
  wt.resize(static_cast<std::size_t>(in) * out);
  norm.resize(out);
  for (int o = 0; o < out; ++o) {
    const double* vr = layer.v.data() + static_cast<std::size_t>(o) * in;
    const double n = row_norm(vr, in);
    if (!(n > 0.0)) {
      throw std::runtime_error("network: weight-norm direction row has zero norm");
    }
    norm[o] = n;
    const double scale = layer.g[o] / n;
    double* wr = w_eff.data() + static_cast<std::size_t>(o) * in;
    for (int k = 0; k < in; ++k) wr[k] = scale * vr[k];
  }
  for (int o = 0; o < out; ++o) {
    const double* wr = w_eff.data() + static_cast<std::size_t>(o) * in;
    for (int k = 0; k < in; ++k) wt[static_cast<std::size_t>(k) * out + o] = wr[k];
  }
}

}  // namespace

std::vector<int> default_dims() { return {128, 256, 256, 128, 2}; }

void init_network(std::uint64_t seed, const std::vector<int>& dims,
                  double feature_std, FourierEmbedding* embedding,
                  NetworkParams* params) {
  if (dims.size() < 3) {
    throw std::invalid_argument("init_network: need at least embedding, one hidden and output dims");
  }
  if (dims.front() % 2 != 0 || dims.front() <= 0) {
    throw std::invalid_argument("init_network: embedding width must be positive and even");
  }
  if (dims.back() != 2) {
    throw std::invalid_argument("init_network: output width must be 2 (eps_r, sigma)");
  }
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("init_network: layer widths must be positive");
  }
  if (!(feature_std > 0.0)) {
    throw std::invalid_argument("init_network: feature_std must be positive");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  embedding->m = dims.front() / 2;
  embedding->feature_std = feature_std;
  embedding->freq.resize(static_cast<std::size_t>(embedding->m) * 2);
  for (double& f : embedding->freq) f = feature_std * gauss(rng);

  const int n_hidden = static_cast<int>(dims.size()) - 2;
  params->hidden.assign(n_hidden, WnLayer{});
  for (int l = 0; l < n_hidden; ++l) {
    WnLayer& layer = params->hidden[l];
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.v.resize(static_cast<std::size_t>(layer.out) * layer.in);
    layer.g.resize(layer.out);
    layer.b.assign(layer.out, 0.0);
    const double limit = std::sqrt(3.0 / layer.in);
    std::uniform_real_distribution<double> lecun(-limit, limit);
    for (double& w : layer.v) w = lecun(rng);
    // Gain = row norm so the initial effective weight equals the raw draw.
    for (int o = 0; o < layer.out; ++o) {
      layer.g[o] = row_norm(layer.v.data() + static_cast<std::size_t>(o) * layer.in, layer.in);
    }
  }

  DenseLayer& head = params->head;
  head.in = dims[dims.size() - 2];
  head.out = 2;
  head.w.resize(static_cast<std::size_t>(head.out) * head.in);
  for (double& w : head.w) w = 1e-3 * gauss(rng);
  // Biasing the head negative starts both outputs near the low end of their
  // ranges instead of mid-range.
  head.b.assign(head.out, -3.0);
  params->out_scale = {79.0, 1.0};
  params->out_offset = {1.0, 0.0};
}

void embed(const FourierEmbedding& embedding, const double* coords,
           double* features, int batch) {
  const int m = embedding.m;
  if (m <= 0) throw std::invalid_argument("embed: embedding is empty");
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && batch > 64)
#endif
  for (int b = 0; b < batch; ++b) {
    const double x = coords[2 * b], y = coords[2 * b + 1];
    double* row = features + static_cast<std::size_t>(b) * 2 * m;
    for (int j = 0; j < m; ++j) {
      const double phase = two_pi * (embedding.freq[2 * j] * x + embedding.freq[2 * j + 1] * y);
      row[j] = std::sin(phase);
      row[m + j] = std::cos(phase);
    }
  }
}

NetworkOutput forward_from_features(const NetworkParams& params,
                                    const double* features, int batch,
                                    ForwardCache* cache) {
  if (params.hidden.empty()) throw std::invalid_argument("forward: network has no hidden layers");
  const int n_hidden = static_cast<int>(params.hidden.size());

  ForwardCache local;
  ForwardCache& cc = cache ? *cache : local;
  cc.batch = batch;
  cc.layers.resize(n_hidden);

  const double* x = features;
  for (int l = 0; l < n_hidden; ++l) {
    const WnLayer& layer = params.hidden[l];
    LayerCache& lc = cc.layers[l];
    effective_weights(layer, lc.w_eff, lc.wt, lc.norm);
    lc.z.resize(static_cast<std::size_t>(batch) * layer.out);
    lc.h.resize(static_cast<std::size_t>(batch) * layer.out);
    kernels::linear_forward(x, lc.wt.data(), layer.b.data(), lc.z.data(),
                            batch, layer.in, layer.out);
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(lc.z.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && count > 4096)
#endif
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const double z = lc.z[i];
      lc.h[i] = z * stable_sigmoid(z);
    }
    x = lc.h.data();
  }

  const DenseLayer& head = params.head;
  if (head.in != params.hidden.back().out) {
    throw std::invalid_argument("forward: head width does not match last hidden layer");
  }
  std::vector<double> head_wt(static_cast<std::size_t>(head.in) * head.out);
  for (int o = 0; o < head.out; ++o) {
    for (int k = 0; k < head.in; ++k) {
      head_wt[static_cast<std::size_t>(k) * head.out + o] =
          head.w[static_cast<std::size_t>(o) * head.in + k];
    }
  }
  cc.raw.resize(static_cast<std::size_t>(batch) * 2);
  cc.sig.resize(static_cast<std::size_t>(batch) * 2);
  kernels::linear_forward(x, head_wt.data(), head.b.data(), cc.raw.data(),
                          batch, head.in, head.out);

  NetworkOutput out;
  out.eps_r.resize(batch);
  out.sigma.resize(batch);
  for (int b = 0; b < batch; ++b) {
    const double s0 = stable_sigmoid(cc.raw[2 * b]);
    const double s1 = stable_sigmoid(cc.raw[2 * b + 1]);
    cc.sig[2 * b] = s0;
    cc.sig[2 * b + 1] = s1;
    out.eps_r[b] = params.out_offset[0] + params.out_scale[0] * s0;
    out.sigma[b] = params.out_offset[1] + params.out_scale[1] * s1;
  }
  return out;
}

NetworkOutput forward(const FourierEmbedding& embedding,
                      const NetworkParams& params, const double* coords,
                      int batch, ForwardCache* cache) {
  std::vector<double> features(static_cast<std::size_t>(batch) * 2 * embedding.m);
  embed(embedding, coords, features.data(), batch);
  return forward_from_features(params, features.data(), batch, cache);
}

void backward(const NetworkParams& params, const ForwardCache& cache,
              const double* features, const double* d_eps,
              const double* d_sig, NetworkGrads* grads) {
  const int batch = cache.batch;
  const int n_hidden = static_cast<int>(params.hidden.size());
  if (static_cast<int>(cache.layers.size()) != n_hidden) {
    throw std::invalid_argument("backward: cache does not match network shape");
  }

  grads->hidden.resize(n_hidden);
  for (int l = 0; l < n_hidden; ++l) {
    const WnLayer& layer = params.hidden[l];
    grads->hidden[l].v.assign(layer.v.size(), 0.0);
    grads->hidden[l].g.assign(layer.g.size(), 0.0);
    grads->hidden[l].b.assign(layer.b.size(), 0.0);
  }
  const DenseLayer& head = params.head;
  grads->head_w.assign(head.w.size(), 0.0);
  grads->head_b.assign(head.b.size(), 0.0);

  // Head: output o = offset + scale * sigmoid(raw), so
  // d_raw = d_out * scale * s * (1 - s).
  std::vector<double> d_raw(static_cast<std::size_t>(batch) * 2);
  for (int b = 0; b < batch; ++b) {
    const double s0 = cache.sig[2 * b], s1 = cache.sig[2 * b + 1];
    d_raw[2 * b] = d_eps[b] * params.out_scale[0] * s0 * (1.0 - s0);
    d_raw[2 * b + 1] = d_sig[b] * params.out_scale[1] * s1 * (1.0 - s1);
  }

  const double* h_last = cache.layers.back().h.data();
  kernels::linear_grad_params(h_last, d_raw.data(), grads->head_w.data(),
                              grads->head_b.data(), batch, head.in, head.out);

  std::vector<double> d_h(static_cast<std::size_t>(batch) * head.in);
  kernels::linear_grad_input(d_raw.data(), head.w.data(), d_h.data(),
                             batch, head.in, head.out);

  std::vector<double> d_z, d_w_eff, d_x;
  for (int l = n_hidden - 1; l >= 0; --l) {
    const WnLayer& layer = params.hidden[l];
    const LayerCache& lc = cache.layers[l];
    WnGrads& lg = grads->hidden[l];

    // SiLU'(z) = s(z) * (1 + z * (1 - s(z))).
    d_z.resize(static_cast<std::size_t>(batch) * layer.out);
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(d_z.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel::enabled() && count > 4096)
#endif
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const double z = lc.z[i];
      const double s = stable_sigmoid(z);
      d_z[i] = d_h[i] * s * (1.0 + z * (1.0 - s));
    }

    const double* x_in = (l == 0) ? features : cache.layers[l - 1].h.data();
    d_w_eff.assign(static_cast<std::size_t>(layer.out) * layer.in, 0.0);
    kernels::linear_grad_params(x_in, d_z.data(), d_w_eff.data(), lg.b.data(),
                                batch, layer.in, layer.out);

    // Weight-norm chain rule per row r, with n = ||v_r||, W_r = g v_r / n:
    //   dg   = (dW . v) / n
    //   dv   = (g/n) dW - g (dW . v) / n^3 * v
    for (int o = 0; o < layer.out; ++o) {
      const std::size_t off = static_cast<std::size_t>(o) * layer.in;
      const double* vr = layer.v.data() + off;
      const double* dwr = d_w_eff.data() + off;
      double dot = 0.0;
      for (int k = 0; k < layer.in; ++k) dot += dwr[k] * vr[k];
      const double n = lc.norm[o];
      lg.g[o] = dot / n;
      const double a = layer.g[o] / n;
      const double c = layer.g[o] * dot / (n * n * n);
      double* dvr = lg.v.data() + off;
      for (int k = 0; k < layer.in; ++k) dvr[k] = a * dwr[k] - c * vr[k];
    }

    if (l > 0) {
      d_x.resize(static_cast<std::size_t>(batch) * layer.in);
      kernels::linear_grad_input(d_z.data(), lc.w_eff.data(), d_x.data(),
                                 batch, layer.in, layer.out);
      d_h.swap(d_x);
    }
    // The embedding is fixed; no gradient to the first-layer input.
  }
}

std::vector<TensorView> parameter_views(NetworkParams& params) {
  std::vector<TensorView> views;
  for (WnLayer& layer : params.hidden) {
    views.push_back({layer.v.data(), layer.v.size()});
    views.push_back({layer.g.data(), layer.g.size()});
    views.push_back({layer.b.data(), layer.b.size()});
  }
  views.push_back({params.head.w.data(), params.head.w.size()});
  views.push_back({params.head.b.data(), params.head.b.size()});
  return views;
}

std::vector<ConstTensorView> gradient_views(const NetworkGrads& grads) {
  std::vector<ConstTensorView> views;
  for (const WnGrads& lg : grads.hidden) {
    views.push_back({lg.v.data(), lg.v.size()});
    views.push_back({lg.g.data(), lg.g.size()});
    views.push_back({lg.b.data(), lg.b.size()});
  }
  views.push_back({grads.head_w.data(), grads.head_w.size()});
  views.push_back({grads.head_b.data(), grads.head_b.size()});
  return views;
}

namespace {

constexpr char checkpoint_magic[8] = {'C', 'C', 'P', 'N', 'N', 'C', 'K', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& value) {
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
}

void write_vec(std::ostream& os, const std::vector<double>& v) {
  const std::uint64_t n = v.size();
  write_pod(os, n);
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
}

std::vector<double> read_vec(std::istream& is) {
  std::uint64_t n = 0;
  read_pod(is, n);
  if (n > (1ull << 32)) throw std::runtime_error("checkpoint: implausible tensor size");
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  os.write(checkpoint_magic, sizeof(checkpoint_magic));
  write_pod(os, ckpt.schema_version);
  write_pod(os, ckpt.seed);
  write_pod(os, ckpt.half_width);
  write_pod(os, ckpt.embedding.feature_std);
  write_pod(os, static_cast<std::uint32_t>(ckpt.embedding.m));
  write_vec(os, ckpt.embedding.freq);
  write_pod(os, static_cast<std::uint32_t>(ckpt.params.hidden.size()));
  for (const WnLayer& layer : ckpt.params.hidden) {
    write_pod(os, static_cast<std::uint32_t>(layer.in));
    write_pod(os, static_cast<std::uint32_t>(layer.out));
    write_vec(os, layer.v);
    write_vec(os, layer.g);
    write_vec(os, layer.b);
  }
  write_pod(os, static_cast<std::uint32_t>(ckpt.params.head.in));
  write_pod(os, static_cast<std::uint32_t>(ckpt.params.head.out));
  write_vec(os, ckpt.params.head.w);
  write_vec(os, ckpt.params.head.b);
  for (double s : ckpt.params.out_scale) write_pod(os, s);
  for (double o : ckpt.params.out_offset) write_pod(os, o);
  if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, checkpoint_magic, sizeof(magic)) != 0) {
    throw std::runtime_error("load_checkpoint: not a model checkpoint: " + path);
  }
  Checkpoint ckpt;
  read_pod(is, ckpt.schema_version);
  if (ckpt.schema_version != 1) {
    throw std::runtime_error("load_checkpoint: unsupported schema version");
  }
  read_pod(is, ckpt.seed);
  read_pod(is, ckpt.half_width);
  read_pod(is, ckpt.embedding.feature_std);
  std::uint32_t m = 0;
  read_pod(is, m);
  ckpt.embedding.m = static_cast<int>(m);
  ckpt.embedding.freq = read_vec(is);
  std::uint32_t n_hidden = 0;
  read_pod(is, n_hidden);
  if (n_hidden > 64) throw std::runtime_error("load_checkpoint: implausible layer count");
  ckpt.params.hidden.resize(n_hidden);
  for (WnLayer& layer : ckpt.params.hidden) {
    std::uint32_t in = 0, out = 0;
    read_pod(is, in);
    read_pod(is, out);
    layer.in = static_cast<int>(in);
    layer.out = static_cast<int>(out);
    layer.v = read_vec(is);
    layer.g = read_vec(is);
    layer.b = read_vec(is);
  }
  std::uint32_t hin = 0, hout = 0;
  read_pod(is, hin);
  read_pod(is, hout);
  ckpt.params.head.in = static_cast<int>(hin);
  ckpt.params.head.out = static_cast<int>(hout);
  ckpt.params.head.w = read_vec(is);
  ckpt.params.head.b = read_vec(is);
  for (double& s : ckpt.params.out_scale) read_pod(is, s);
  for (double& o : ckpt.params.out_offset) read_pod(is, o);
  if (!is) throw std::runtime_error("load_checkpoint: truncated file: " + path);
  return ckpt;
}

}  // namespace ccpinn
