#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ccpinn {

/// Fixed (non-trainable) Gaussian projection for the coordinate features.
/// Row j of freq holds the 2D projection vector of feature j; the embedding
/// of a normalized coordinate r is [sin(2*pi*B r); cos(2*pi*B r)], sines
/// first, output length 2m.
struct FourierEmbedding {
  int m = 0;
  double feature_std = 1.0;
  std::vector<double> freq;  // m x 2 row-major
};

/// Weight-normalized dense layer: effective weight W = g .* v / ||v|| rowwise.
struct WnLayer {
  int in = 0, out = 0;
  std::vector<double> v;  // out x in row-major, direction
  std::vector<double> g;  // out, gain
  std::vector<double> b;  // out, bias
};

struct DenseLayer {
  int in = 0, out = 0;
  std::vector<double> w;  // out x in row-major
  std::vector<double> b;  // out
};

/// Three weight-normalized SiLU hidden layers and a plain linear head whose
/// sigmoid output is affinely mapped to (eps_r, sigma).
struct NetworkParams {
  std::vector<WnLayer> hidden;
  DenseLayer head;
  std::array<double, 2> out_scale = {79.0, 1.0};
  std::array<double, 2> out_offset = {1.0, 0.0};
};

/// Default layer widths: embedding 128 -> 256 -> 256 -> 128 -> 2.
std::vector<int> default_dims();

/// Deterministic initialization: embedding entries N(0, feature_std^2);
/// hidden directions fan-in-scaled uniform with gains set to the row norms
/// (initial effective weight equals the raw draw) and zero biases; head
/// weights N(0, 1e-3^2) with bias -3.
void init_network(std::uint64_t seed, const std::vector<int>& dims,
                  double feature_std, FourierEmbedding* embedding,
                  NetworkParams* params);

/// features[b] = [sin(2 pi B r_b); cos(2 pi B r_b)], coords b x 2 row-major
/// normalized by the ROI half-width. Output batch x 2m.
void embed(const FourierEmbedding& embedding, const double* coords,
           double* features, int batch);

/// Saved activations from a forward pass, consumed by backward().
struct LayerCache {
  std::vector<double> w_eff;  // out x in effective weight
  std::vector<double> wt;     // in x out transposed copy
  std::vector<double> norm;   // per-row ||v||
  std::vector<double> z;      // batch x out preactivation
  std::vector<double> h;      // batch x out SiLU(z)
};

struct ForwardCache {
  int batch = 0;
  std::vector<LayerCache> layers;
  std::vector<double> raw;  // batch x 2 head output
  std::vector<double> sig;  // batch x 2 sigmoid(raw)
};

struct NetworkOutput {
  std::vector<double> eps_r;
  std::vector<double> sigma;
};

/// Evaluate the network on precomputed features (batch x 2m). Pass a cache
/// to keep the activations needed for backward.
NetworkOutput forward_from_features(const NetworkParams& params,
                                    const double* features, int batch,
                                    ForwardCache* cache = nullptr);

/// Convenience wrapper: embed + forward_from_features.
NetworkOutput forward(const FourierEmbedding& embedding,
                      const NetworkParams& params, const double* coords,
                      int batch, ForwardCache* cache = nullptr);

struct WnGrads {
  std::vector<double> v, g, b;
};

struct NetworkGrads {
  std::vector<WnGrads> hidden;
  std::vector<double> head_w, head_b;
};

/// Reverse pass for dL/d(eps_r), dL/d(sigma) given per coordinate; writes the
/// parameter gradients (overwriting, not accumulating). The embedding is
/// fixed, so no gradient flows to the features.
void backward(const NetworkParams& params, const ForwardCache& cache,
              const double* features, const double* d_eps,
              const double* d_sig, NetworkGrads* grads);

/// Flat views over all trainable tensors, in a fixed order shared between
/// parameters and gradients (hidden v, g, b per layer, then head w, b).
struct TensorView {
  double* data;
  std::size_t size;
};
struct ConstTensorView {
  const double* data;
  std::size_t size;
};
std::vector<TensorView> parameter_views(NetworkParams& params);
std::vector<ConstTensorView> gradient_views(const NetworkGrads& grads);

/// Model checkpoint: everything needed to re-run inference, including the
/// training ROI half-width used for coordinate normalization.
struct Checkpoint {
  std::uint32_t schema_version = 1;
  std::uint64_t seed = 0;
  double half_width = 0.0;
  FourierEmbedding embedding;
  NetworkParams params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ccpinn
