#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qgvae/data/dataset.hpp"
#include "qgvae/nn/graph.hpp"
#include "qgvae/nn/tensor.hpp"

namespace qgvae::model {

enum class ModelKind : std::uint32_t { vae = 0, deterministic = 1 };

// One-step predictor on normalized (2, ny, nx) snapshots. Encoder: three
// conv(filters)+pool stages, then dense head(s) of width latent_dim. Decoder:
// dense back to filters*(ny/8)*(nx/8), three conv+upsample stages, linear
// output conv with 2 filters. The decoder emits the state increment; the
// model output is input + increment, so the background state never has to be
// re-encoded through the bottleneck. The deterministic variant drops the
// log-variance head and samples nothing.
struct VaeConfig {
  int ny = 96;
  int nx = 48;
  int filters = 32;
  int latent_dim = 128;
  double kl_weight = 1e-3;
  ModelKind kind = ModelKind::vae;
  std::uint64_t seed = 1234;

  int flat_dim() const { return filters * (ny / 8) * (nx / 8); }
  int field_size() const { return 2 * ny * nx; }
};

void validate(const VaeConfig& cfg);  // throws ConfigError

struct LayerSpec {
  std::string name;
  std::vector<int> w_shape;
  std::vector<int> b_shape;
};

// Layer order: enc1..enc3, mu, [logvar], dec_fc, dec1..dec3, dec_out.
std::vector<LayerSpec> layer_specs(const VaeConfig& cfg);

struct ParamEntry {
  std::string name;  // layer name; the entry holds that layer's W and b
  nn::Tensor w;
  nn::Tensor b;
};

struct ModelWeights {
  VaeConfig config;
  data::NormStats stats{};
  std::vector<ParamEntry> layers;

  ParamEntry& layer(const std::string& name);
  const ParamEntry& layer(const std::string& name) const;
  std::vector<nn::Tensor*> tensors();
  std::size_t parameter_count() const;
  void zero_grads();
};

ModelWeights init_weights(const VaeConfig& cfg, const data::NormStats& stats);

// Layers left trainable for transfer retraining: the deepest encoder conv,
// the bottleneck head(s), the post-bottleneck dense, and the first decoder
// conv. Everything else is frozen.
extern const std::array<const char*, 5> kTransferTrainable;
void set_all_trainable(ModelWeights& w, bool trainable);
void apply_transfer_freeze(ModelWeights& w);

// log-variance outputs are clamped to this range before KL / sampling.
inline constexpr double kLogvarLo = -20.0;
inline constexpr double kLogvarHi = 20.0;

struct EncodeHandles {
  int mu = -1;
  int logvar = -1;  // -1 for deterministic models
};
struct LossHandles {
  int mu = -1, logvar = -1, z = -1, out = -1;
  int recon = -1, kl = -1, total = -1;
};

EncodeHandles build_encoder(nn::Graph& g, ModelWeights& w, int x);
// x is the input-state node the decoded increment is added onto.
int build_decoder(nn::Graph& g, ModelWeights& w, int z, int x);
// x, target: normalized fields of size field_size(); eps: latent_dim draws
// (ignored for deterministic models, may be null there).
LossHandles build_loss_graph(nn::Graph& g, ModelWeights& w, const double* x,
                             const double* target, const double* eps);

// Tape-free forward pass with reusable scratch; one instance per thread.
// Produces values identical to the graph builders.
class Inference {
 public:
  explicit Inference(const ModelWeights& w);
  // mu/logvar have latent_dim entries; logvar output is already clamped and
  // must be null for deterministic models.
  void encode(const double* x, double* mu, double* logvar);
  // out = x + decoded increment; x is the state the latent was encoded from.
  // x and out must not alias.
  void decode(const double* z, const double* x, double* out);
  void predict_mean(const double* x, double* out);  // decode(encode(x).mu, x)

 private:
  const ModelWeights* w_;
  std::vector<double> a_, bbuf_, cols_, zbuf_;
};

}  // namespace qgvae::model
