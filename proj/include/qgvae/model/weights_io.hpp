#pragma once

#include <string>

#include "qgvae/model/vae.hpp"

namespace qgvae::model {

// QGW1 binary format, little-endian: magic "QGW1", model_kind u32, config
// block (ny, nx, filters, latent_dim u32; kl_weight f64; seed u64), norm
// stats (mean[2], std[2] f64), layer count u32, then per layer: name length
// u32 + bytes, trainable u8, and for W then b: rank u32, dims u32[], values
// f32[]. Values are quantized to 32-bit floats; save→load→save is bit-exact.
void save_weights(const std::string& path, const ModelWeights& w);
ModelWeights load_weights(const std::string& path);

}  // namespace qgvae::model
