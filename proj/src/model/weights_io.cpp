#include "qgvae/model/weights_io.hpp"

#include <cstring>
#include <fstream>

#include "qgvae/common.hpp"

namespace qgvae::model {

namespace {

constexpr char kMagic[4] = {'Q', 'G', 'W', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError(std::string("truncated weights file while reading ") + what);
  return v;
}

void put_tensor(std::ostream& os, const nn::Tensor& t) {
  put(os, static_cast<std::uint32_t>(t.shape.size()));
  for (int d : t.shape) put(os, static_cast<std::uint32_t>(d));
  std::vector<float> vals(t.value.size());
  for (Eigen::Index i = 0; i < t.value.size(); ++i)
    vals[i] = static_cast<float>(t.value[i]);
  os.write(reinterpret_cast<const char*>(vals.data()),
           sizeof(float) * vals.size());
}

nn::Tensor get_tensor(std::istream& is, const std::string& name) {
  const std::uint32_t rank = get<std::uint32_t>(is, "tensor rank");
  if (rank == 0 || rank > 8)
    throw IoError("implausible tensor rank " + std::to_string(rank) + " for '" +
                  name + "'");
  std::vector<int> shape(rank);
  for (std::uint32_t d = 0; d < rank; ++d)
    shape[d] = static_cast<int>(get<std::uint32_t>(is, "tensor dim"));
  nn::Tensor t(shape);
  std::vector<float> vals(t.value.size());
  if (!is.read(reinterpret_cast<char*>(vals.data()), sizeof(float) * vals.size()))
    throw IoError("truncated weights file while reading values of '" + name + "'");
  for (Eigen::Index i = 0; i < t.value.size(); ++i)
    t.value[i] = static_cast<double>(vals[i]);
  return t;
}

}  // namespace

void save_weights(const std::string& path, const ModelWeights& w) {
  validate(w.config);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, 4);
  put(os, static_cast<std::uint32_t>(w.config.kind));
  put(os, static_cast<std::uint32_t>(w.config.ny));
  put(os, static_cast<std::uint32_t>(w.config.nx));
  put(os, static_cast<std::uint32_t>(w.config.filters));
  put(os, static_cast<std::uint32_t>(w.config.latent_dim));
  put(os, w.config.kl_weight);
  put(os, w.config.seed);
  for (double m : w.stats.mean) put(os, m);
  for (double s : w.stats.std) put(os, s);
  put(os, static_cast<std::uint32_t>(w.layers.size()));
  for (const ParamEntry& e : w.layers) {
    put(os, static_cast<std::uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put(os, static_cast<std::uint8_t>(e.w.trainable ? 1 : 0));
    put_tensor(os, e.w);
    put_tensor(os, e.b);
  }
  if (!os) throw IoError("write failed: " + path);
}

ModelWeights load_weights(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("bad magic in " + path + " (expected QGW1)");
  ModelWeights w;
  const std::uint32_t kind = get<std::uint32_t>(is, "model_kind");
  if (kind > 1)
    throw IoError("unknown model kind " + std::to_string(kind) + " in " + path);
  w.config.kind = static_cast<ModelKind>(kind);
  w.config.ny = static_cast<int>(get<std::uint32_t>(is, "ny"));
  w.config.nx = static_cast<int>(get<std::uint32_t>(is, "nx"));
  w.config.filters = static_cast<int>(get<std::uint32_t>(is, "filters"));
  w.config.latent_dim = static_cast<int>(get<std::uint32_t>(is, "latent_dim"));
  w.config.kl_weight = get<double>(is, "kl_weight");
  w.config.seed = get<std::uint64_t>(is, "seed");
  for (double& m : w.stats.mean) m = get<double>(is, "norm mean");
  for (double& s : w.stats.std) s = get<double>(is, "norm std");
  validate(w.config);

  const std::uint32_t count = get<std::uint32_t>(is, "layer count");
  const std::vector<LayerSpec> specs = layer_specs(w.config);
  if (count != specs.size())
    throw IoError("weights file lists " + std::to_string(count) +
                  " layers but the config implies " +
                  std::to_string(specs.size()));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = get<std::uint32_t>(is, "layer name length");
    if (len > 256) throw IoError("implausible layer name length");
    std::string name(len, '\0');
    if (!is.read(name.data(), len))
      throw IoError("truncated weights file while reading layer name");
    const std::uint8_t trainable = get<std::uint8_t>(is, "trainable flag");
    ParamEntry e;
    e.name = name;
    e.w = get_tensor(is, name + ".w");
    e.b = get_tensor(is, name + ".b");
    e.w.trainable = trainable != 0;
    e.b.trainable = trainable != 0;
    if (e.name != specs[i].name || e.w.shape != specs[i].w_shape ||
        e.b.shape != specs[i].b_shape)
      throw IoError("layer " + std::to_string(i) + " ('" + e.name +
                    "') does not match the declared architecture");
    w.layers.push_back(std::move(e));
  }
  return w;
}

}  // namespace qgvae::model
