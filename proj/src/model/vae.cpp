#include "qgvae/model/vae.hpp"

#include <algorithm>

#include "qgvae/common.hpp"
#include "qgvae/nn/kernels.hpp"

namespace qgvae::model {

void validate(const VaeConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("model config: " + msg); };
  if (cfg.ny <= 0 || cfg.ny % 8 != 0)
    fail("ny must be a positive multiple of 8, got " + std::to_string(cfg.ny));
  if (cfg.nx <= 0 || cfg.nx % 8 != 0)
    fail("nx must be a positive multiple of 8, got " + std::to_string(cfg.nx));
  if (cfg.filters <= 0) fail("filters must be positive");
  if (cfg.latent_dim <= 0) fail("latent_dim must be positive");
  if (!(cfg.kl_weight >= 0.0)) fail("kl_weight must be nonnegative");
  if (cfg.kind != ModelKind::vae && cfg.kind != ModelKind::deterministic)
    fail("unknown model kind");
}

std::vector<LayerSpec> layer_specs(const VaeConfig& cfg) {
  validate(cfg);
  const int f = cfg.filters, ld = cfg.latent_dim, flat = cfg.flat_dim();
  std::vector<LayerSpec> specs;
  specs.push_back({"enc1", {f, 2, 5, 5}, {f}});
  specs.push_back({"enc2", {f, f, 5, 5}, {f}});
  specs.push_back({"enc3", {f, f, 5, 5}, {f}});
  specs.push_back({"mu", {ld, flat}, {ld}});
  if (cfg.kind == ModelKind::vae) specs.push_back({"logvar", {ld, flat}, {ld}});
  specs.push_back({"dec_fc", {flat, ld}, {flat}});
  specs.push_back({"dec1", {f, f, 5, 5}, {f}});
  specs.push_back({"dec2", {f, f, 5, 5}, {f}});
  specs.push_back({"dec3", {f, f, 5, 5}, {f}});
  specs.push_back({"dec_out", {2, f, 5, 5}, {2}});
  return specs;
}

ParamEntry& ModelWeights::layer(const std::string& name) {
  for (ParamEntry& e : layers)
    if (e.name == name) return e;
  throw ConfigError("model has no layer named '" + name + "'");
}

const ParamEntry& ModelWeights::layer(const std::string& name) const {
  return const_cast<ModelWeights*>(this)->layer(name);
}

std::vector<nn::Tensor*> ModelWeights::tensors() {
  std::vector<nn::Tensor*> out;
  out.reserve(2 * layers.size());
  for (ParamEntry& e : layers) {
    out.push_back(&e.w);
    out.push_back(&e.b);
  }
  return out;
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  for (const ParamEntry& e : layers) n += e.w.size() + e.b.size();
  return n;
}

void ModelWeights::zero_grads() {
  for (ParamEntry& e : layers) {
    e.w.zero_grad();
    e.b.zero_grad();
  }
}

ModelWeights init_weights(const VaeConfig& cfg, const data::NormStats& stats) {
  ModelWeights w;
  w.config = cfg;
  w.stats = stats;
  std::uint64_t stream = 0;
  for (const LayerSpec& spec : layer_specs(cfg)) {
    ParamEntry e;
    e.name = spec.name;
    e.w = nn::Tensor(spec.w_shape);
    e.b = nn::Tensor(spec.b_shape);
    Eigen::Index fan_in = 1;
    for (std::size_t d = 1; d < spec.w_shape.size(); ++d) fan_in *= spec.w_shape[d];
    GaussianStream g(cfg.seed, 0x11A0 + stream++);
    nn::fill_he_normal(e.w, fan_in, g);
    w.layers.push_back(std::move(e));
  }
  return w;
}

const std::array<const char*, 5> kTransferTrainable = {
    "enc3", "mu", "logvar", "dec_fc", "dec1"};

void set_all_trainable(ModelWeights& w, bool trainable) {
  for (ParamEntry& e : w.layers) {
    e.w.trainable = trainable;
    e.b.trainable = trainable;
  }
}

void apply_transfer_freeze(ModelWeights& w) {
  set_all_trainable(w, false);
  for (const char* name : kTransferTrainable) {
    if (std::string(name) == "logvar" && w.config.kind == ModelKind::deterministic)
      continue;
    ParamEntry& e = w.layer(name);
    e.w.trainable = true;
    e.b.trainable = true;
  }
}

EncodeHandles build_encoder(nn::Graph& g, ModelWeights& w, int x) {
  const VaeConfig& cfg = w.config;
  auto conv = [&](int in, const char* name) {
    ParamEntry& e = w.layer(name);
    return g.relu(g.conv2d(in, g.param(e.w), g.param(e.b)));
  };
  int h = conv(x, "enc1");
  h = g.maxpool2(h);
  h = conv(h, "enc2");
  h = g.maxpool2(h);
  h = conv(h, "enc3");
  h = g.maxpool2(h);
  h = g.reshape(h, {cfg.flat_dim()});
  EncodeHandles out;
  ParamEntry& mu = w.layer("mu");
  out.mu = g.dense(h, g.param(mu.w), g.param(mu.b));
  if (cfg.kind == ModelKind::vae) {
    ParamEntry& lv = w.layer("logvar");
    out.logvar = g.clamp(g.dense(h, g.param(lv.w), g.param(lv.b)), kLogvarLo,
                         kLogvarHi);
  }
  return out;
}

int build_decoder(nn::Graph& g, ModelWeights& w, int z, int x) {
  const VaeConfig& cfg = w.config;
  ParamEntry& fc = w.layer("dec_fc");
  int h = g.relu(g.dense(z, g.param(fc.w), g.param(fc.b)));
  h = g.reshape(h, {cfg.filters, cfg.ny / 8, cfg.nx / 8});
  auto conv = [&](int in, const char* name, bool act) {
    ParamEntry& e = w.layer(name);
    int c = g.conv2d(in, g.param(e.w), g.param(e.b));
    return act ? g.relu(c) : c;
  };
  h = conv(h, "dec1", true);
  h = g.upsample2(h);
  h = conv(h, "dec2", true);
  h = g.upsample2(h);
  h = conv(h, "dec3", true);
  h = g.upsample2(h);
  return g.add(conv(h, "dec_out", false), x);
}

LossHandles build_loss_graph(nn::Graph& g, ModelWeights& w, const double* x,
                             const double* target, const double* eps) {
  const VaeConfig& cfg = w.config;
  LossHandles out;
  int xin = g.leaf(x, {2, cfg.ny, cfg.nx});
  EncodeHandles enc = build_encoder(g, w, xin);
  out.mu = enc.mu;
  out.logvar = enc.logvar;
  if (cfg.kind == ModelKind::vae) {
    out.z = g.reparameterize(enc.mu, enc.logvar, eps);
    out.out = build_decoder(g, w, out.z, xin);
    out.recon = g.mse(out.out, target);
    out.kl = g.gaussian_kl(enc.mu, enc.logvar);
    out.total = g.add(out.recon, g.scale(out.kl, cfg.kl_weight));
  } else {
    out.z = enc.mu;
    out.out = build_decoder(g, w, out.z, xin);
    out.recon = g.mse(out.out, target);
    out.total = out.recon;
  }
  return out;
}

Inference::Inference(const ModelWeights& w) : w_(&w) {
  const VaeConfig& cfg = w_->config;
  const std::size_t field = static_cast<std::size_t>(cfg.filters) * cfg.ny * cfg.nx;
  a_.resize(field);
  bbuf_.resize(field);
  cols_.resize(static_cast<std::size_t>(cfg.filters) * 25 * cfg.ny * cfg.nx);
  zbuf_.resize(cfg.latent_dim);
}

void Inference::encode(const double* x, double* mu, double* logvar) {
  const VaeConfig& cfg = w_->config;
  if ((logvar != nullptr) != (cfg.kind == ModelKind::vae))
    throw ConfigError("encode: log-variance buffer does not match model kind");
  int h = cfg.ny, wd = cfg.nx, c = 2;
  const double* cur = x;
  for (const char* name : {"enc1", "enc2", "enc3"}) {
    const ParamEntry& e = w_->layer(name);
    nn::conv2d_forward(cur, c, h, wd, e.w.value.data(), e.b.value.data(),
                       cfg.filters, 5, 5, bbuf_.data(), cols_.data());
    c = cfg.filters;
    const std::size_t n = static_cast<std::size_t>(c) * h * wd;
    for (std::size_t i = 0; i < n; ++i) bbuf_[i] = std::max(bbuf_[i], 0.0);
    nn::maxpool2_forward(bbuf_.data(), c, h, wd, a_.data(), nullptr);
    h /= 2;
    wd /= 2;
    cur = a_.data();
  }
  const ParamEntry& muL = w_->layer("mu");
  nn::dense_forward(cur, cfg.flat_dim(), muL.w.value.data(),
                    muL.b.value.data(), cfg.latent_dim, mu);
  if (logvar) {
    const ParamEntry& lvL = w_->layer("logvar");
    nn::dense_forward(cur, cfg.flat_dim(), lvL.w.value.data(),
                      lvL.b.value.data(), cfg.latent_dim, logvar);
    for (int i = 0; i < cfg.latent_dim; ++i)
      logvar[i] = std::min(std::max(logvar[i], kLogvarLo), kLogvarHi);
  }
}

void Inference::decode(const double* z, const double* x, double* out) {
  const VaeConfig& cfg = w_->config;
  const ParamEntry& fc = w_->layer("dec_fc");
  nn::dense_forward(z, cfg.latent_dim, fc.w.value.data(), fc.b.value.data(),
                    cfg.flat_dim(), a_.data());
  for (int i = 0; i < cfg.flat_dim(); ++i) a_[i] = std::max(a_[i], 0.0);
  int h = cfg.ny / 8, wd = cfg.nx / 8;
  for (const char* name : {"dec1", "dec2", "dec3"}) {
    const ParamEntry& e = w_->layer(name);
    nn::conv2d_forward(a_.data(), cfg.filters, h, wd, e.w.value.data(),
                       e.b.value.data(), cfg.filters, 5, 5, bbuf_.data(),
                       cols_.data());
    const std::size_t n = static_cast<std::size_t>(cfg.filters) * h * wd;
    for (std::size_t i = 0; i < n; ++i) bbuf_[i] = std::max(bbuf_[i], 0.0);
    nn::upsample2_forward(bbuf_.data(), cfg.filters, h, wd, a_.data());
    h *= 2;
    wd *= 2;
  }
  const ParamEntry& last = w_->layer("dec_out");
  nn::conv2d_forward(a_.data(), cfg.filters, h, wd, last.w.value.data(),
                     last.b.value.data(), 2, 5, 5, out, cols_.data());
  const int field = cfg.field_size();
  for (int i = 0; i < field; ++i) out[i] += x[i];
}

void Inference::predict_mean(const double* x, double* out) {
  const VaeConfig& cfg = w_->config;
  if (cfg.kind == ModelKind::vae) {
    std::vector<double> lv(cfg.latent_dim);
    encode(x, zbuf_.data(), lv.data());
  } else {
    encode(x, zbuf_.data(), nullptr);
  }
  decode(zbuf_.data(), x, out);
}

}  // namespace qgvae::model
