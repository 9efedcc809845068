#include "qgvae/nn/adam.hpp"

#include <cmath>

#include "qgvae/common.hpp"

namespace qgvae::nn {

std::vector<AdamState> adam_init(const std::vector<Tensor*>& params) {
  std::vector<AdamState> st(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    st[i].m = Eigen::ArrayXd::Zero(params[i]->value.size());
    st[i].v = Eigen::ArrayXd::Zero(params[i]->value.size());
  }
  return st;
}

void adam_step(const std::vector<Tensor*>& params, std::vector<AdamState>& st,
               const AdamConfig& cfg, long step, double grad_scale) {
  if (st.size() != params.size())
    throw ShapeError("adam state count does not match parameter count");
  if (step < 1) throw ConfigError("adam step index counts from 1");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = *params[i];
    if (!t.trainable || !t.has_grad()) continue;
    const Eigen::ArrayXd g = t.grad * grad_scale;
    st[i].m = cfg.beta1 * st[i].m + (1.0 - cfg.beta1) * g;
    st[i].v = cfg.beta2 * st[i].v + (1.0 - cfg.beta2) * g.square();
    t.value -= cfg.lr * (st[i].m / c1) / ((st[i].v / c2).sqrt() + cfg.eps);
  }
}

}  // namespace qgvae::nn
