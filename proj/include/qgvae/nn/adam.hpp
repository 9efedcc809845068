#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qgvae/nn/tensor.hpp"

namespace qgvae::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Eigen::ArrayXd m;
  Eigen::ArrayXd v;
};

std::vector<AdamState> adam_init(const std::vector<Tensor*>& params);

// One bias-corrected update; step counts from 1. grad_scale multiplies stored
// gradients first (1/batch for mini-batch means). Non-trainable tensors and
// tensors without gradients are skipped.
void adam_step(const std::vector<Tensor*>& params, std::vector<AdamState>& st,
               const AdamConfig& cfg, long step, double grad_scale);

}  // namespace qgvae::nn
