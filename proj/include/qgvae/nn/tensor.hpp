#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qgvae {
class GaussianStream;
}

namespace qgvae::nn {

// Flat row-major value buffer plus a shape; grad is allocated on first use.
struct Tensor {
  std::vector<int> shape;
  Eigen::ArrayXd value;
  Eigen::ArrayXd grad;
  bool trainable = true;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);

  Eigen::Index size() const { return value.size(); }
  bool has_grad() const { return grad.size() == value.size(); }
  void ensure_grad();
  void zero_grad();
};

Eigen::Index shape_size(const std::vector<int>& s);
std::string shape_str(const std::vector<int>& s);

// He-normal fill, std = sqrt(2 / fan_in); deterministic given the stream.
void fill_he_normal(Tensor& t, Eigen::Index fan_in, GaussianStream& g);

}  // namespace qgvae::nn
