#include "qgvae/nn/tensor.hpp"

#include <sstream>

#include "qgvae/common.hpp"

namespace qgvae::nn {

Eigen::Index shape_size(const std::vector<int>& s) {
  Eigen::Index n = 1;
  for (int d : s) {
    if (d <= 0) throw ShapeError("tensor dimension must be positive, got " + shape_str(s));
    n *= d;
  }
  return n;
}

std::string shape_str(const std::vector<int>& s) {
  std::ostringstream oss;
  oss << '(';
  for (std::size_t i = 0; i < s.size(); ++i) oss << (i ? "," : "") << s[i];
  oss << ')';
  return oss.str();
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
  value = Eigen::ArrayXd::Zero(shape_size(shape));
}

void Tensor::ensure_grad() {
  if (!has_grad()) grad = Eigen::ArrayXd::Zero(value.size());
}

void Tensor::zero_grad() {
  if (has_grad()) grad.setZero();
}

void fill_he_normal(Tensor& t, Eigen::Index fan_in, GaussianStream& g) {
  const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value[i] = sd * g.next();
}

}  // namespace qgvae::nn
