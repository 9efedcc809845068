#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qgvae/nn/tensor.hpp"

namespace qgvae::nn {

class Graph;

struct Node {
  std::vector<int> shape;
  Eigen::ArrayXd value;
  Eigen::ArrayXd grad;
  bool needs_grad = false;
  std::vector<int> inputs;
  std::vector<double> aux;
  std::vector<int> iaux;
  Tensor* bound = nullptr;
  std::function<void(Graph&, Node&)> back;
  const char* op = "leaf";
};

// Define-by-run tape: each op evaluates eagerly and records a backward closure.
// Single-threaded per instance; construct one graph per sample.
class Graph {
 public:
  // Constant leaf (copies data, no gradient).
  int leaf(const double* data, std::vector<int> shape);
  // Differentiable leaf for gradient checks; grad readable via at().grad.
  int leaf_grad(const double* data, std::vector<int> shape);
  // Parameter leaf; after backward() the gradient is accumulated into
  // t.grad. needs_grad follows t.trainable.
  int param(Tensor& t);

  int conv2d(int x, int w, int b);                 // x [C,H,W], w [F,C,KH,KW]
  int dense(int x, int w, int b);                  // x [N], w [M,N]
  int relu(int x);
  int clamp(int x, double lo, double hi);
  int maxpool2(int x);
  int upsample2(int x);
  int reshape(int x, std::vector<int> shape);
  int add(int a, int b);
  int mul(int a, int b);
  int scale(int x, double s);
  int sum(int x);                                  // scalar
  int mse(int pred, const double* target);         // mean over elements
  int gaussian_kl(int mu, int logvar);             // ½Σ(e^lv + μ² − 1 − lv)
  int reparameterize(int mu, int logvar, const double* eps);

  // Reverse sweep from a scalar root; accumulates into parameter grads.
  void backward(int root);

  Node& at(int id);
  const Node& at(int id) const;
  double scalar(int id) const;
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  int push(Node n);
  void check_input(int id) const;
  std::vector<Node> nodes_;
};

}  // namespace qgvae::nn
