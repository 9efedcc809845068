#include "qgvae/nn/graph.hpp"

#include <cmath>
#include <cstring>

#include "qgvae/common.hpp"
#include "qgvae/nn/kernels.hpp"

namespace qgvae::nn {

namespace {
Eigen::Map<const Eigen::ArrayXd> as_array(const double* p, Eigen::Index n) {
  return Eigen::Map<const Eigen::ArrayXd>(p, n);
}
}  // namespace

int Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Graph::check_input(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw ShapeError("graph op consumes a node that does not exist yet");
}

Node& Graph::at(int id) { return nodes_.at(id); }
const Node& Graph::at(int id) const { return nodes_.at(id); }

double Graph::scalar(int id) const {
  const Node& n = nodes_.at(id);
  if (n.value.size() != 1) throw ShapeError("node is not a scalar");
  return n.value[0];
}

int Graph::leaf(const double* data, std::vector<int> shape) {
  Node n;
  n.value = as_array(data, shape_size(shape));
  n.shape = std::move(shape);
  return push(std::move(n));
}

int Graph::leaf_grad(const double* data, std::vector<int> shape) {
  int id = leaf(data, std::move(shape));
  nodes_[id].needs_grad = true;
  return id;
}

int Graph::param(Tensor& t) {
  Node n;
  n.shape = t.shape;
  n.value = t.value;
  n.needs_grad = t.trainable;
  n.bound = &t;
  n.op = "param";
  return push(std::move(n));
}

int Graph::conv2d(int x, int w, int b) {
  check_input(x);
  check_input(w);
  check_input(b);
  const Node& xn = nodes_[x];
  const Node& wn = nodes_[w];
  const Node& bn = nodes_[b];
  if (xn.shape.size() != 3 || wn.shape.size() != 4)
    throw ShapeError("conv2d expects x [C,H,W], w [F,C,KH,KW]");
  const int c = xn.shape[0], h = xn.shape[1], ww = xn.shape[2];
  const int f = wn.shape[0], kh = wn.shape[2], kw = wn.shape[3];
  if (wn.shape[1] != c)
    throw ShapeError("conv2d weight channels " + shape_str(wn.shape) +
                     " do not match input " + shape_str(xn.shape));
  if (bn.shape != std::vector<int>{f}) throw ShapeError("conv2d bias must be [F]");
  if (kh % 2 == 0 || kw % 2 == 0) throw ShapeError("conv2d kernel extents must be odd");

  Node n;
  n.op = "conv2d";
  n.shape = {f, h, ww};
  n.inputs = {x, w, b};
  n.needs_grad = xn.needs_grad || wn.needs_grad || bn.needs_grad;
  n.iaux = {c, h, ww, f, kh, kw};
  n.value.resize(static_cast<Eigen::Index>(f) * h * ww);
  n.aux.resize(static_cast<std::size_t>(c) * kh * kw * h * ww);
  conv2d_forward(xn.value.data(), c, h, ww, wn.value.data(), bn.value.data(), f,
                 kh, kw, n.value.data(), n.aux.data());
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    Node& wn = g.at(self.inputs[1]);
    Node& bn = g.at(self.inputs[2]);
    const auto& d = self.iaux;
    conv2d_backward(self.grad.data(), xn.value.data(), wn.value.data(),
                    self.aux.data(), d[0], d[1], d[2], d[3], d[4], d[5],
                    wn.needs_grad ? wn.grad.data() : nullptr,
                    bn.needs_grad ? bn.grad.data() : nullptr,
                    xn.needs_grad ? xn.grad.data() : nullptr);
  };
  return push(std::move(n));
}

int Graph::dense(int x, int w, int b) {
  check_input(x);
  check_input(w);
  check_input(b);
  const Node& xn = nodes_[x];
  const Node& wn = nodes_[w];
  const Node& bn = nodes_[b];
  if (wn.shape.size() != 2)
    throw ShapeError("dense expects w [M,N], got " + shape_str(wn.shape));
  const int m = wn.shape[0], nin = wn.shape[1];
  if (xn.value.size() != nin)
    throw ShapeError("dense input size " + std::to_string(xn.value.size()) +
                     " does not match weight " + shape_str(wn.shape));
  if (bn.shape != std::vector<int>{m}) throw ShapeError("dense bias must be [M]");

  Node n;
  n.op = "dense";
  n.shape = {m};
  n.inputs = {x, w, b};
  n.needs_grad = xn.needs_grad || wn.needs_grad || bn.needs_grad;
  n.iaux = {nin, m};
  n.value.resize(m);
  dense_forward(xn.value.data(), nin, wn.value.data(), bn.value.data(), m,
                n.value.data());
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    Node& wn = g.at(self.inputs[1]);
    Node& bn = g.at(self.inputs[2]);
    dense_backward(self.grad.data(), xn.value.data(), wn.value.data(),
                   self.iaux[0], self.iaux[1],
                   wn.needs_grad ? wn.grad.data() : nullptr,
                   bn.needs_grad ? bn.grad.data() : nullptr,
                   xn.needs_grad ? xn.grad.data() : nullptr);
  };
  return push(std::move(n));
}

int Graph::relu(int x) {
  check_input(x);
  const Node& xn = nodes_[x];
  Node n;
  n.op = "relu";
  n.shape = xn.shape;
  n.inputs = {x};
  n.needs_grad = xn.needs_grad;
  n.value = xn.value.max(0.0);
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    if (xn.needs_grad)
      xn.grad += self.grad * (xn.value > 0.0).cast<double>();
  };
  return push(std::move(n));
}

int Graph::clamp(int x, double lo, double hi) {
  check_input(x);
  const Node& xn = nodes_[x];
  Node n;
  n.op = "clamp";
  n.shape = xn.shape;
  n.inputs = {x};
  n.needs_grad = xn.needs_grad;
  n.aux = {lo, hi};
  n.value = xn.value.max(lo).min(hi);
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    if (!xn.needs_grad) return;
    const double lo = self.aux[0], hi = self.aux[1];
    xn.grad += self.grad *
               ((xn.value >= lo) && (xn.value <= hi)).cast<double>();
  };
  return push(std::move(n));
}

int Graph::maxpool2(int x) {
  check_input(x);
  const Node& xn = nodes_[x];
  if (xn.shape.size() != 3 || xn.shape[1] % 2 || xn.shape[2] % 2)
    throw ShapeError("maxpool2 expects [C,H,W] with even H, W, got " +
                     shape_str(xn.shape));
  const int c = xn.shape[0], h = xn.shape[1], w = xn.shape[2];
  Node n;
  n.op = "maxpool2";
  n.shape = {c, h / 2, w / 2};
  n.inputs = {x};
  n.needs_grad = xn.needs_grad;
  n.iaux.assign(static_cast<std::size_t>(c) * (h / 2) * (w / 2) + 3, 0);
  n.iaux[0] = c;
  n.iaux[1] = h;
  n.iaux[2] = w;
  n.value.resize(static_cast<Eigen::Index>(c) * (h / 2) * (w / 2));
  maxpool2_forward(xn.value.data(), c, h, w, n.value.data(), n.iaux.data() + 3);
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    if (!xn.needs_grad) return;
    maxpool2_backward(self.grad.data(), self.iaux[0], self.iaux[1],
                      self.iaux[2], self.iaux.data() + 3, xn.grad.data());
  };
  return push(std::move(n));
}

int Graph::upsample2(int x) {
  check_input(x);
  const Node& xn = nodes_[x];
  if (xn.shape.size() != 3)
    throw ShapeError("upsample2 expects [C,H,W], got " + shape_str(xn.shape));
  const int c = xn.shape[0], h = xn.shape[1], w = xn.shape[2];
  Node n;
  n.op = "upsample2";
  n.shape = {c, 2 * h, 2 * w};
  n.inputs = {x};
  n.needs_grad = xn.needs_grad;
  n.iaux = {c, h, w};
  n.value.resize(static_cast<Eigen::Index>(c) * 4 * h * w);
  upsample2_forward(xn.value.data(), c, h, w, n.value.data());
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    if (!xn.needs_grad) return;
    upsample2_backward(self.grad.data(), self.iaux[0], self.iaux[1],
                       self.iaux[2], xn.grad.data());
  };
  return push(std::move(n));
}

int Graph::reshape(int x, std::vector<int> shape) {
  check_input(x);
  const Node& xn = nodes_[x];
  if (shape_size(shape) != xn.value.size())
    throw ShapeError("reshape to " + shape_str(shape) + " changes element count");
  Node n;
  n.op = "reshape";
  n.shape = std::move(shape);
  n.inputs = {x};
  n.needs_grad = xn.needs_grad;
  n.value = xn.value;
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    if (xn.needs_grad) xn.grad += self.grad;
  };
  return push(std::move(n));
}

int Graph::add(int a, int b) {
  check_input(a);
  check_input(b);
  const Node& an = nodes_[a];
  const Node& bn = nodes_[b];
  if (an.value.size() != bn.value.size())
    throw ShapeError("add operands disagree on size");
  Node n;
  n.op = "add";
  n.shape = an.shape;
  n.inputs = {a, b};
  n.needs_grad = an.needs_grad || bn.needs_grad;
  n.value = an.value + bn.value;
  n.back = [](Graph& g, Node& self) {
    for (int i : self.inputs) {
      Node& in = g.at(i);
      if (in.needs_grad) in.grad += self.grad;
    }
  };
  return push(std::move(n));
}

int Graph::mul(int a, int b) {
  check_input(a);
  check_input(b);
  const Node& an = nodes_[a];
  const Node& bn = nodes_[b];
  if (an.value.size() != bn.value.size())
    throw ShapeError("mul operands disagree on size");
  Node n;
  n.op = "mul";
  n.shape = an.shape;
  n.inputs = {a, b};
  n.needs_grad = an.needs_grad || bn.needs_grad;
  n.value = an.value * bn.value;
  n.back = [](Graph& g, Node& self) {
    Node& an = g.at(self.inputs[0]);
    Node& bn = g.at(self.inputs[1]);
    if (an.needs_grad) an.grad += self.grad * bn.value;
    if (bn.needs_grad) bn.grad += self.grad * an.value;
  };
  return push(std::move(n));
}

int Graph::scale(int x, double s) {
  check_input(x);
  const Node& xn = nodes_[x];
  Node n;
  n.op = "scale";
  n.shape = xn.shape;
  n.inputs = {x};
  n.needs_grad = xn.needs_grad;
  n.aux = {s};
  n.value = xn.value * s;
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    if (xn.needs_grad) xn.grad += self.grad * self.aux[0];
  };
  return push(std::move(n));
}

int Graph::sum(int x) {
  check_input(x);
  const Node& xn = nodes_[x];
  Node n;
  n.op = "sum";
  n.shape = {1};
  n.inputs = {x};
  n.needs_grad = xn.needs_grad;
  n.value.resize(1);
  n.value[0] = xn.value.sum();
  n.back = [](Graph& g, Node& self) {
    Node& xn = g.at(self.inputs[0]);
    if (xn.needs_grad) xn.grad += self.grad[0];
  };
  return push(std::move(n));
}

int Graph::mse(int pred, const double* target) {
  check_input(pred);
  const Node& pn = nodes_[pred];
  Node n;
  n.op = "mse";
  n.shape = {1};
  n.inputs = {pred};
  n.needs_grad = pn.needs_grad;
  n.aux.assign(target, target + pn.value.size());
  n.value.resize(1);
  n.value[0] =
      (pn.value - as_array(n.aux.data(), pn.value.size())).square().mean();
  n.back = [](Graph& g, Node& self) {
    Node& pn = g.at(self.inputs[0]);
    if (!pn.needs_grad) return;
    const Eigen::Index m = pn.value.size();
    pn.grad += self.grad[0] * (2.0 / static_cast<double>(m)) *
               (pn.value - as_array(self.aux.data(), m));
  };
  return push(std::move(n));
}

int Graph::gaussian_kl(int mu, int logvar) {
  check_input(mu);
  check_input(logvar);
  const Node& mn = nodes_[mu];
  const Node& ln = nodes_[logvar];
  if (mn.value.size() != ln.value.size())
    throw ShapeError("gaussian_kl operands disagree on size");
  Node n;
  n.op = "gaussian_kl";
  n.shape = {1};
  n.inputs = {mu, logvar};
  n.needs_grad = mn.needs_grad || ln.needs_grad;
  n.value.resize(1);
  n.value[0] =
      0.5 * (ln.value.exp() + mn.value.square() - 1.0 - ln.value).sum();
  n.back = [](Graph& g, Node& self) {
    Node& mn = g.at(self.inputs[0]);
    Node& ln = g.at(self.inputs[1]);
    if (mn.needs_grad) mn.grad += self.grad[0] * mn.value;
    if (ln.needs_grad) ln.grad += self.grad[0] * 0.5 * (ln.value.exp() - 1.0);
  };
  return push(std::move(n));
}

int Graph::reparameterize(int mu, int logvar, const double* eps) {
  check_input(mu);
  check_input(logvar);
  const Node& mn = nodes_[mu];
  const Node& ln = nodes_[logvar];
  if (mn.value.size() != ln.value.size())
    throw ShapeError("reparameterize operands disagree on size");
  Node n;
  n.op = "reparameterize";
  n.shape = mn.shape;
  n.inputs = {mu, logvar};
  n.needs_grad = mn.needs_grad || ln.needs_grad;
  n.aux.assign(eps, eps + mn.value.size());
  n.value = mn.value +
            (0.5 * ln.value).exp() * as_array(n.aux.data(), mn.value.size());
  n.back = [](Graph& g, Node& self) {
    Node& mn = g.at(self.inputs[0]);
    Node& ln = g.at(self.inputs[1]);
    if (mn.needs_grad) mn.grad += self.grad;
    if (ln.needs_grad)
      ln.grad += self.grad * 0.5 * (0.5 * ln.value).exp() *
                 as_array(self.aux.data(), ln.value.size());
  };
  return push(std::move(n));
}

void Graph::backward(int root) {
  check_input(root);
  if (nodes_[root].value.size() != 1)
    throw ShapeError("backward root must be a scalar node");
  if (!nodes_[root].needs_grad) return;
  for (int i = 0; i <= root; ++i) {
    Node& n = nodes_[i];
    for (int in : n.inputs)
      if (in >= i)
        throw ShapeError("graph is not a DAG: node consumes a later node");
    if (n.needs_grad) {
      n.grad.resize(n.value.size());
      n.grad.setZero();
    }
  }
  nodes_[root].grad[0] = 1.0;
  for (int i = root; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.needs_grad && n.back) n.back(*this, n);
  }
  for (int i = 0; i <= root; ++i) {
    Node& n = nodes_[i];
    if (n.bound && n.needs_grad) {
      n.bound->ensure_grad();
      n.bound->grad += n.grad;
    }
  }
}

}  // namespace qgvae::nn
