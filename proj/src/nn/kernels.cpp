#include "qgvae/nn/kernels.hpp"

#include <Eigen/Dense>

namespace qgvae::nn {

namespace {
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRow = Eigen::Map<RowMat>;
using CMapRow = Eigen::Map<const RowMat>;
using MapCol = Eigen::Map<Eigen::MatrixXd>;
using CMapCol = Eigen::Map<const Eigen::MatrixXd>;
}  // namespace

void im2col(const double* x, int c, int h, int w, int kh, int kw,
            double* cols) {
  const int hw = h * w;
  const int k = c * kh * kw;
  const int oh = kh / 2, ow = kw / 2;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      double* col = cols + static_cast<std::ptrdiff_t>(i * w + j) * k;
      for (int ch = 0; ch < c; ++ch) {
        const double* plane = x + static_cast<std::ptrdiff_t>(ch) * hw;
        for (int di = 0; di < kh; ++di) {
          const int ii = i + di - oh;
          if (ii < 0 || ii >= h) {
            for (int dj = 0; dj < kw; ++dj) *col++ = 0.0;
            continue;
          }
          const double* row = plane + static_cast<std::ptrdiff_t>(ii) * w;
          for (int dj = 0; dj < kw; ++dj) {
            int jj = j + dj - ow;
            jj += (jj < 0) ? w : (jj >= w ? -w : 0);
            *col++ = row[jj];
          }
        }
      }
    }
}

void col2im_accumulate(const double* cols, int c, int h, int w, int kh, int kw,
                       double* dx) {
  const int hw = h * w;
  const int k = c * kh * kw;
  const int oh = kh / 2, ow = kw / 2;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const double* col = cols + static_cast<std::ptrdiff_t>(i * w + j) * k;
      for (int ch = 0; ch < c; ++ch) {
        double* plane = dx + static_cast<std::ptrdiff_t>(ch) * hw;
        for (int di = 0; di < kh; ++di) {
          const int ii = i + di - oh;
          if (ii < 0 || ii >= h) {
            col += kw;
            continue;
          }
          double* row = plane + static_cast<std::ptrdiff_t>(ii) * w;
          for (int dj = 0; dj < kw; ++dj) {
            int jj = j + dj - ow;
            jj += (jj < 0) ? w : (jj >= w ? -w : 0);
            row[jj] += *col++;
          }
        }
      }
    }
}

void conv2d_forward(const double* x, int c, int h, int w, const double* wgt,
                    const double* bias, int f, int kh, int kw, double* y,
                    double* cols) {
  const int hw = h * w;
  const int k = c * kh * kw;
  im2col(x, c, h, w, kh, kw, cols);
  CMapRow wm(wgt, f, k);
  CMapCol m(cols, k, hw);
  MapRow ym(y, f, hw);
  ym.noalias() = wm * m;
  for (int fi = 0; fi < f; ++fi) ym.row(fi).array() += bias[fi];
}

void conv2d_backward(const double* dy, const double* /*x*/, const double* wgt,
                     const double* cols, int c, int h, int w, int f, int kh,
                     int kw, double* dwgt, double* dbias, double* dx) {
  const int hw = h * w;
  const int k = c * kh * kw;
  CMapRow dym(dy, f, hw);
  if (dwgt) {
    CMapCol m(cols, k, hw);
    MapRow dwm(dwgt, f, k);
    dwm.noalias() += dym * m.transpose();
  }
  if (dbias)
    for (int fi = 0; fi < f; ++fi) dbias[fi] += dym.row(fi).sum();
  if (dx) {
    CMapRow wm(wgt, f, k);
    Eigen::MatrixXd dm(k, hw);
    dm.noalias() = wm.transpose() * dym;
    col2im_accumulate(dm.data(), c, h, w, kh, kw, dx);
  }
}

void dense_forward(const double* x, int n, const double* wgt,
                   const double* bias, int m, double* y) {
  CMapRow wm(wgt, m, n);
  Eigen::Map<const Eigen::VectorXd> xv(x, n);
  Eigen::Map<Eigen::VectorXd> yv(y, m);
  yv.noalias() = wm * xv;
  yv += Eigen::Map<const Eigen::VectorXd>(bias, m);
}

void dense_backward(const double* dy, const double* x, const double* wgt,
                    int n, int m, double* dwgt, double* dbias, double* dx) {
  Eigen::Map<const Eigen::VectorXd> dyv(dy, m);
  if (dwgt) {
    MapRow dwm(dwgt, m, n);
    dwm.noalias() += dyv * Eigen::Map<const Eigen::VectorXd>(x, n).transpose();
  }
  if (dbias) Eigen::Map<Eigen::VectorXd>(dbias, m) += dyv;
  if (dx) {
    CMapRow wm(wgt, m, n);
    Eigen::Map<Eigen::VectorXd>(dx, n).noalias() += wm.transpose() * dyv;
  }
}

void maxpool2_forward(const double* x, int c, int h, int w, double* y,
                      int* argmax) {
  const int oh = h / 2, ow = w / 2;
  for (int ch = 0; ch < c; ++ch) {
    const double* plane = x + static_cast<std::ptrdiff_t>(ch) * h * w;
    for (int i = 0; i < oh; ++i)
      for (int j = 0; j < ow; ++j) {
        int best = (2 * i) * w + 2 * j;
        double v = plane[best];
        const int cand[3] = {(2 * i) * w + 2 * j + 1, (2 * i + 1) * w + 2 * j,
                             (2 * i + 1) * w + 2 * j + 1};
        for (int idx : cand)
          if (plane[idx] > v) {
            v = plane[idx];
            best = idx;
          }
        *y++ = v;
        if (argmax) *argmax++ = ch * h * w + best;
      }
  }
}

void maxpool2_backward(const double* dy, int c, int h, int w,
                       const int* argmax, double* dx) {
  const int n = c * (h / 2) * (w / 2);
  for (int p = 0; p < n; ++p) dx[argmax[p]] += dy[p];
}

void upsample2_forward(const double* x, int c, int h, int w, double* y) {
  const int oh = 2 * h, ow = 2 * w;
  for (int ch = 0; ch < c; ++ch) {
    const double* plane = x + static_cast<std::ptrdiff_t>(ch) * h * w;
    double* out = y + static_cast<std::ptrdiff_t>(ch) * oh * ow;
    for (int i = 0; i < oh; ++i) {
      const double* row = plane + (i / 2) * w;
      for (int j = 0; j < ow; ++j) *out++ = row[j / 2];
    }
  }
}

void upsample2_backward(const double* dy, int c, int h, int w, double* dx) {
  const int oh = 2 * h, ow = 2 * w;
  for (int ch = 0; ch < c; ++ch) {
    const double* dout = dy + static_cast<std::ptrdiff_t>(ch) * oh * ow;
    double* plane = dx + static_cast<std::ptrdiff_t>(ch) * h * w;
    for (int i = 0; i < oh; ++i) {
      const double* drow = dout + static_cast<std::ptrdiff_t>(i) * ow;
      double* row = plane + (i / 2) * w;
      for (int j = 0; j < ow; ++j) row[j / 2] += drow[j];
    }
  }
}

}  // namespace qgvae::nn
