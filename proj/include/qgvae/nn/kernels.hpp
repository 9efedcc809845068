#pragma once

#include <vector>

namespace qgvae::nn {

// All buffers are flat row-major [C][H][W]. Convolutions produce same-size
// output; the H (meridional) axis is zero-padded, the W (zonal) axis wraps
// periodically. Kernel extents must be odd.

// cols has shape (C*KH*KW) x (H*W), column-major; column p lists the input
// window centered on output pixel p in (c, kh, kw) order.
void im2col(const double* x, int c, int h, int w, int kh, int kw, double* cols);

// Transpose of im2col: scatter-adds cols back onto dx (dx not cleared here).
void col2im_accumulate(const double* cols, int c, int h, int w, int kh, int kw,
                       double* dx);

// y[f][i][j] = bias[f] + sum over (c,kh,kw) windows; wgt is [F][C][KH][KW].
// cols must hold (c*kh*kw)*(h*w) doubles of scratch and receives the im2col
// matrix, which conv2d_backward reuses.
void conv2d_forward(const double* x, int c, int h, int w, const double* wgt,
                    const double* bias, int f, int kh, int kw, double* y,
                    double* cols);

// Accumulates into dwgt/dbias/dx; any of the three may be null to skip it.
// cols must be the matrix produced by the matching forward call.
void conv2d_backward(const double* dy, const double* x, const double* wgt,
                     const double* cols, int c, int h, int w, int f, int kh,
                     int kw, double* dwgt, double* dbias, double* dx);

// y = W x + b with W row-major [M][N].
void dense_forward(const double* x, int n, const double* wgt,
                   const double* bias, int m, double* y);
void dense_backward(const double* dy, const double* x, const double* wgt,
                    int n, int m, double* dwgt, double* dbias, double* dx);

// 2x2 max pooling, stride 2; h and w must be even. argmax (nullable) stores
// the flat input index of each output's winner (first occurrence on ties).
void maxpool2_forward(const double* x, int c, int h, int w, double* y,
                      int* argmax);
void maxpool2_backward(const double* dy, int c, int h, int w,
                       const int* argmax, double* dx);

// Nearest-neighbour 2x upsampling: y[c][i][j] = x[c][i/2][j/2].
void upsample2_forward(const double* x, int c, int h, int w, double* y);
void upsample2_backward(const double* dy, int c, int h, int w, double* dx);

}  // namespace qgvae::nn
