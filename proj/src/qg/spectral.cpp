#include "qgvae/qg/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

#include "qgvae/common.hpp"

namespace qgvae::qg {

struct SpectralTransform::Impl {
  Eigen::FFT<double> fft_x;  // real<->half-spectrum along x
  Eigen::FFT<double> fft_y;  // complex<->complex along y
  std::vector<double> rline;
  std::vector<std::complex<double>> cline, yline, yout;
};

SpectralTransform::SpectralTransform(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), nx_r_(nx / 2 + 1), lx_(lx), ly_(ly),
      impl_(std::make_shared<Impl>()) {
  impl_->fft_x.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  impl_->fft_x.SetFlag(Eigen::FFT<double>::Unscaled);
  impl_->fft_y.SetFlag(Eigen::FFT<double>::Unscaled);
  impl_->rline.resize(nx_);
  impl_->cline.resize(nx_r_);
  impl_->yline.resize(ny_);
  impl_->yout.resize(ny_);

  const double two_pi = 2.0 * M_PI;
  kx_.resize(nx_r_);
  for (int k = 0; k < nx_r_; ++k) kx_[k] = two_pi * k / lx_;
  ky_.resize(ny_);
  for (int j = 0; j < ny_; ++j) {
    int jj = (j <= ny_ / 2) ? j : j - ny_;
    ky_[j] = two_pi * jj / ly_;
  }
  kx_deriv_ = kx_;
  kx_deriv_[nx_ / 2] = 0.0;
  ky_deriv_ = ky_;
  ky_deriv_[ny_ / 2] = 0.0;

  k2_.resize(nx_r_, ny_);
  mask_.resize(nx_r_, ny_);
  weights_.resize(nx_r_, ny_);
  for (int j = 0; j < ny_; ++j) {
    int jy = (j <= ny_ / 2) ? j : ny_ - j;
    for (int k = 0; k < nx_r_; ++k) {
      k2_(k, j) = kx_[k] * kx_[k] + ky_[j] * ky_[j];
      // Retain strictly below the elliptic 2/3 boundary so quadratic
      // aliases always land on truncated modes.
      double rx = 3.0 * k / nx_;
      double ry = 3.0 * jy / ny_;
      mask_(k, j) = (rx * rx + ry * ry < 1.0) ? 1.0 : 0.0;
      weights_(k, j) = (k == 0 || k == nx_ / 2) ? 1.0 : 2.0;
    }
  }
}

SpecField SpectralTransform::forward(const GridField& g) {
  if (g.rows() != nx_ || g.cols() != ny_)
    throw ShapeError("SpectralTransform::forward: grid shape mismatch");
  Impl& im = *impl_;
  SpecField s(nx_r_, ny_);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) im.rline[i] = g(i, j);
    im.fft_x.fwd(im.cline, im.rline);
    for (int k = 0; k < nx_r_; ++k) s(k, j) = im.cline[k];
  }
  for (int k = 0; k < nx_r_; ++k) {
    for (int j = 0; j < ny_; ++j) im.yline[j] = s(k, j);
    im.fft_y.fwd(im.yout, im.yline);
    for (int j = 0; j < ny_; ++j) s(k, j) = im.yout[j];
  }
  s *= 1.0 / (static_cast<double>(nx_) * ny_);
  return s;
}

GridField SpectralTransform::inverse(const SpecField& s) {
  if (s.rows() != nx_r_ || s.cols() != ny_)
    throw ShapeError("SpectralTransform::inverse: spectrum shape mismatch");
  Impl& im = *impl_;
  SpecField tmp(nx_r_, ny_);
  for (int k = 0; k < nx_r_; ++k) {
    for (int j = 0; j < ny_; ++j) im.yline[j] = s(k, j);
    im.fft_y.inv(im.yout, im.yline);
    for (int j = 0; j < ny_; ++j) tmp(k, j) = im.yout[j];
  }
  GridField g(nx_, ny_);
  for (int j = 0; j < ny_; ++j) {
    for (int k = 0; k < nx_r_; ++k) im.cline[k] = tmp(k, j);
    im.fft_x.inv(im.rline, im.cline, nx_);
    for (int i = 0; i < nx_; ++i) g(i, j) = im.rline[i];
  }
  return g;
}

SpecField SpectralTransform::deriv_x(const SpecField& s) const {
  SpecField out(nx_r_, ny_);
  const std::complex<double> iu(0.0, 1.0);
  for (int j = 0; j < ny_; ++j)
    for (int k = 0; k < nx_r_; ++k) out(k, j) = iu * kx_deriv_[k] * s(k, j);
  return out;
}

SpecField SpectralTransform::deriv_y(const SpecField& s) const {
  SpecField out(nx_r_, ny_);
  const std::complex<double> iu(0.0, 1.0);
  for (int j = 0; j < ny_; ++j)
    for (int k = 0; k < nx_r_; ++k) out(k, j) = iu * ky_deriv_[j] * s(k, j);
  return out;
}

double SpectralTransform::parseval_product(const SpecField& a,
                                           const SpecField& b) const {
  double acc = 0.0;
  for (int j = 0; j < ny_; ++j)
    for (int k = 0; k < nx_r_; ++k)
      acc += weights_(k, j) * (a(k, j) * std::conj(b(k, j))).real();
  return acc;
}

double SpectralTransform::conjugate_symmetry_error(const SpecField& s) {
  const int nxr = static_cast<int>(s.rows());
  const int ny = static_cast<int>(s.cols());
  const int nx = 2 * (nxr - 1);
  double err = 0.0;
  for (int k : {0, nx / 2}) {
    for (int j = 0; j < ny; ++j) {
      int jm = (ny - j) % ny;
      err = std::max(err, std::abs(s(k, j) - std::conj(s(k, jm))));
    }
  }
  return err;
}

}  // namespace qgvae::qg
