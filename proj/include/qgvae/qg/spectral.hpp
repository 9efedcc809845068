#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

namespace qgvae::qg {

/// Real-space field on the (nx, ny) grid; element (i, j) = f(x_i, y_j).
/// Column-major storage keeps x-lines contiguous for the x transforms.
using GridField = Eigen::ArrayXXd;

/// Half-spectrum coefficients, shape (nx/2+1, ny); row k is the zonal
/// wavenumber index, column j the (signed, wrapped) meridional index.
/// Values use the amplitude convention: coefficient = DFT sum / (nx*ny).
using SpecField = Eigen::ArrayXXcd;

/// 2D real<->complex Fourier transforms plus the wavenumber bookkeeping
/// shared by every spectral operator.
///
/// Not thread-safe: holds scratch buffers. Use one instance per thread.
class SpectralTransform {
 public:
  SpectralTransform(int nx, int ny, double lx, double ly);

  SpecField forward(const GridField& g);
  GridField inverse(const SpecField& s);

  /// d/dx and d/dy as spectral multiplies. Nyquist rows/columns map to zero
  /// so derivatives of real fields stay real.
  SpecField deriv_x(const SpecField& s) const;
  SpecField deriv_y(const SpecField& s) const;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nx_r() const { return nx_r_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }

  /// Physical wavenumbers; kx has nx/2+1 entries, ky has ny (signed).
  const Eigen::ArrayXd& kx() const { return kx_; }
  const Eigen::ArrayXd& ky() const { return ky_; }
  /// kx^2 + ky^2 on the half-spectrum layout.
  const Eigen::ArrayXXd& k2() const { return k2_; }
  /// Elliptic 2/3-rule mask (1 retained, 0 truncated), Nyquist excluded.
  const Eigen::ArrayXXd& dealias_mask() const { return mask_; }
  /// Parseval weights: 1 on the kx = 0 and Nyquist rows, 2 elsewhere.
  const Eigen::ArrayXXd& conj_weights() const { return weights_; }

  /// Domain mean of a*b computed spectrally (Parseval).
  double parseval_product(const SpecField& a, const SpecField& b) const;

  /// Max deviation from the conjugate symmetry a real field requires of the
  /// kx = 0 and kx = Nyquist rows. Diagnostic, used by tests.
  static double conjugate_symmetry_error(const SpecField& s);

 private:
  int nx_, ny_, nx_r_;
  double lx_, ly_;
  Eigen::ArrayXd kx_, ky_, kx_deriv_, ky_deriv_;
  Eigen::ArrayXXd k2_, mask_, weights_;
  // kissfft plans and scratch lines
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace qgvae::qg
