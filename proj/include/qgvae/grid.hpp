#pragma once

#include <Eigen/Dense>
#include <array>

namespace qgvae {

/// One stored sample: streamfunction of both layers on the (ny, nx) grid,
/// element (y, x). Stored in 32-bit floats, matching the on-disk format;
/// the solver quantizes on capture.
struct GridSnapshot {
  std::array<Eigen::ArrayXXf, 2> psi;
  double time = 0.0;

  int ny() const { return static_cast<int>(psi[0].rows()); }
  int nx() const { return static_cast<int>(psi[0].cols()); }
  bool all_finite() const {
    return psi[0].allFinite() && psi[1].allFinite();
  }
};

}  // namespace qgvae
