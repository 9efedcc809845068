#include "qgvae/qg/params.hpp"

#include <cmath>
#include <string>

#include "qgvae/common.hpp"

namespace qgvae::qg {

int QgParams::steps_per_day() const {
  return static_cast<int>(std::lround(day_units() / dt_n));
}

double auto_hyperdiffusion(int nx, int ny, double lx, double ly, double dt_n) {
  // Largest wavenumber surviving the 2/3 truncation, per direction, then the
  // corner of the retained elliptic band.
  const double two_pi = 2.0 * M_PI;
  double kx_max = two_pi * std::floor((nx - 1) / 3.0) / lx;
  double ky_max = two_pi * std::floor((ny - 1) / 3.0) / ly;
  double k2_max = std::max(kx_max * kx_max, ky_max * ky_max);
  double k8 = k2_max * k2_max * k2_max * k2_max;
  return 1.0 / (10.0 * dt_n * k8);
}

QgParams default_params() { return validated(QgParams{}); }

QgParams validated(QgParams p) {
  auto fail = [](const std::string& what) {
    throw ConfigError("invalid solver parameter: " + what);
  };
  if (!(p.beta > 0)) fail("beta must be > 0");
  if (!(p.sigma > 0)) fail("sigma must be > 0");
  if (!(p.tau_d > 0)) fail("tau_d must be > 0");
  if (!(p.tau_f > 0)) fail("tau_f must be > 0");
  if (!(p.dt_n > 0)) fail("dt_n must be > 0");
  if (!(p.lx > 0) || !(p.ly > 0)) fail("lx, ly must be > 0");
  if (p.nx < 8 || p.nx % 2 != 0) fail("nx must be even and >= 8");
  if (p.ny < 8 || p.ny % 2 != 0) fail("ny must be even and >= 8");
  if (!(p.sponge.width_fraction > 0) || !(p.sponge.width_fraction < 0.25))
    fail("sponge width_fraction must lie in (0, 0.25)");
  if (p.sponge.max_rate < 0) fail("sponge max_rate must be >= 0");
  if (p.ra_coeff < 0) fail("ra_coeff must be >= 0");
  if (p.nu < 0) p.nu = auto_hyperdiffusion(p.nx, p.ny, p.lx, p.ly, p.dt_n);
  return p;
}

QgParams make_imperfect(const QgParams& p) {
  return make_imperfect(p, 3.0, 0.8);
}

QgParams make_imperfect(const QgParams& p, double beta_factor,
                        double sigma_factor) {
  QgParams out = p;
  out.beta = beta_factor * p.beta;
  out.sigma = sigma_factor * p.sigma;
  return out;
}

}  // namespace qgvae::qg
