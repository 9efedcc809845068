#pragma once

#include <cstdint>

namespace qgvae::qg {

/// Boundary damping bands for the periodic-in-y channel.
struct SpongeConfig {
  double width_fraction = 0.1;  ///< fraction of ly occupied by each band
  double max_rate = 0.5;        ///< peak damping rate (inverse time)
  // profile: cosine-squared ramp, 0 in the interior rising to max_rate at
  // the y boundaries. Kept as an identifier so files stay self-describing.
  std::uint32_t profile = 0;
};

/// Physical and numerical parameters of the two-layer QG channel.
///
/// Axis convention: nx modes span x over length lx (zonal, periodic),
/// ny modes span y over width ly (meridional, periodic + sponges).
struct QgParams {
  double beta = 0.19;   ///< planetary-vorticity gradient
  double sigma = 3.5;   ///< jet width
  double tau_d = 100.0; ///< Newtonian relaxation time (+inf disables)
  double tau_f = 15.0;  ///< Rayleigh friction time, lower layer (+inf disables)
  double nu = -1.0;     ///< hyperdiffusion coefficient; < 0 means "derive from grid"
  double lx = 46.0;
  double ly = 68.0;
  int nx = 96;
  int ny = 192;
  double dt_n = 0.025;  ///< leapfrog time step
  SpongeConfig sponge;
  double ra_coeff = 0.02;  ///< Robert-Asselin filter coefficient

  /// Time-unit bookkeeping: 1 Earth day = 5 advective time units.
  double day_units() const { return 5.0; }
  int steps_per_day() const;

  int nx_r() const { return nx / 2 + 1; }
};

/// Default configuration with nu resolved for the default grid.
QgParams default_params();

/// Hyperdiffusion coefficient such that the damping rate at the largest
/// retained wavenumber equals 1/(10 dt_n).
double auto_hyperdiffusion(int nx, int ny, double lx, double ly, double dt_n);

/// Validates invariants; resolves nu < 0 to auto_hyperdiffusion.
/// Throws ConfigError with the offending field named.
QgParams validated(QgParams p);

/// Biased copy of the system: beta tripled, jet width reduced to 4/5.
QgParams make_imperfect(const QgParams& p);
QgParams make_imperfect(const QgParams& p, double beta_factor,
                        double sigma_factor);

}  // namespace qgvae::qg
