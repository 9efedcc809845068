#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "qgvae/data/dataset.hpp"
#include "qgvae/qg/params.hpp"
#include "qgvae/qg/spectral.hpp"

namespace qgvae::qg {

using LayerPair = std::array<SpecField, 2>;

/// Spectral potential-vorticity anomaly of both layers (the beta*y
/// background is never stored) at one time level.
struct SpectralState {
  LayerPair q_hat;
  double time = 0.0;
};

/// Precomputed operators for one parameter set: transforms, PV inversion
/// factors, relaxation target, sponge profile, hyperdiffusion factors.
///
/// Owns FFT scratch space; use one instance per thread.
class QgModel {
 public:
  explicit QgModel(const QgParams& params);

  const QgParams& params() const { return params_; }
  SpectralTransform& transform() { return tf_; }
  const SpectralTransform& transform() const { return tf_; }

  /// Relaxation target on the kx = 0 line.
  const Eigen::ArrayXcd& psi_r_hat() const { return psi_r_hat_; }
  /// Sponge damping rate r(y).
  const Eigen::ArrayXd& sponge_profile() const { return sponge_; }
  /// exp(-nu k^8 dt) and its square, for the integrating-factor step.
  const Eigen::ArrayXXd& hyper_factor() const { return e1_; }
  const Eigen::ArrayXXd& hyper_factor2() const { return e2_; }
  const Eigen::ArrayXXd& k8() const { return k8_; }

 private:
  QgParams params_;
  SpectralTransform tf_;
  Eigen::ArrayXcd psi_r_hat_;
  Eigen::ArrayXd sponge_;
  Eigen::ArrayXXd e1_, e2_, k8_;
  Eigen::ArrayXXd inv_det_, kp1_inv_det_;  // PV-inversion factors
  friend LayerPair invert_pv(const LayerPair&, const QgModel&);
};

/// psi_R(y) = -sigma tanh(y/sigma), mean removed; jet core at y = 0.
Eigen::ArrayXd equilibrium_profile(const QgParams& params);

/// Sponge rate profile r(y): 0 in the interior, cosine-squared ramp to
/// max_rate over width_fraction*ly at each boundary.
Eigen::ArrayXd sponge_profile(const QgParams& params);

/// q_j = -k^2 psi_j + (-1)^j (psi_1 - psi_2), per retained wavenumber.
LayerPair pv_from_streamfunction(const LayerPair& psi_hat, const QgModel& m);

/// Solves the coupled 2x2 inversion per wavenumber; k = 0 gauged to zero.
LayerPair invert_pv(const LayerPair& q_hat, const QgModel& m);

/// Pseudo-spectral J(a,b) = a_x b_y - a_y b_x with the 2/3-rule mask
/// applied to the result.
SpecField jacobian(const SpecField& a_hat, const SpecField& b_hat, QgModel& m);

/// Full tendency dq/dt including hyperdiffusion (diagnostic form).
LayerPair tendency(const SpectralState& state, QgModel& m);

/// Tendency without the hyperdiffusion term; the integrator folds that in
/// exactly through the integrating factor.
LayerPair tendency_no_hyper(const SpectralState& state, QgModel& m);

/// Leapfrog step with integrating-factor hyperdiffusion. Applies the
/// Robert-Asselin filter to curr (the interior level) in place.
SpectralState step_leapfrog(const SpectralState& prev, SpectralState& curr,
                            QgModel& m);

/// Forward-Euler start used for the first step after initialization.
SpectralState step_euler(const SpectralState& state, QgModel& m);

/// Domain-mean total energy: 0.5<|grad psi_1|^2 + |grad psi_2|^2 +
/// (psi_1-psi_2)^2>, evaluated spectrally.
double total_energy(const SpectralState& state, const QgModel& m);

/// Initial condition: psi_1 = psi_R + noise, psi_2 = noise, amplitude 1e-3,
/// band-limited, converted to PV.
SpectralState initial_state(QgModel& m, std::uint64_t seed);

/// Convert the current PV state to a stored snapshot (psi on the grid,
/// float32, (ny, nx) orientation).
GridSnapshot snapshot_from_state(const SpectralState& state, QgModel& m);

/// Integrates spinup then record phases, invoking on_sample for every
/// recorded snapshot. Memory stays O(grid). Throws NumericalError with the
/// elapsed time on blow-up.
void run_with_callback(const QgParams& params, std::uint64_t seed,
                       int spinup_days, int record_days, int sample_every,
                       const std::function<void(const GridSnapshot&)>& on_sample);

/// Convenience wrapper materializing a Dataset with provenance header.
data::Dataset run_simulation(const QgParams& params, std::uint64_t seed,
                             int spinup_days, int record_days,
                             int sample_every,
                             data::SystemTag tag = data::SystemTag::perfect,
                             std::uint32_t ensemble_id = 0);

}  // namespace qgvae::qg
