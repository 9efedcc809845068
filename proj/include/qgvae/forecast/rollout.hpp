#pragma once

#include <cstdint>
#include <vector>

#include "qgvae/data/dataset.hpp"
#include "qgvae/grid.hpp"
#include "qgvae/model/vae.hpp"
#include "qgvae/qg/solver.hpp"

namespace qgvae::forecast {

struct ForecastConfig {
  int n_members = 100;
  int n_steps = 50;          // leads, one prediction interval each
  double eta = 0.0;          // initial-condition noise fraction
  std::uint64_t seed = 1;
  bool latent_noise = true;  // false: z = mu for every member
  double dt_sample = 1.0;    // nondimensional time per lead (40 solver steps)
  enum class Feedback { ensemble_mean } feedback = Feedback::ensemble_mean;
};

struct ForecastResult {
  std::vector<GridSnapshot> mean_trajectory;
  // [step][member]; populated only when n_steps <= 50.
  std::vector<std::vector<GridSnapshot>> member_snapshots;
  std::vector<GridSnapshot> spread;  // per-step ensemble std field
  GridSnapshot init_condition;
  int first_failure_step = -1;  // 1-based lead that went non-finite; -1 = none
};

GridSnapshot make_noisy_ic(const GridSnapshot& truth, double eta,
                           const data::NormStats& stats, std::uint64_t seed);

// Stochastic rollout: encode the current normalized state once per step,
// decode n_members latent draws, feed the normalized ensemble mean back.
// The mean is accumulated in sorted per-point order, so it is invariant to
// member relabeling bit for bit. Non-finite steps truncate the rollout.
ForecastResult rollout_vae(const model::ModelWeights& w, const GridSnapshot& ic,
                           const ForecastConfig& cfg);

// Single mean-path trajectory (z = mu). Accepts deterministic weights or, for
// mean-path comparisons, VAE weights.
ForecastResult rollout_deterministic(const model::ModelWeights& w,
                                     const GridSnapshot& ic,
                                     const ForecastConfig& cfg);

// Projects psi to spectral potential vorticity and integrates the solver for
// n_steps * 40 leapfrog steps, recording every 40. Solver blow-ups propagate.
ForecastResult rollout_numerical(const qg::QgParams& params,
                                 const GridSnapshot& ic, int n_steps);

}  // namespace qgvae::forecast
