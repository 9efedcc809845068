#pragma once

#include "qgvae/eval/metrics.hpp"
#include "qgvae/forecast/rollout.hpp"

namespace qgvae::forecast {

// Long autoregressive rollout keeping only streaming statistics (O(grid)
// memory). Five prediction intervals make one day. A non-finite step records
// the blow-up day in the accumulator and stops the run. lx/ly set the domain
// lengths used for the spectral velocity diagnostic.
eval::ClimateAccumulator climate_run(const model::ModelWeights& w,
                                     const GridSnapshot& ic, int n_days,
                                     const ForecastConfig& cfg, double lx,
                                     double ly);

// Reference climatology of the solver itself, streamed sample by sample so
// arbitrarily long runs need no trajectory storage.
eval::ClimateAccumulator climate_truth(const qg::QgParams& params,
                                       std::uint64_t seed, double spinup_days,
                                       double record_days, int sample_every);

}  // namespace qgvae::forecast
