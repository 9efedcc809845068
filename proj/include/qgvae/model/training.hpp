#pragma once

#include <string>
#include <vector>

#include "qgvae/model/vae.hpp"

namespace qgvae::model {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double lr = 1e-4;
  std::uint64_t seed = 7;
  double val_fraction = 0.1;   // last floor(fraction * pairs) pairs held out
  std::string progress_csv;    // written per epoch when nonempty
};

struct EpochStats {
  int epoch;        // 1-based
  double train_loss;
  double val_loss;
  double recon;     // training-epoch mean reconstruction term
  double kl;        // training-epoch mean KL term (0 for deterministic)
};

struct TrainResult {
  ModelWeights weights;          // best-validation snapshot
  std::vector<EpochStats> epochs;
  int best_epoch = -1;           // 1-based; -1 when epochs == 0
};

// Fresh training run: initializes weights from cfg and pairs.stats().
TrainResult train_model(const VaeConfig& cfg, const data::TrainingPairs& pairs,
                        const TrainConfig& tc);

// Continues from the given weights (used by transfer learning); honors each
// tensor's trainable flag. epochs == 0 returns the input unchanged.
TrainResult continue_training(const ModelWeights& start,
                              const data::TrainingPairs& pairs,
                              const TrainConfig& tc);

// Freezes all but the transfer-trainable layers, swaps the normalization
// stats for the observation set's, and retrains.
ModelWeights transfer_retrain(const ModelWeights& pretrained,
                              const data::TrainingPairs& noisy_pairs,
                              const TrainConfig& tc);

}  // namespace qgvae::model
