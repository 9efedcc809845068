#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qgvae/grid.hpp"
#include "qgvae/qg/params.hpp"

namespace qgvae::data {

enum class SystemTag : std::uint32_t { perfect = 0, imperfect = 1 };

struct DatasetHeader {
  static constexpr char magic[5] = "QGD1";
  std::uint32_t version = 1;
  std::uint64_t nt = 0;
  std::uint32_t ny = 0;
  std::uint32_t nx = 0;
  double dt_sample = 0.0;
  qg::QgParams solver_params;
  SystemTag system_tag = SystemTag::perfect;
  std::uint32_t ensemble_id = 0;
  double noise_eta = 0.0;
  double t0 = 0.0;  ///< time of the first frame; frame i sits at t0 + i*dt_sample
};

/// Time-ordered sequence of snapshots plus provenance.
struct Dataset {
  DatasetHeader header;
  std::vector<GridSnapshot> frames;

  std::size_t size() const { return frames.size(); }
};

void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

/// Per-channel normalization statistics (population convention), computed
/// over every frame and grid point of the training split.
struct NormStats {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> std{1.0, 1.0};
};

NormStats compute_norm_stats(const Dataset& ds);
NormStats compute_norm_stats(const std::vector<Dataset>& sets);
void write_norm_stats_csv(const std::string& path, const NormStats& stats);

/// Adds iid Gaussian observation noise, std = eta * sigma_Z per channel.
Dataset add_observation_noise(const Dataset& ds, double eta,
                              const NormStats& stats, std::uint64_t seed);

/// Keeps the leading ceil(fraction*nt) frames: observations are a
/// contiguous record of the recent past, not random draws.
Dataset subsample_observations(const Dataset& ds, double fraction);

/// Lazily materialized (z(t), z(t+dt)) pairs over one or more ensembles;
/// pairs never straddle ensemble boundaries. z is (psi - mean)/std.
class TrainingPairs {
 public:
  TrainingPairs(const std::vector<Dataset>* sets, NormStats stats);

  std::size_t size() const { return index_.size(); }
  const NormStats& stats() const { return stats_; }
  int ny() const;
  int nx() const;

  /// Fills caller buffers (2*ny*nx doubles each, [c][y][x] order).
  void materialize(std::size_t pair, double* input, double* target) const;

 private:
  const std::vector<Dataset>* sets_;
  NormStats stats_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> index_;  // (set, frame)
};

/// (value - mean)/std applied to one snapshot; inverse available for
/// round-trip checks and denormalized outputs.
void normalize_snapshot(const GridSnapshot& snap, const NormStats& stats,
                        double* out);
GridSnapshot denormalize_snapshot(const double* z, int ny, int nx,
                                  const NormStats& stats, double time);

}  // namespace qgvae::data
