#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "qgvae/data/dataset.hpp"
#include "qgvae/grid.hpp"

namespace qgvae::qg {
class SpectralTransform;
}

namespace qgvae::eval {

struct SkillSeries {
  std::vector<int> lead_times;  // solver-step units, strictly increasing
  std::vector<double> acc;
  std::vector<double> rmse;
};

struct Horizon {
  int lead = 0;               // same units as lead_times
  bool never_crossed = false;
};

struct Eof {
  Eigen::ArrayXd pattern;     // unit norm; largest-|component| entry positive
  double explained = 0.0;     // leading-eigenvalue fraction of total variance
  bool degenerate_pair = false;  // leading eigenvalue gap < 1e-8
};

struct Climatology {
  std::array<Eigen::ArrayXXd, 2> mean_field;   // (ny, nx) per channel
  Eigen::ArrayXd zonal_mean_psi1;              // (ny)
  std::array<Eigen::ArrayXd, 2> zonal_mean_u;  // (ny) per layer
  Eof eof1_u1;
  int blowup_day = -1;                         // -1 when the run stayed finite
};

struct DriftReport {
  double rmse_zonal_psi1 = 0.0;
  double rmse_u1 = 0.0;
  double rmse_u2 = 0.0;
  double eof_cosine = 0.0;   // signed, both patterns sign-fixed
  int blowup_day = -1;
  bool finite = true;
};

// Anomaly correlation of channel 1 (psi_1) given a climatological mean field.
double acc(const GridSnapshot& forecast, const GridSnapshot& truth,
           const Eigen::ArrayXXd& clim_psi1);

// Root of the grid-mean squared psi_1 difference, physical units.
double rmse(const GridSnapshot& forecast, const GridSnapshot& truth);

Horizon prediction_horizon(const SkillSeries& skill, double threshold = 0.60);

// Mean RMSE over leads within the first window_days (200 solver steps/day).
double windowed_error(const SkillSeries& skill, double window_days = 2.0);

// First EOF of a (T x ny) series via power iteration (residual 1e-10).
Eof eof1(const Eigen::MatrixXd& series);

// u = -d(psi)/dy, computed spectrally per frame, averaged over x and time.
std::array<Eigen::ArrayXd, 2> zonal_mean_velocity(const data::Dataset& ds);

// Streaming climate statistics: O(grid) state, independent of frame count.
class ClimateAccumulator {
 public:
  ClimateAccumulator(int ny, int nx, double lx, double ly);
  ClimateAccumulator(ClimateAccumulator&&) noexcept;
  ~ClimateAccumulator();

  void add(const GridSnapshot& snap);
  long frames() const { return n_; }
  bool all_finite() const { return finite_; }
  double min_value(int channel) const { return minv_[channel]; }
  double max_value(int channel) const { return maxv_[channel]; }
  void mark_blowup(int day) { blowup_day_ = day; }
  int blowup_day() const { return blowup_day_; }

  Climatology finalize() const;  // throws on an empty accumulator

 private:
  int ny_, nx_;
  long n_ = 0;
  bool finite_ = true;
  int blowup_day_ = -1;
  double minv_[2], maxv_[2];
  std::array<Eigen::ArrayXXd, 2> sum_field_;
  Eigen::ArrayXd sum_zpsi1_;
  std::array<Eigen::ArrayXd, 2> sum_u_;
  Eigen::MatrixXd sum_u1_outer_;  // for the zonal-mean u1 covariance
  std::unique_ptr<qg::SpectralTransform> tf_;
};

Climatology climatology_from_dataset(const data::Dataset& ds);

DriftReport drift_audit(const Climatology& run, const Climatology& reference);

// Per-lead skill of a forecast trajectory verified against truth frames
// starting at truth.frames[ic_frame + 1]. Lead s carries lead_time
// (s+1)*steps_per_sample.
SkillSeries skill_against_truth(const std::vector<GridSnapshot>& forecast,
                                const data::Dataset& truth,
                                std::size_t ic_frame,
                                const Eigen::ArrayXXd& clim_psi1,
                                int steps_per_sample = 40);

}  // namespace qgvae::eval
