#include "qgvae/eval/metrics.hpp"

#include <cmath>

#include "qgvae/common.hpp"
#include "qgvae/qg/spectral.hpp"

namespace qgvae::eval {

namespace {

// Leading eigenpair of a symmetric PSD matrix by power iteration.
struct PowerResult {
  Eigen::VectorXd v;
  double lambda = 0.0;
  bool converged = false;
};

PowerResult power_iterate(const Eigen::MatrixXd& c, double tol, long max_iter) {
  const Eigen::Index n = c.rows();
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = 1.0 + 1e-3 * static_cast<double>(i);
  v.normalize();
  PowerResult r;
  for (long it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = c * v;
    const double lambda = v.dot(w);
    const double res = (w - lambda * v).norm();
    const double nw = w.norm();
    if (nw == 0.0) break;  // v in the null space; degenerate input
    v = w / nw;
    r.lambda = lambda;
    if (res <= tol * std::max(std::abs(lambda), 1e-30)) {
      r.converged = true;
      break;
    }
  }
  r.v = v;
  return r;
}

Eof eof_from_covariance(const Eigen::MatrixXd& c) {
  const double trace = c.trace();
  if (!(trace > 0.0))
    throw NumericalError("EOF of a zero-variance series is undefined");
  PowerResult lead = power_iterate(c, 1e-10, 200000);
  Eof out;
  out.pattern = lead.v.array();
  out.explained = lead.lambda / trace;
  // Sign convention: the largest-magnitude component is positive.
  Eigen::Index imax = 0;
  lead.v.cwiseAbs().maxCoeff(&imax);
  if (out.pattern[imax] < 0.0) out.pattern = -out.pattern;
  // Estimate the runner-up eigenvalue by deflation to flag near-degeneracy.
  Eigen::MatrixXd deflated =
      c - lead.lambda * (lead.v * lead.v.transpose());
  PowerResult second = power_iterate(deflated, 1e-8, 20000);
  out.degenerate_pair =
      !lead.converged || (lead.lambda - second.lambda) < 1e-8;
  return out;
}

double rms(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  if (a.size() != b.size())
    throw ShapeError("drift audit inputs disagree on length");
  return std::sqrt((a - b).square().mean());
}

}  // namespace

double acc(const GridSnapshot& forecast, const GridSnapshot& truth,
           const Eigen::ArrayXXd& clim_psi1) {
  if (forecast.ny() != truth.ny() || forecast.nx() != truth.nx() ||
      forecast.ny() != clim_psi1.rows() || forecast.nx() != clim_psi1.cols())
    throw ShapeError("acc inputs disagree on grid shape");
  const Eigen::ArrayXXd fp = forecast.psi[0].cast<double>() - clim_psi1;
  const Eigen::ArrayXXd op = truth.psi[0].cast<double>() - clim_psi1;
  const double num = (fp * op).sum();
  const double d1 = fp.square().sum();
  const double d2 = op.square().sum();
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw NumericalError("undefined ACC: an anomaly field has zero variance");
  return num / std::sqrt(d1 * d2);
}

double rmse(const GridSnapshot& forecast, const GridSnapshot& truth) {
  if (forecast.ny() != truth.ny() || forecast.nx() != truth.nx())
    throw ShapeError("rmse inputs disagree on grid shape");
  return std::sqrt((forecast.psi[0].cast<double>() - truth.psi[0].cast<double>())
                       .square()
                       .mean());
}

Horizon prediction_horizon(const SkillSeries& skill, double threshold) {
  if (skill.acc.empty() || skill.acc.size() != skill.lead_times.size())
    throw ShapeError("prediction_horizon needs a nonempty, consistent series");
  for (std::size_t i = 1; i < skill.lead_times.size(); ++i)
    if (skill.lead_times[i] <= skill.lead_times[i - 1])
      throw ShapeError("lead times must be strictly increasing");
  if (skill.acc[0] <= threshold) return {0, false};
  for (std::size_t i = 1; i < skill.acc.size(); ++i)
    if (skill.acc[i] <= threshold)
      return {skill.lead_times[i - 1], false};
  return {skill.lead_times.back(), true};
}

double windowed_error(const SkillSeries& skill, double window_days) {
  // 1 day = 5 advective time units = 200 solver steps at the default dt.
  const double limit = window_days * 200.0;
  if (skill.rmse.size() != skill.lead_times.size())
    throw ShapeError("skill series is inconsistent");
  double sum = 0.0;
  int n = 0;
  int max_lead = 0;
  for (std::size_t i = 0; i < skill.lead_times.size(); ++i) {
    max_lead = std::max(max_lead, skill.lead_times[i]);
    if (skill.lead_times[i] <= limit) {
      sum += skill.rmse[i];
      ++n;
    }
  }
  if (n == 0 || static_cast<double>(max_lead) < limit)
    throw ShapeError("skill series shorter than the averaging window");
  return sum / n;
}

Eof eof1(const Eigen::MatrixXd& series) {
  if (series.rows() < 2)
    throw ShapeError("eof1 needs at least 2 time samples");
  const Eigen::RowVectorXd mean = series.colwise().mean();
  const Eigen::MatrixXd centered = series.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) /
                              static_cast<double>(series.rows());
  return eof_from_covariance(cov);
}

std::array<Eigen::ArrayXd, 2> zonal_mean_velocity(const data::Dataset& ds) {
  if (ds.frames.empty()) throw IoError("zonal_mean_velocity: empty dataset");
  const qg::QgParams& p = ds.header.solver_params;
  qg::SpectralTransform tf(p.nx, p.ny, p.lx, p.ly);
  const int ny = static_cast<int>(ds.header.ny);
  const int nx = static_cast<int>(ds.header.nx);
  std::array<Eigen::ArrayXd, 2> sum{Eigen::ArrayXd::Zero(ny),
                                    Eigen::ArrayXd::Zero(ny)};
  qg::GridField g(nx, ny);
  for (const GridSnapshot& f : ds.frames)
    for (int layer = 0; layer < 2; ++layer) {
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
          g(ix, iy) = static_cast<double>(f.psi[layer](iy, ix));
      const qg::GridField u = -tf.inverse(tf.deriv_y(tf.forward(g)));
      for (int iy = 0; iy < ny; ++iy) sum[layer][iy] += u.col(iy).mean();
    }
  const double t = static_cast<double>(ds.frames.size());
  sum[0] /= t;
  sum[1] /= t;
  return sum;
}

ClimateAccumulator::ClimateAccumulator(int ny, int nx, double lx, double ly)
    : ny_(ny), nx_(nx) {
  for (int c = 0; c < 2; ++c) {
    sum_field_[c] = Eigen::ArrayXXd::Zero(ny, nx);
    sum_u_[c] = Eigen::ArrayXd::Zero(ny);
    minv_[c] = std::numeric_limits<double>::infinity();
    maxv_[c] = -std::numeric_limits<double>::infinity();
  }
  sum_zpsi1_ = Eigen::ArrayXd::Zero(ny);
  sum_u1_outer_ = Eigen::MatrixXd::Zero(ny, ny);
  tf_ = std::make_unique<qg::SpectralTransform>(nx, ny, lx, ly);
}

ClimateAccumulator::ClimateAccumulator(ClimateAccumulator&&) noexcept = default;
ClimateAccumulator::~ClimateAccumulator() = default;

void ClimateAccumulator::add(const GridSnapshot& snap) {
  if (snap.ny() != ny_ || snap.nx() != nx_)
    throw ShapeError("climate accumulator fed a mismatched snapshot");
  qg::GridField g(nx_, ny_);
  Eigen::VectorXd u1(ny_);
  for (int c = 0; c < 2; ++c) {
    const Eigen::ArrayXXd f = snap.psi[c].cast<double>();
    if (!f.isFinite().all()) finite_ = false;
    minv_[c] = std::min(minv_[c], static_cast<double>(f.minCoeff()));
    maxv_[c] = std::max(maxv_[c], static_cast<double>(f.maxCoeff()));
    sum_field_[c] += f;
    for (int iy = 0; iy < ny_; ++iy)
      for (int ix = 0; ix < nx_; ++ix) g(ix, iy) = f(iy, ix);
    if (c == 0) sum_zpsi1_ += f.rowwise().mean();
    const qg::GridField u = -tf_->inverse(tf_->deriv_y(tf_->forward(g)));
    for (int iy = 0; iy < ny_; ++iy) {
      const double zu = u.col(iy).mean();
      sum_u_[c][iy] += zu;
      if (c == 0) u1[iy] = zu;
    }
  }
  sum_u1_outer_.noalias() += u1 * u1.transpose();
  ++n_;
}

Climatology ClimateAccumulator::finalize() const {
  if (n_ == 0) throw ConfigError("empty climate accumulator");
  Climatology c;
  const double n = static_cast<double>(n_);
  for (int ch = 0; ch < 2; ++ch) {
    c.mean_field[ch] = sum_field_[ch] / n;
    c.zonal_mean_u[ch] = sum_u_[ch] / n;
  }
  c.zonal_mean_psi1 = sum_zpsi1_ / n;
  c.blowup_day = blowup_day_;
  if (n_ >= 2) {
    const Eigen::VectorXd mean_u1 = (sum_u_[0] / n).matrix();
    Eigen::MatrixXd cov =
        sum_u1_outer_ / n - mean_u1 * mean_u1.transpose();
    c.eof1_u1 = eof_from_covariance(cov);
  }
  return c;
}

Climatology climatology_from_dataset(const data::Dataset& ds) {
  if (ds.frames.empty()) throw IoError("climatology of an empty dataset");
  const qg::QgParams& p = ds.header.solver_params;
  ClimateAccumulator acc(static_cast<int>(ds.header.ny),
                         static_cast<int>(ds.header.nx), p.lx, p.ly);
  for (const GridSnapshot& f : ds.frames) acc.add(f);
  return acc.finalize();
}

DriftReport drift_audit(const Climatology& run, const Climatology& reference) {
  DriftReport r;
  r.rmse_zonal_psi1 = rms(run.zonal_mean_psi1, reference.zonal_mean_psi1);
  r.rmse_u1 = rms(run.zonal_mean_u[0], reference.zonal_mean_u[0]);
  r.rmse_u2 = rms(run.zonal_mean_u[1], reference.zonal_mean_u[1]);
  if (run.eof1_u1.pattern.size() > 0 &&
      run.eof1_u1.pattern.size() == reference.eof1_u1.pattern.size())
    r.eof_cosine =
        (run.eof1_u1.pattern * reference.eof1_u1.pattern).sum();
  r.blowup_day = run.blowup_day;
  r.finite = run.blowup_day < 0;
  return r;
}

SkillSeries skill_against_truth(const std::vector<GridSnapshot>& forecast,
                                const data::Dataset& truth,
                                std::size_t ic_frame,
                                const Eigen::ArrayXXd& clim_psi1,
                                int steps_per_sample) {
  SkillSeries s;
  if (ic_frame + forecast.size() + 1 > truth.frames.size())
    throw ShapeError("truth dataset too short to verify " +
                     std::to_string(forecast.size()) + " leads from frame " +
                     std::to_string(ic_frame));
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const GridSnapshot& o = truth.frames.at(ic_frame + 1 + i);
    s.lead_times.push_back(static_cast<int>(i + 1) * steps_per_sample);
    s.acc.push_back(acc(forecast[i], o, clim_psi1));
    s.rmse.push_back(rmse(forecast[i], o));
  }
  return s;
}

}  // namespace qgvae::eval
