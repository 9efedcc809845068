#include "qgvae/forecast/rollout.hpp"

#include <algorithm>
#include <cmath>

#include "qgvae/common.hpp"

namespace qgvae::forecast {

namespace {

void check(const ForecastConfig& cfg) {
  if (cfg.n_members < 1) throw ConfigError("forecast needs n_members >= 1");
  if (cfg.n_steps < 1) throw ConfigError("forecast needs n_steps >= 1");
  if (!(cfg.eta >= 0.0)) throw ConfigError("forecast eta must be >= 0");
}

bool finite(const double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

GridSnapshot spread_snapshot(const double* s, int ny, int nx,
                             const data::NormStats& stats, double time) {
  GridSnapshot snap;
  snap.time = time;
  for (int c = 0; c < 2; ++c) {
    snap.psi[c].resize(ny, nx);
    const double sd = stats.std[c];
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        snap.psi[c](y, x) = static_cast<float>(*s++ * sd);
  }
  return snap;
}

GridSnapshot zero_like(int ny, int nx, double time) {
  GridSnapshot snap;
  snap.time = time;
  for (int c = 0; c < 2; ++c) snap.psi[c] = Eigen::ArrayXXf::Zero(ny, nx);
  return snap;
}

}  // namespace

GridSnapshot make_noisy_ic(const GridSnapshot& truth, double eta,
                           const data::NormStats& stats, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw ConfigError("ic noise eta must be >= 0");
  GridSnapshot out = truth;
  if (eta == 0.0) return out;
  GaussianStream g(seed, 0x1C5);
  for (int c = 0; c < 2; ++c) {
    const double amp = eta * stats.std[c];
    float* p = out.psi[c].data();
    for (Eigen::Index i = 0; i < out.psi[c].size(); ++i)
      p[i] = static_cast<float>(p[i] + amp * g.next());
  }
  return out;
}

ForecastResult rollout_vae(const model::ModelWeights& w, const GridSnapshot& ic,
                           const ForecastConfig& cfg) {
  check(cfg);
  if (w.config.kind != model::ModelKind::vae)
    throw ConfigError("rollout_vae requires VAE weights");
  if (ic.ny() != w.config.ny || ic.nx() != w.config.nx)
    throw ShapeError("initial condition does not match the model grid");

  const int field = w.config.field_size();
  const int latent = w.config.latent_dim;
  const int m = cfg.n_members;
  const bool keep_members = cfg.n_steps <= 50;

  ForecastResult res;
  res.init_condition = ic;

  std::vector<double> x(field);
  data::normalize_snapshot(ic, w.stats, x.data());
  model::Inference inf(w);

  std::vector<double> mu(latent), lv(latent), z(latent);
  std::vector<std::vector<double>> members(m, std::vector<double>(field));
  std::vector<double> mean(field), spread(field);
  std::vector<double> column(m);
  std::vector<GaussianStream> streams;
  streams.reserve(m);
  for (int k = 0; k < m; ++k)
    streams.emplace_back(cfg.seed, 0xA000ull + static_cast<std::uint64_t>(k));

  for (int s = 0; s < cfg.n_steps; ++s) {
    inf.encode(x.data(), mu.data(), lv.data());
    for (int k = 0; k < m; ++k) {
      if (cfg.latent_noise) {
        for (int j = 0; j < latent; ++j)
          z[j] = mu[j] + std::exp(0.5 * lv[j]) * streams[k].next();
      } else {
        z = mu;
      }
      inf.decode(z.data(), x.data(), members[k].data());
    }
    // Sorted per-point reduction: identical bits under member relabeling.
    for (int j = 0; j < field; ++j) {
      for (int k = 0; k < m; ++k) column[k] = members[k][j];
      std::sort(column.begin(), column.end());
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += column[k];
      const double mj = sum / m;
      double var = 0.0;
      for (int k = 0; k < m; ++k) {
        const double d = column[k] - mj;
        var += d * d;
      }
      mean[j] = mj;
      spread[j] = std::sqrt(var / m);
    }

    bool ok = finite(mean.data(), mean.size());
    for (int k = 0; ok && k < m; ++k)
      ok = finite(members[k].data(), members[k].size());

    // Frames are stored in float32: values finite in double but beyond float
    // range count as a blow-up of the recorded trajectory.
    const double t = ic.time + (s + 1) * cfg.dt_sample;
    GridSnapshot mean_snap, spread_snap;
    std::vector<GridSnapshot> row;
    if (ok) {
      mean_snap =
          data::denormalize_snapshot(mean.data(), ic.ny(), ic.nx(), w.stats, t);
      spread_snap = spread_snapshot(spread.data(), ic.ny(), ic.nx(), w.stats, t);
      ok = mean_snap.all_finite() && spread_snap.all_finite();
      if (ok && keep_members) {
        row.reserve(m);
        for (int k = 0; k < m; ++k) {
          row.push_back(data::denormalize_snapshot(members[k].data(), ic.ny(),
                                                   ic.nx(), w.stats, t));
          ok = ok && row.back().all_finite();
        }
      }
    }
    if (!ok) {
      res.first_failure_step = s + 1;
      break;
    }

    res.mean_trajectory.push_back(std::move(mean_snap));
    res.spread.push_back(std::move(spread_snap));
    if (keep_members) res.member_snapshots.push_back(std::move(row));
    x = mean;
  }
  return res;
}

ForecastResult rollout_deterministic(const model::ModelWeights& w,
                                     const GridSnapshot& ic,
                                     const ForecastConfig& cfg) {
  check(cfg);
  if (ic.ny() != w.config.ny || ic.nx() != w.config.nx)
    throw ShapeError("initial condition does not match the model grid");

  const int field = w.config.field_size();
  ForecastResult res;
  res.init_condition = ic;

  std::vector<double> x(field), y(field);
  data::normalize_snapshot(ic, w.stats, x.data());
  model::Inference inf(w);
  const bool keep_members = cfg.n_steps <= 50;

  for (int s = 0; s < cfg.n_steps; ++s) {
    inf.predict_mean(x.data(), y.data());
    const double t = ic.time + (s + 1) * cfg.dt_sample;
    GridSnapshot snap;
    bool ok = finite(y.data(), y.size());
    if (ok) {
      // Frames are stored in float32: values finite in double but beyond
      // float range count as a blow-up of the recorded trajectory.
      snap = data::denormalize_snapshot(y.data(), ic.ny(), ic.nx(), w.stats, t);
      ok = snap.all_finite();
    }
    if (!ok) {
      res.first_failure_step = s + 1;
      break;
    }
    res.spread.push_back(zero_like(ic.ny(), ic.nx(), t));
    if (keep_members) res.member_snapshots.push_back({snap});
    res.mean_trajectory.push_back(std::move(snap));
    x = y;
  }
  return res;
}

ForecastResult rollout_numerical(const qg::QgParams& params,
                                 const GridSnapshot& ic, int n_steps) {
  if (n_steps < 1) throw ConfigError("rollout_numerical needs n_steps >= 1");
  const qg::QgParams p = qg::validated(params);
  if (ic.ny() != p.ny || ic.nx() != p.nx)
    throw ShapeError("initial condition does not match the solver grid");

  qg::QgModel model(p);
  qg::SpectralTransform& tf = model.transform();

  qg::LayerPair psi_hat;
  qg::GridField g(p.nx, p.ny);
  for (int layer = 0; layer < 2; ++layer) {
    for (int iy = 0; iy < p.ny; ++iy)
      for (int ix = 0; ix < p.nx; ++ix)
        g(ix, iy) = static_cast<double>(ic.psi[layer](iy, ix));
    psi_hat[layer] = tf.forward(g) * tf.dealias_mask();
  }

  qg::SpectralState prev;
  prev.q_hat = qg::pv_from_streamfunction(psi_hat, model);
  prev.time = ic.time;

  ForecastResult res;
  res.init_condition = ic;
  const bool keep_members = n_steps <= 50;

  qg::SpectralState curr = qg::step_euler(prev, model);
  long step = 1;
  for (int lead = 0; lead < n_steps; ++lead) {
    while (step < static_cast<long>(lead + 1) * 40) {
      qg::SpectralState next = qg::step_leapfrog(prev, curr, model);
      prev = std::move(curr);
      curr = std::move(next);
      ++step;
    }
    GridSnapshot snap = qg::snapshot_from_state(curr, model);
    res.spread.push_back(zero_like(p.ny, p.nx, snap.time));
    if (keep_members) res.member_snapshots.push_back({snap});
    res.mean_trajectory.push_back(std::move(snap));
  }
  return res;
}

}  // namespace qgvae::forecast
