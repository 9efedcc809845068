#include "qgvae/forecast/climate.hpp"

#include <algorithm>
#include <cmath>

#include "qgvae/common.hpp"

namespace qgvae::forecast {

eval::ClimateAccumulator climate_run(const model::ModelWeights& w,
                                     const GridSnapshot& ic, int n_days,
                                     const ForecastConfig& cfg, double lx,
                                     double ly) {
  if (n_days < 1) throw ConfigError("climate_run needs n_days >= 1 (empty accumulator)");
  if (cfg.n_members < 1) throw ConfigError("climate_run needs n_members >= 1");
  if (ic.ny() != w.config.ny || ic.nx() != w.config.nx)
    throw ShapeError("initial condition does not match the model grid");

  const int field = w.config.field_size();
  const int latent = w.config.latent_dim;
  const bool vae = w.config.kind == model::ModelKind::vae;
  const int m = vae ? cfg.n_members : 1;
  const long steps = std::lround(n_days * qg::QgParams{}.day_units() / cfg.dt_sample);

  eval::ClimateAccumulator acc(ic.ny(), ic.nx(), lx, ly);

  std::vector<double> x(field), mean(field);
  data::normalize_snapshot(ic, w.stats, x.data());
  model::Inference inf(w);

  std::vector<double> mu(latent), lv(latent), z(latent), column(m);
  std::vector<std::vector<double>> members(m, std::vector<double>(field));
  std::vector<GaussianStream> streams;
  streams.reserve(m);
  for (int k = 0; k < m; ++k)
    streams.emplace_back(cfg.seed, 0xA000ull + static_cast<std::uint64_t>(k));

  for (long s = 0; s < steps; ++s) {
    if (vae) {
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
      for (int j = 0; j < field; ++j) {
        for (int k = 0; k < m; ++k) column[k] = members[k][j];
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (int k = 0; k < m; ++k) sum += column[k];
        mean[j] = sum / m;
      }
    } else {
      inf.predict_mean(x.data(), mean.data());
    }

    bool ok = true;
    for (int j = 0; j < field; ++j)
      if (!std::isfinite(mean[j])) {
        ok = false;
        break;
      }
    const double t = ic.time + (s + 1) * cfg.dt_sample;
    GridSnapshot snap;
    if (ok) {
      // Frames are accumulated in float32: values finite in double but beyond
      // float range count as a blow-up.
      snap = data::denormalize_snapshot(mean.data(), ic.ny(), ic.nx(), w.stats, t);
      ok = snap.all_finite();
    }
    if (!ok) {
      acc.mark_blowup(static_cast<int>(
          std::floor((s + 1) * cfg.dt_sample / qg::QgParams{}.day_units())));
      break;
    }
    acc.add(snap);
    x = mean;
  }
  return acc;
}

eval::ClimateAccumulator climate_truth(const qg::QgParams& params,
                                       std::uint64_t seed, double spinup_days,
                                       double record_days, int sample_every) {
  const qg::QgParams p = qg::validated(params);
  eval::ClimateAccumulator acc(p.ny, p.nx, p.lx, p.ly);
  qg::run_with_callback(p, seed, spinup_days, record_days, sample_every,
                        [&](const GridSnapshot& snap) { acc.add(snap); });
  return acc;
}

}  // namespace qgvae::forecast
