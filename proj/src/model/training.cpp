#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "qgvae/common.hpp"
#include "qgvae/model/training.hpp"
#include "qgvae/nn/adam.hpp"

namespace qgvae::model {

namespace {

struct ValScore {
  double total, recon, kl;
};

// Validation uses the deterministic latent path z = mu.
ValScore validation_loss(const ModelWeights& w, const data::TrainingPairs& pairs,
                         std::size_t begin, std::size_t end) {
  Inference inf(w);
  const VaeConfig& cfg = w.config;
  const int field = cfg.field_size();
  std::vector<double> x(field), target(field), out(field);
  std::vector<double> mu(cfg.latent_dim), lv(cfg.latent_dim);
  ValScore s{0.0, 0.0, 0.0};
  const bool vae = cfg.kind == ModelKind::vae;
  for (std::size_t i = begin; i < end; ++i) {
    pairs.materialize(i, x.data(), target.data());
    inf.encode(x.data(), mu.data(), vae ? lv.data() : nullptr);
    inf.decode(mu.data(), x.data(), out.data());
    double recon = 0.0;
    for (int j = 0; j < field; ++j) {
      const double d = out[j] - target[j];
      recon += d * d;
    }
    recon /= field;
    double kl = 0.0;
    if (vae)
      for (int j = 0; j < cfg.latent_dim; ++j)
        kl += 0.5 * (std::exp(lv[j]) + mu[j] * mu[j] - 1.0 - lv[j]);
    s.recon += recon;
    s.kl += kl;
    s.total += recon + cfg.kl_weight * kl;
  }
  const double n = static_cast<double>(end - begin);
  if (n > 0) {
    s.recon /= n;
    s.kl /= n;
    s.total /= n;
  }
  return s;
}

void write_progress(const std::string& path, const std::vector<EpochStats>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "epoch,train_loss,val_loss,recon,kl\n";
  char buf[160];
  for (const EpochStats& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.epoch,
                  r.train_loss, r.val_loss, r.recon, r.kl);
    os << buf;
  }
}

}  // namespace

TrainResult continue_training(const ModelWeights& start,
                              const data::TrainingPairs& pairs,
                              const TrainConfig& tc) {
  const VaeConfig& cfg = start.config;
  validate(cfg);
  if (pairs.ny() != cfg.ny || pairs.nx() != cfg.nx)
    throw ShapeError("training pairs are " + std::to_string(pairs.ny()) + "x" +
                     std::to_string(pairs.nx()) + " but the model expects " +
                     std::to_string(cfg.ny) + "x" + std::to_string(cfg.nx));
  if (tc.epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (tc.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(tc.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(tc.val_fraction >= 0.0 && tc.val_fraction < 1.0))
    throw ConfigError("val_fraction must lie in [0, 1)");

  const std::size_t n = pairs.size();
  const std::size_t n_val =
      static_cast<std::size_t>(std::floor(tc.val_fraction * static_cast<double>(n)));
  const std::size_t n_train = n - n_val;
  if (n_train == 0) throw ConfigError("no training pairs left after validation split");

  TrainResult result;
  result.weights = start;
  if (tc.epochs == 0) return result;

  ModelWeights w = start;
  std::vector<nn::Tensor*> params = w.tensors();
  std::vector<nn::AdamState> adam = nn::adam_init(params);
  nn::AdamConfig acfg;
  acfg.lr = tc.lr;
  long adam_t = 0;

  const int field = cfg.field_size();
  const bool vae = cfg.kind == ModelKind::vae;
  std::vector<double> x(field), target(field), eps(cfg.latent_dim);
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best_val = std::numeric_limits<double>::infinity();

  for (int e = 1; e <= tc.epochs; ++e) {
    GaussianStream shuffle(tc.seed, 0x5A00000ull + static_cast<std::uint64_t>(e));
    for (std::size_t i = n_train - 1; i > 0; --i) {
      const std::uint64_t j = shuffle.next_index(i + 1);
      std::swap(order[i], order[j]);
    }
    GaussianStream noise(tc.seed, 0xE9500000ull + static_cast<std::uint64_t>(e));

    double sum_total = 0.0, sum_recon = 0.0, sum_kl = 0.0;
    std::size_t done = 0;
    int batch_index = 0;
    while (done < n_train) {
      const std::size_t take = std::min<std::size_t>(tc.batch_size, n_train - done);
      for (std::size_t s = 0; s < take; ++s) {
        pairs.materialize(order[done + s], x.data(), target.data());
        if (vae)
          for (int j = 0; j < cfg.latent_dim; ++j) eps[j] = noise.next();
        nn::Graph g;
        LossHandles lh =
            build_loss_graph(g, w, x.data(), target.data(), eps.data());
        const double total = g.scalar(lh.total);
        if (!std::isfinite(total))
          throw NumericalError("training diverged at epoch " +
                               std::to_string(e) + ", batch " +
                               std::to_string(batch_index));
        sum_total += total;
        sum_recon += g.scalar(lh.recon);
        if (vae) sum_kl += g.scalar(lh.kl);
        g.backward(lh.total);
      }
      nn::adam_step(params, adam, acfg, ++adam_t, 1.0 / static_cast<double>(take));
      w.zero_grads();
      done += take;
      ++batch_index;
    }

    EpochStats st;
    st.epoch = e;
    st.train_loss = sum_total / static_cast<double>(n_train);
    st.recon = sum_recon / static_cast<double>(n_train);
    st.kl = vae ? sum_kl / static_cast<double>(n_train) : 0.0;
    if (n_val > 0) {
      st.val_loss = validation_loss(w, pairs, n_train, n).total;
    } else {
      st.val_loss = st.train_loss;
    }
    result.epochs.push_back(st);
    if (st.val_loss < best_val) {
      best_val = st.val_loss;
      result.weights = w;
      result.best_epoch = e;
    }
    if (!tc.progress_csv.empty()) write_progress(tc.progress_csv, result.epochs);
  }
  return result;
}

TrainResult train_model(const VaeConfig& cfg, const data::TrainingPairs& pairs,
                        const TrainConfig& tc) {
  ModelWeights w = init_weights(cfg, pairs.stats());
  return continue_training(w, pairs, tc);
}

ModelWeights transfer_retrain(const ModelWeights& pretrained,
                              const data::TrainingPairs& noisy_pairs,
                              const TrainConfig& tc) {
  ModelWeights w = pretrained;
  apply_transfer_freeze(w);
  w.stats = noisy_pairs.stats();
  return continue_training(w, noisy_pairs, tc).weights;
}

}  // namespace qgvae::model
