#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qgvae/common.hpp"
#include "qgvae/data/dataset.hpp"
#include "qgvae/model/training.hpp"
#include "qgvae/model/vae.hpp"
#include "qgvae/model/weights_io.hpp"

using namespace qgvae;
using namespace qgvae::model;
namespace fs = std::filesystem;

namespace {

VaeConfig small_config(ModelKind kind) {
  VaeConfig cfg;
  cfg.ny = 16;
  cfg.nx = 16;
  cfg.filters = 4;
  cfg.latent_dim = 8;
  cfg.kl_weight = 1e-3;
  cfg.kind = kind;
  cfg.seed = 5;
  return cfg;
}

GridSnapshot random_snapshot(int ny, int nx, std::uint64_t seed, double time) {
  GaussianStream g(seed, 0xF00D);
  GridSnapshot s;
  s.time = time;
  for (auto& plane : s.psi) {
    plane.resize(ny, nx);
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) plane(y, x) = static_cast<float>(g.next());
  }
  return s;
}

data::Dataset random_dataset(int ny, int nx, int nt, std::uint64_t seed) {
  data::Dataset ds;
  ds.header.nt = static_cast<std::uint64_t>(nt);
  ds.header.ny = static_cast<std::uint32_t>(ny);
  ds.header.nx = static_cast<std::uint32_t>(nx);
  ds.header.dt_sample = 1.0;
  for (int t = 0; t < nt; ++t)
    ds.frames.push_back(random_snapshot(ny, nx, seed + 100 * t, t * 1.0));
  return ds;
}

std::vector<double> random_field(const VaeConfig& cfg, std::uint64_t seed) {
  GaussianStream g(seed, 0xF1E1D);
  std::vector<double> x(static_cast<std::size_t>(cfg.field_size()));
  for (double& v : x) v = g.next();
  return x;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "qgvae_model_tests";
  fs::create_directories(dir);
  return dir;
}

void zero_all(ModelWeights& w) {
  for (nn::Tensor* t : w.tensors()) t->value.setZero();
}

double mean_square(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("encoder and decoder produce the advertised shapes") {
  for (ModelKind kind : {ModelKind::vae, ModelKind::deterministic}) {
    VaeConfig cfg = small_config(kind);
    ModelWeights w = init_weights(cfg, data::NormStats{});
    const auto x = random_field(cfg, 7);
    nn::Graph g;
    int xi = g.leaf(x.data(), {2, cfg.ny, cfg.nx});
    EncodeHandles enc = build_encoder(g, w, xi);
    CHECK(g.at(enc.mu).shape == std::vector<int>{cfg.latent_dim});
    if (kind == ModelKind::vae) {
      REQUIRE(enc.logvar >= 0);
      CHECK(g.at(enc.logvar).shape == std::vector<int>{cfg.latent_dim});
      CHECK(g.at(enc.logvar).value.maxCoeff() <= kLogvarHi);
      CHECK(g.at(enc.logvar).value.minCoeff() >= kLogvarLo);
    } else {
      CHECK(enc.logvar == -1);
    }
    int out = build_decoder(g, w, enc.mu, xi);
    CHECK(g.at(out).shape == std::vector<int>{2, cfg.ny, cfg.nx});
    CHECK(g.at(out).value.isFinite().all());
  }
}

TEST_CASE("variational variant adds exactly one extra dense head") {
  VaeConfig v = small_config(ModelKind::vae);
  VaeConfig d = small_config(ModelKind::deterministic);
  ModelWeights wv = init_weights(v, data::NormStats{});
  ModelWeights wd = init_weights(d, data::NormStats{});
  const std::size_t extra =
      static_cast<std::size_t>(v.latent_dim) * v.flat_dim() + v.latent_dim;
  CHECK(wv.parameter_count() == wd.parameter_count() + extra);
  CHECK(wv.layers.size() == wd.layers.size() + 1);
  CHECK_THROWS_AS(wd.layer("logvar"), ConfigError);
}

TEST_CASE("zero weights reduce the increment to the output biases") {
  VaeConfig cfg = small_config(ModelKind::vae);
  ModelWeights w = init_weights(cfg, data::NormStats{});
  zero_all(w);
  w.layer("mu").b.value.setConstant(0.25);
  w.layer("dec_out").b.value[0] = 1.5;
  w.layer("dec_out").b.value[1] = -2.5;

  Inference inf(w);
  const auto x = random_field(cfg, 9);
  std::vector<double> mu(cfg.latent_dim), lv(cfg.latent_dim);
  inf.encode(x.data(), mu.data(), lv.data());
  for (double m : mu) CHECK(m == 0.25);
  for (double l : lv) CHECK(l == 0.0);

  std::vector<double> out(static_cast<std::size_t>(cfg.field_size()));
  inf.decode(mu.data(), x.data(), out.data());
  const std::size_t plane = static_cast<std::size_t>(cfg.ny) * cfg.nx;
  for (std::size_t i = 0; i < plane; ++i) CHECK(out[i] == x[i] + 1.5);
  for (std::size_t i = plane; i < 2 * plane; ++i) CHECK(out[i] == x[i] - 2.5);
}

TEST_CASE("tape-free forward pass reproduces the graph forward pass exactly") {
  for (ModelKind kind : {ModelKind::vae, ModelKind::deterministic}) {
    VaeConfig cfg = small_config(kind);
    ModelWeights w = init_weights(cfg, data::NormStats{});
    const auto x = random_field(cfg, 11);
    const std::vector<double> eps(static_cast<std::size_t>(cfg.latent_dim), 0.0);

    nn::Graph g;
    LossHandles lh = build_loss_graph(g, w, x.data(), x.data(), eps.data());

    Inference inf(w);
    std::vector<double> mu(cfg.latent_dim), lv(cfg.latent_dim);
    inf.encode(x.data(), mu.data(),
               kind == ModelKind::vae ? lv.data() : nullptr);
    for (int i = 0; i < cfg.latent_dim; ++i) {
      CHECK(mu[static_cast<std::size_t>(i)] == g.at(lh.mu).value[i]);
      if (kind == ModelKind::vae)
        CHECK(lv[static_cast<std::size_t>(i)] == g.at(lh.logvar).value[i]);
    }

    // Zero latent noise makes the sampled code equal the mean code, so the
    // graph output must match predict_mean bit for bit.
    std::vector<double> out(static_cast<std::size_t>(cfg.field_size()));
    inf.predict_mean(x.data(), out.data());
    for (int i = 0; i < cfg.field_size(); ++i)
      CHECK(out[static_cast<std::size_t>(i)] == g.at(lh.out).value[i]);

    std::vector<double> dec(static_cast<std::size_t>(cfg.field_size()));
    inf.decode(mu.data(), x.data(), dec.data());
    for (int i = 0; i < cfg.field_size(); ++i)
      CHECK(dec[static_cast<std::size_t>(i)] == out[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("encode refuses a log-variance buffer that contradicts the kind") {
  VaeConfig cfg = small_config(ModelKind::deterministic);
  ModelWeights w = init_weights(cfg, data::NormStats{});
  Inference inf(w);
  const auto x = random_field(cfg, 13);
  std::vector<double> mu(cfg.latent_dim), lv(cfg.latent_dim);
  CHECK_THROWS_AS(inf.encode(x.data(), mu.data(), lv.data()), ConfigError);
  VaeConfig vcfg = small_config(ModelKind::vae);
  ModelWeights wv = init_weights(vcfg, data::NormStats{});
  Inference infv(wv);
  CHECK_THROWS_AS(infv.encode(x.data(), mu.data(), nullptr), ConfigError);
}

TEST_CASE("decoder stays finite across the usable latent ball") {
  VaeConfig cfg = small_config(ModelKind::vae);
  ModelWeights w = init_weights(cfg, data::NormStats{});
  Inference inf(w);
  const auto x = random_field(cfg, 17);
  std::vector<double> z(cfg.latent_dim), out(static_cast<std::size_t>(cfg.field_size()));
  for (int trial = 0; trial < 8; ++trial) {
    GaussianStream g(300 + static_cast<std::uint64_t>(trial), 0x2);
    double norm2 = 0.0;
    for (double& v : z) {
      v = g.next();
      norm2 += v * v;
    }
    const double s = 10.0 / std::sqrt(norm2);
    for (double& v : z) v *= s;
    inf.decode(z.data(), x.data(), out.data());
    for (double v : out) CHECK(std::isfinite(v));
  }
}

TEST_CASE("model config validation rejects unusable geometry") {
  VaeConfig cfg = small_config(ModelKind::vae);
  cfg.ny = 20;
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("multiple of 8"),
                       ConfigError);
  cfg = small_config(ModelKind::vae);
  cfg.nx = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = small_config(ModelKind::vae);
  cfg.filters = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = small_config(ModelKind::vae);
  cfg.latent_dim = -3;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = small_config(ModelKind::vae);
  cfg.kl_weight = -1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("training rejects mismatched data and bad optimizer settings") {
  VaeConfig cfg = small_config(ModelKind::deterministic);
  const std::vector<data::Dataset> sets = {random_dataset(16, 16, 4, 21)};
  data::TrainingPairs pairs(&sets, data::compute_norm_stats(sets[0]));

  VaeConfig wrong = cfg;
  wrong.ny = 24;
  ModelWeights w = init_weights(wrong, pairs.stats());
  TrainConfig tc;
  tc.epochs = 1;
  CHECK_THROWS_AS(continue_training(w, pairs, tc), ShapeError);

  ModelWeights ok = init_weights(cfg, pairs.stats());
  tc.epochs = -1;
  CHECK_THROWS_AS(continue_training(ok, pairs, tc), ConfigError);
  tc.epochs = 1;
  tc.batch_size = 0;
  CHECK_THROWS_AS(continue_training(ok, pairs, tc), ConfigError);
  tc.batch_size = 4;
  tc.lr = 0.0;
  CHECK_THROWS_AS(continue_training(ok, pairs, tc), ConfigError);
  tc.lr = 1e-4;
  tc.val_fraction = 1.0;
  CHECK_THROWS_AS(continue_training(ok, pairs, tc), ConfigError);
  tc.val_fraction = -0.1;
  CHECK_THROWS_AS(continue_training(ok, pairs, tc), ConfigError);
}

TEST_CASE("validation holds out exactly the trailing fraction of the pairs") {
  VaeConfig cfg = small_config(ModelKind::deterministic);
  const std::vector<data::Dataset> sets = {random_dataset(16, 16, 6, 31)};
  data::TrainingPairs pairs(&sets, data::compute_norm_stats(sets[0]));
  REQUIRE(pairs.size() == 5);

  // All-zero weights emit a zero increment (output = input), so each pair's
  // loss is the mean square of target minus input and the split is directly
  // observable.
  ModelWeights w = init_weights(cfg, pairs.stats());
  zero_all(w);
  std::vector<double> x(static_cast<std::size_t>(cfg.field_size()));
  std::vector<double> t(static_cast<std::size_t>(cfg.field_size()));
  std::vector<double> pair_loss(5);
  for (std::size_t i = 0; i < 5; ++i) {
    pairs.materialize(i, x.data(), t.data());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] -= x[j];
    pair_loss[i] = mean_square(t);
  }

  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 8;
  tc.lr = 1e-12;  // keep the single update negligible
  tc.val_fraction = 0.4;
  TrainResult r = continue_training(w, pairs, tc);
  REQUIRE(r.epochs.size() == 1);
  const double want_train = (pair_loss[0] + pair_loss[1] + pair_loss[2]) / 3.0;
  const double want_val = (pair_loss[3] + pair_loss[4]) / 2.0;
  CHECK(r.epochs[0].train_loss == doctest::Approx(want_train).epsilon(1e-9));
  CHECK(r.epochs[0].val_loss == doctest::Approx(want_val).epsilon(1e-9));
  CHECK(r.best_epoch == 1);
}

TEST_CASE("zero-epoch training returns its input unchanged") {
  VaeConfig cfg = small_config(ModelKind::vae);
  const std::vector<data::Dataset> sets = {random_dataset(16, 16, 4, 41)};
  data::TrainingPairs pairs(&sets, data::compute_norm_stats(sets[0]));
  ModelWeights w = init_weights(cfg, pairs.stats());
  TrainConfig tc;
  tc.epochs = 0;
  TrainResult r = continue_training(w, pairs, tc);
  CHECK(r.epochs.empty());
  CHECK(r.best_epoch == -1);
  REQUIRE(r.weights.layers.size() == w.layers.size());
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    CHECK((r.weights.layers[i].w.value == w.layers[i].w.value).all());
    CHECK((r.weights.layers[i].b.value == w.layers[i].b.value).all());
  }
}

TEST_CASE("a single smooth pair can be memorized") {
  // Smooth large-scale fields are representable by the conv decoder; an iid
  // noise target would not be, so the pair is built from a few Fourier modes.
  VaeConfig cfg = small_config(ModelKind::deterministic);
  cfg.filters = 8;
  cfg.latent_dim = 16;
  data::Dataset ds;
  ds.header.nt = 2;
  ds.header.ny = 16;
  ds.header.nx = 16;
  ds.header.dt_sample = 1.0;
  const double pi = std::acos(-1.0);
  for (int t = 0; t < 2; ++t) {
    GridSnapshot s;
    s.time = t;
    for (int c = 0; c < 2; ++c) {
      s.psi[c].resize(16, 16);
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
          s.psi[c](y, x) = static_cast<float>(
              std::sin(2 * pi * (y + 3 * t + 5 * c) / 16.0) +
              0.5 * std::cos(2 * pi * (x + 2 * t) / 16.0));
    }
    ds.frames.push_back(std::move(s));
  }
  const std::vector<data::Dataset> sets = {ds};
  data::TrainingPairs pairs(&sets, data::compute_norm_stats(sets[0]));
  REQUIRE(pairs.size() == 1);
  TrainConfig tc;
  tc.epochs = 800;
  tc.batch_size = 1;
  tc.lr = 5e-3;
  tc.val_fraction = 0.0;
  tc.seed = 3;
  TrainResult r = train_model(cfg, pairs, tc);
  REQUIRE(!r.epochs.empty());
  const double initial = r.epochs.front().recon;
  double best = initial;
  for (const EpochStats& e : r.epochs) best = std::min(best, e.recon);
  CHECK(best < 1e-3 * initial);
}

TEST_CASE("training is reproducible and its progress file is well formed") {
  VaeConfig cfg = small_config(ModelKind::vae);
  const std::vector<data::Dataset> sets = {random_dataset(16, 16, 9, 61)};
  data::TrainingPairs pairs(&sets, data::compute_norm_stats(sets[0]));
  const fs::path csv = scratch_dir() / "progress.csv";
  TrainConfig tc;
  tc.epochs = 12;
  tc.batch_size = 4;
  tc.lr = 1e-3;
  tc.seed = 7;
  tc.val_fraction = 0.25;
  tc.progress_csv = csv.string();
  TrainResult a = train_model(cfg, pairs, tc);
  TrainResult b = train_model(cfg, pairs, tc);
  REQUIRE(a.epochs.size() == 12);
  REQUIRE(b.epochs.size() == 12);
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    CHECK(a.epochs[e].train_loss == b.epochs[e].train_loss);
    CHECK(a.epochs[e].val_loss == b.epochs[e].val_loss);
    CHECK(std::isfinite(a.epochs[e].train_loss));
    CHECK(a.epochs[e].kl >= 0.0);
  }
  CHECK(a.best_epoch == b.best_epoch);
  for (std::size_t i = 0; i < a.weights.layers.size(); ++i)
    CHECK((a.weights.layers[i].w.value == b.weights.layers[i].w.value).all());
  CHECK(a.epochs.back().train_loss < a.epochs.front().train_loss);

  std::ifstream is(csv);
  REQUIRE(is.good());
  std::string line;
  std::getline(is, line);
  CHECK(line == "epoch,train_loss,val_loss,recon,kl");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("exploding weights raise a structured divergence error") {
  VaeConfig cfg = small_config(ModelKind::deterministic);
  const std::vector<data::Dataset> sets = {random_dataset(16, 16, 4, 71)};
  data::TrainingPairs pairs(&sets, data::compute_norm_stats(sets[0]));
  ModelWeights w = init_weights(cfg, pairs.stats());
  w.layer("dec_out").b.value.setConstant(1e200);
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 2;
  CHECK_THROWS_WITH_AS(continue_training(w, pairs, tc),
                       doctest::Contains("training diverged at epoch 1"),
                       NumericalError);
}

TEST_CASE("transfer freeze exposes only the bottleneck-adjacent layers") {
  VaeConfig cfg = small_config(ModelKind::vae);
  ModelWeights w = init_weights(cfg, data::NormStats{});
  apply_transfer_freeze(w);
  for (const char* name : {"enc3", "mu", "logvar", "dec_fc", "dec1"}) {
    CHECK(w.layer(name).w.trainable);
    CHECK(w.layer(name).b.trainable);
  }
  for (const char* name : {"enc1", "enc2", "dec2", "dec3", "dec_out"}) {
    CHECK(!w.layer(name).w.trainable);
    CHECK(!w.layer(name).b.trainable);
  }
  VaeConfig dcfg = small_config(ModelKind::deterministic);
  ModelWeights wd = init_weights(dcfg, data::NormStats{});
  apply_transfer_freeze(wd);  // must tolerate the missing spread head
  CHECK(wd.layer("mu").w.trainable);
  CHECK(!wd.layer("enc1").w.trainable);
}

TEST_CASE("transfer retraining moves only unfrozen layers and swaps stats") {
  VaeConfig cfg = small_config(ModelKind::vae);
  const std::vector<data::Dataset> pre_sets = {random_dataset(16, 16, 6, 81)};
  data::TrainingPairs pre_pairs(&pre_sets,
                                data::compute_norm_stats(pre_sets[0]));
  TrainConfig tc;
  tc.epochs = 4;
  tc.batch_size = 2;
  tc.lr = 1e-3;
  tc.seed = 7;
  ModelWeights pretrained = train_model(cfg, pre_pairs, tc).weights;

  const std::vector<data::Dataset> obs_sets = {random_dataset(16, 16, 6, 91)};
  data::NormStats obs_stats = data::compute_norm_stats(obs_sets[0]);
  data::TrainingPairs obs_pairs(&obs_sets, obs_stats);

  TrainConfig zero = tc;
  zero.epochs = 0;
  ModelWeights unchanged = transfer_retrain(pretrained, obs_pairs, zero);
  CHECK(unchanged.stats.mean == obs_stats.mean);
  CHECK(unchanged.stats.std == obs_stats.std);
  for (std::size_t i = 0; i < pretrained.layers.size(); ++i)
    CHECK((unchanged.layers[i].w.value == pretrained.layers[i].w.value).all());

  TrainConfig ttc = tc;
  ttc.epochs = 3;
  ttc.seed = 11;
  ModelWeights tuned = transfer_retrain(pretrained, obs_pairs, ttc);
  for (const char* name : {"enc1", "enc2", "dec2", "dec3", "dec_out"}) {
    CHECK((tuned.layer(name).w.value == pretrained.layer(name).w.value).all());
    CHECK((tuned.layer(name).b.value == pretrained.layer(name).b.value).all());
  }
  bool moved = false;
  for (const char* name : {"enc3", "mu", "logvar", "dec_fc", "dec1"})
    if (!(tuned.layer(name).w.value == pretrained.layer(name).w.value).all())
      moved = true;
  CHECK(moved);
}

TEST_CASE("weights survive a save/load round trip") {
  VaeConfig cfg = small_config(ModelKind::vae);
  data::NormStats stats;
  stats.mean = {1.25, -0.5};
  stats.std = {2.0, 0.75};
  ModelWeights w = init_weights(cfg, stats);
  apply_transfer_freeze(w);  // exercise the trainable flag on disk

  const fs::path p1 = scratch_dir() / "w1.qgw";
  const fs::path p2 = scratch_dir() / "w2.qgw";
  save_weights(p1.string(), w);
  ModelWeights r = load_weights(p1.string());
  CHECK(r.config.ny == cfg.ny);
  CHECK(r.config.nx == cfg.nx);
  CHECK(r.config.filters == cfg.filters);
  CHECK(r.config.latent_dim == cfg.latent_dim);
  CHECK(r.config.kl_weight == cfg.kl_weight);
  CHECK(r.config.seed == cfg.seed);
  CHECK(r.config.kind == cfg.kind);
  CHECK(r.stats.mean == stats.mean);
  CHECK(r.stats.std == stats.std);
  REQUIRE(r.layers.size() == w.layers.size());
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    CHECK(r.layers[i].name == w.layers[i].name);
    CHECK(r.layers[i].w.trainable == w.layers[i].w.trainable);
    CHECK(r.layers[i].w.shape == w.layers[i].w.shape);
    for (Eigen::Index j = 0; j < w.layers[i].w.value.size(); ++j)
      CHECK(r.layers[i].w.value[j] ==
            static_cast<double>(static_cast<float>(w.layers[i].w.value[j])));
  }

  // Values quantize to 32-bit floats once; a second trip is byte-identical.
  save_weights(p2.string(), r);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  ModelWeights r2 = load_weights(p2.string());
  for (std::size_t i = 0; i < r.layers.size(); ++i)
    CHECK((r2.layers[i].w.value == r.layers[i].w.value).all());
}

TEST_CASE("weights loader reports structured errors") {
  const fs::path dir = scratch_dir();
  CHECK_THROWS_AS(load_weights((dir / "absent.qgw").string()), IoError);

  const fs::path bad = dir / "bad_magic.qgw";
  {
    std::ofstream os(bad, std::ios::binary);
    os << "NOPEnot a weights file";
  }
  CHECK_THROWS_WITH_AS(load_weights(bad.string()),
                       doctest::Contains("bad magic"), IoError);

  VaeConfig cfg = small_config(ModelKind::vae);
  ModelWeights w = init_weights(cfg, data::NormStats{});
  const fs::path good = dir / "good.qgw";
  save_weights(good.string(), w);
  const fs::path cut = dir / "truncated.qgw";
  {
    std::ifstream is(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() - 64);
    std::ofstream os(cut, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_WITH_AS(load_weights(cut.string()),
                       doctest::Contains("truncated weights file"), IoError);

  const fs::path wrong_kind = dir / "wrong_kind.qgw";
  {
    std::ifstream is(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    bytes[4] = 9;  // model kind field
    std::ofstream os(wrong_kind, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_WITH_AS(load_weights(wrong_kind.string()),
                       doctest::Contains("unknown model kind"), IoError);
}
