#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <vector>

#include "qgvae/common.hpp"
#include "qgvae/data/dataset.hpp"
#include "qgvae/eval/metrics.hpp"

using namespace qgvae;
using namespace qgvae::eval;

namespace {

GridSnapshot random_snapshot(int ny, int nx, std::uint64_t seed) {
  GaussianStream g(seed, 0xACC);
  GridSnapshot s;
  for (auto& plane : s.psi) {
    plane.resize(ny, nx);
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) plane(y, x) = static_cast<float>(g.next());
  }
  return s;
}

Eigen::ArrayXXd random_field(int ny, int nx, std::uint64_t seed) {
  GaussianStream g(seed, 0xF1E);
  Eigen::ArrayXXd f(ny, nx);
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) f(y, x) = 0.3 * g.next();
  return f;
}

double brute_acc(const GridSnapshot& f, const GridSnapshot& o,
                 const Eigen::ArrayXXd& clim) {
  double num = 0.0, d1 = 0.0, d2 = 0.0;
  for (int y = 0; y < f.ny(); ++y)
    for (int x = 0; x < f.nx(); ++x) {
      const double a = static_cast<double>(f.psi[0](y, x)) - clim(y, x);
      const double b = static_cast<double>(o.psi[0](y, x)) - clim(y, x);
      num += a * b;
      d1 += a * a;
      d2 += b * b;
    }
  return num / std::sqrt(d1 * d2);
}

double brute_rmse(const GridSnapshot& f, const GridSnapshot& o) {
  double s = 0.0;
  for (int y = 0; y < f.ny(); ++y)
    for (int x = 0; x < f.nx(); ++x) {
      const double d =
          static_cast<double>(f.psi[0](y, x)) - static_cast<double>(o.psi[0](y, x));
      s += d * d;
    }
  return std::sqrt(s / (static_cast<double>(f.ny()) * f.nx()));
}

}  // namespace

TEST_CASE("anomaly correlation matches a brute-force reference on random input") {
  const int ny = 16, nx = 12;
  for (std::uint64_t trial = 0; trial < 120; ++trial) {
    const GridSnapshot f = random_snapshot(ny, nx, 1000 + trial);
    const GridSnapshot o = random_snapshot(ny, nx, 2000 + trial);
    const Eigen::ArrayXXd clim = random_field(ny, nx, 3000 + trial);
    const double got = acc(f, o, clim);
    const double want = brute_acc(f, o, clim);
    CHECK(std::abs(got - want) < 1e-12);
    CHECK(got >= -1.0 - 1e-12);
    CHECK(got <= 1.0 + 1e-12);
  }
}

TEST_CASE("anomaly correlation: identity, mirroring, and scale invariance") {
  const int ny = 16, nx = 12;
  const Eigen::ArrayXXd zero_clim = Eigen::ArrayXXd::Zero(ny, nx);
  const GridSnapshot f = random_snapshot(ny, nx, 7);

  CHECK(acc(f, f, zero_clim) == doctest::Approx(1.0).epsilon(1e-12));

  GridSnapshot neg = f;
  neg.psi[0] = -f.psi[0];
  CHECK(acc(f, neg, zero_clim) == doctest::Approx(-1.0).epsilon(1e-12));

  // Scaling an anomaly by a power of two is exact in floating point and must
  // leave the correlation untouched.
  GridSnapshot scaled = f;
  scaled.psi[0] = 4.0f * f.psi[0];
  const GridSnapshot o = random_snapshot(ny, nx, 8);
  CHECK(acc(scaled, o, zero_clim) ==
        doctest::Approx(acc(f, o, zero_clim)).epsilon(1e-12));

  GridSnapshot flat = f;
  flat.psi[0].setZero();
  CHECK_THROWS_AS(acc(flat, o, zero_clim), NumericalError);

  GridSnapshot small = random_snapshot(8, 8, 9);
  CHECK_THROWS_AS(acc(small, o, zero_clim), ShapeError);
}

TEST_CASE("root-mean-square error matches a brute-force reference") {
  const int ny = 16, nx = 12;
  for (std::uint64_t trial = 0; trial < 120; ++trial) {
    const GridSnapshot f = random_snapshot(ny, nx, 4000 + trial);
    const GridSnapshot o = random_snapshot(ny, nx, 5000 + trial);
    CHECK(std::abs(rmse(f, o) - brute_rmse(f, o)) < 1e-12);
  }

  GridSnapshot zero = random_snapshot(ny, nx, 10);
  zero.psi[0].setZero();
  GridSnapshot offset = zero;
  offset.psi[0].setConstant(0.5f);
  CHECK(rmse(offset, zero) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rmse(zero, zero) == 0.0);

  // Triangle inequality on the psi_1 planes.
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    const GridSnapshot a = random_snapshot(ny, nx, 6000 + trial);
    const GridSnapshot b = random_snapshot(ny, nx, 7000 + trial);
    const GridSnapshot c = random_snapshot(ny, nx, 8000 + trial);
    CHECK(rmse(a, c) <= rmse(a, b) + rmse(b, c) + 1e-12);
  }
}

TEST_CASE("prediction horizon is the last lead before the skill crossing") {
  SkillSeries s;
  s.lead_times = {40, 80, 120};
  s.acc = {0.9, 0.7, 0.55};
  s.rmse = {0.1, 0.2, 0.3};
  Horizon h = prediction_horizon(s, 0.60);
  CHECK(h.lead == 80);
  CHECK(!h.never_crossed);

  s.acc = {0.9, 0.8, 0.7};
  h = prediction_horizon(s, 0.60);
  CHECK(h.lead == 120);
  CHECK(h.never_crossed);

  s.acc = {0.5, 0.4, 0.3};
  h = prediction_horizon(s, 0.60);
  CHECK(h.lead == 0);
  CHECK(!h.never_crossed);

  s.acc = {0.60, 0.5, 0.4};  // exactly at threshold counts as crossed
  h = prediction_horizon(s, 0.60);
  CHECK(h.lead == 0);

  SkillSeries empty;
  CHECK_THROWS_AS(prediction_horizon(empty, 0.6), ShapeError);
  SkillSeries bad;
  bad.lead_times = {40, 40};
  bad.acc = {0.9, 0.8};
  CHECK_THROWS_AS(prediction_horizon(bad, 0.6), ShapeError);
}

TEST_CASE("prediction horizon agrees with a direct scan on random series") {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    GaussianStream g(9000 + trial, 0x40);
    SkillSeries s;
    double level = 1.0;
    for (int i = 0; i < 12; ++i) {
      s.lead_times.push_back((i + 1) * 40);
      level -= 0.005 + 0.12 * std::abs(g.next());
      s.acc.push_back(level);
      s.rmse.push_back(1.0 - level);
    }
    const double thr = 0.6;
    Horizon h = prediction_horizon(s, thr);
    int want = 0;
    bool crossed = s.acc[0] <= thr;
    if (!crossed) {
      want = s.lead_times.back();
      for (std::size_t i = 1; i < s.acc.size(); ++i)
        if (s.acc[i] <= thr) {
          want = s.lead_times[i - 1];
          break;
        }
      crossed = s.acc.back() <= thr;
    }
    CHECK(h.lead == want);
    CHECK(h.never_crossed == !crossed);
  }
}

TEST_CASE("windowed error averages exactly the leads inside the window") {
  SkillSeries s;
  for (int i = 0; i < 10; ++i) {
    s.lead_times.push_back((i + 1) * 40);  // 40 .. 400 solver steps
    s.acc.push_back(0.9);
    s.rmse.push_back(static_cast<double>(i + 1));
  }
  // Two days = 400 steps: all ten leads participate.
  CHECK(windowed_error(s, 2.0) == doctest::Approx(5.5).epsilon(1e-15));
  // One day = 200 steps: the first five leads participate.
  CHECK(windowed_error(s, 1.0) == doctest::Approx(3.0).epsilon(1e-15));

  SkillSeries flat = s;
  for (double& r : flat.rmse) r = 0.37;
  CHECK(windowed_error(flat, 2.0) == doctest::Approx(0.37).epsilon(1e-15));

  SkillSeries shrt;
  for (int i = 0; i < 9; ++i) {
    shrt.lead_times.push_back((i + 1) * 40);
    shrt.acc.push_back(0.9);
    shrt.rmse.push_back(1.0);
  }
  CHECK_THROWS_AS(windowed_error(shrt, 2.0), ShapeError);
}

TEST_CASE("zonal mean velocity recovers analytic derivatives") {
  const int ny = 64, nx = 16;
  const double ly = 68.0;
  data::Dataset ds;
  ds.header.nt = 2;
  ds.header.ny = ny;
  ds.header.nx = nx;
  ds.header.solver_params.nx = nx;
  ds.header.solver_params.ny = ny;
  ds.header.solver_params.lx = 46.0;
  ds.header.solver_params.ly = ly;

  GridSnapshot s;
  for (auto& plane : s.psi) plane.resize(ny, nx);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double phase = 2.0 * M_PI * iy / ny;
      // psi_1 carries a meridional mode plus an x-mode that must average out.
      s.psi[0](iy, ix) = static_cast<float>(
          std::cos(phase) + 0.5 * std::sin(2.0 * M_PI * ix / nx));
      s.psi[1](iy, ix) = 0.75f;  // constant: zero velocity
    }
  ds.frames = {s, s};

  const auto u = zonal_mean_velocity(ds);
  const double k = 2.0 * M_PI / ly;
  for (int iy = 0; iy < ny; ++iy) {
    const double want = k * std::sin(2.0 * M_PI * iy / ny);
    CHECK(u[0][iy] == doctest::Approx(want).epsilon(1e-5));
    CHECK(std::abs(u[1][iy]) < 1e-12);
  }

  data::Dataset empty = ds;
  empty.frames.clear();
  CHECK_THROWS_AS(zonal_mean_velocity(empty), IoError);
}

TEST_CASE("spectral velocity agrees with centered finite differences") {
  const int ny = 128, nx = 8;
  const double ly = 68.0;
  data::Dataset ds;
  ds.header.nt = 1;
  ds.header.ny = ny;
  ds.header.nx = nx;
  ds.header.solver_params.nx = nx;
  ds.header.solver_params.ny = ny;
  ds.header.solver_params.lx = 46.0;
  ds.header.solver_params.ly = ly;

  GridSnapshot s;
  for (auto& plane : s.psi) plane = Eigen::ArrayXXf::Zero(ny, nx);
  std::vector<double> zpsi(ny);
  for (int iy = 0; iy < ny; ++iy) {
    const double phase = 2.0 * M_PI * iy / ny;
    zpsi[iy] = 1.3 * std::cos(phase) + 0.4 * std::cos(2.0 * phase + 0.7);
    for (int ix = 0; ix < nx; ++ix)
      s.psi[0](iy, ix) = static_cast<float>(zpsi[iy]);
  }
  s.psi[1] = s.psi[0];
  ds.frames = {s};

  const auto u = zonal_mean_velocity(ds);
  const double dy = ly / ny;
  double umax = 0.0;
  for (int iy = 0; iy < ny; ++iy) umax = std::max(umax, std::abs(u[0][iy]));
  for (int iy = 0; iy < ny; ++iy) {
    const double fd =
        -(zpsi[(iy + 1) % ny] - zpsi[(iy + ny - 1) % ny]) / (2.0 * dy);
    CHECK(std::abs(u[0][iy] - fd) < 5e-3 * umax);
  }
}

TEST_CASE("leading empirical mode of a rank-one series is its pattern") {
  const int T = 40, ny = 12;
  GaussianStream g(31, 0xE0F);
  Eigen::VectorXd p(ny);
  for (int i = 0; i < ny; ++i) p[i] = g.next();
  p.normalize();
  Eigen::MatrixXd series(T, ny);
  for (int t = 0; t < T; ++t) {
    const double a = g.next();
    for (int i = 0; i < ny; ++i) series(t, i) = 2.0 + a * p[i];
  }
  Eof e = eof1(series);
  CHECK(e.explained == doctest::Approx(1.0).epsilon(1e-9));
  const double cosine = std::abs((e.pattern * p.array()).sum());
  CHECK(cosine == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(e.pattern.matrix().norm() - 1.0) < 1e-9);
  Eigen::Index imax = 0;
  e.pattern.abs().maxCoeff(&imax);
  CHECK(e.pattern[imax] > 0.0);
}

TEST_CASE("leading empirical mode matches a dense eigensolver on random data") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const int T = 50, ny = 16;
    GaussianStream g(50 + trial, 0xE1F);
    Eigen::MatrixXd series(T, ny);
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < ny; ++i) series(t, i) = g.next();

    Eof e = eof1(series);

    const Eigen::RowVectorXd mean = series.colwise().mean();
    const Eigen::MatrixXd centered = series.rowwise() - mean;
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(T);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd top = es.eigenvectors().col(ny - 1);
    const double lmax = es.eigenvalues()[ny - 1];

    const double cosine = std::abs((e.pattern * top.array()).sum());
    CHECK(cosine > 1.0 - 1e-6);
    CHECK(e.explained == doctest::Approx(lmax / cov.trace()).epsilon(1e-9));
    CHECK(e.explained > 0.0);
    CHECK(e.explained <= 1.0 + 1e-12);
  }
}

TEST_CASE("empirical mode is invariant to shuffling the time samples") {
  const int T = 30, ny = 10;
  GaussianStream g(61, 0xE2F);
  Eigen::MatrixXd series(T, ny);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < ny; ++i) series(t, i) = g.next();
  Eigen::MatrixXd shuffled(T, ny);
  for (int t = 0; t < T; ++t) shuffled.row(t) = series.row((t * 7 + 3) % T);

  Eof a = eof1(series);
  Eof b = eof1(shuffled);
  const double cosine = (a.pattern * b.pattern).sum();
  CHECK(cosine == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(a.explained == doctest::Approx(b.explained).epsilon(1e-8));
}

TEST_CASE("empirical mode flags degenerate leading pairs and bad input") {
  const int ny = 8;
  Eigen::VectorXd p1 = Eigen::VectorXd::Zero(ny), p2 = Eigen::VectorXd::Zero(ny);
  p1[0] = 1.0;
  p2[3] = 1.0;
  const int T = 64;
  Eigen::MatrixXd series(T, ny);
  for (int t = 0; t < T; ++t) {
    const double w = 2.0 * M_PI * t / T;
    series.row(t) =
        (std::cos(w) * p1 + std::sin(w) * p2).transpose();  // equal variance
  }
  Eof e = eof1(series);
  CHECK(e.degenerate_pair);

  Eigen::MatrixXd one_row(1, ny);
  one_row.setZero();
  CHECK_THROWS_AS(eof1(one_row), ShapeError);
  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(5, ny, 3.0);
  CHECK_THROWS_AS(eof1(constant), NumericalError);
}

TEST_CASE("climate accumulator tracks extrema, counts, and finiteness") {
  ClimateAccumulator acc(8, 8, 46.0, 68.0);
  CHECK(acc.frames() == 0);
  CHECK_THROWS_AS(acc.finalize(), ConfigError);

  GridSnapshot a = random_snapshot(8, 8, 71);
  a.psi[0](0, 0) = -9.0f;
  a.psi[0](1, 1) = 11.0f;
  acc.add(a);
  CHECK(acc.frames() == 1);
  CHECK(acc.min_value(0) == -9.0);
  CHECK(acc.max_value(0) == 11.0);
  CHECK(acc.all_finite());

  GridSnapshot nan_snap = random_snapshot(8, 8, 72);
  nan_snap.psi[1](2, 2) = std::numeric_limits<float>::quiet_NaN();
  acc.add(nan_snap);
  CHECK(!acc.all_finite());

  GridSnapshot wrong = random_snapshot(4, 8, 73);
  CHECK_THROWS_AS(acc.add(wrong), ShapeError);

  acc.mark_blowup(17);
  CHECK(acc.blowup_day() == 17);
}

TEST_CASE("drift audit scores grow with the perturbation and respect signs") {
  const int ny = 12;
  GaussianStream g(81, 0xD1F);
  Climatology ref;
  ref.zonal_mean_psi1.resize(ny);
  for (int i = 0; i < ny; ++i) ref.zonal_mean_psi1[i] = g.next();
  for (int c = 0; c < 2; ++c) {
    ref.zonal_mean_u[c].resize(ny);
    for (int i = 0; i < ny; ++i) ref.zonal_mean_u[c][i] = g.next();
  }
  ref.eof1_u1.pattern.resize(ny);
  for (int i = 0; i < ny; ++i) ref.eof1_u1.pattern[i] = g.next();
  ref.eof1_u1.pattern /= std::sqrt(ref.eof1_u1.pattern.square().sum());

  auto perturbed = [&](double amp, std::uint64_t seed) {
    Climatology c = ref;
    GaussianStream n(seed, 0xD2F);
    for (int i = 0; i < ny; ++i) c.zonal_mean_psi1[i] += amp * n.next();
    for (int ch = 0; ch < 2; ++ch)
      for (int i = 0; i < ny; ++i) c.zonal_mean_u[ch][i] += amp * n.next();
    for (int i = 0; i < ny; ++i) c.eof1_u1.pattern[i] += amp * n.next();
    c.eof1_u1.pattern /= std::sqrt(c.eof1_u1.pattern.square().sum());
    return c;
  };

  DriftReport self = drift_audit(ref, ref);
  CHECK(self.rmse_zonal_psi1 == 0.0);
  CHECK(self.rmse_u1 == 0.0);
  CHECK(self.eof_cosine == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(self.finite);

  DriftReport small = drift_audit(perturbed(0.01, 5), ref);
  DriftReport large = drift_audit(perturbed(0.5, 5), ref);
  CHECK(small.rmse_u1 > 0.0);
  CHECK(large.rmse_u1 > small.rmse_u1);
  CHECK(large.rmse_zonal_psi1 > small.rmse_zonal_psi1);
  CHECK(small.eof_cosine > large.eof_cosine);

  Climatology blown = ref;
  blown.blowup_day = 3;
  DriftReport rep = drift_audit(blown, ref);
  CHECK(rep.blowup_day == 3);
  CHECK(!rep.finite);
}

TEST_CASE("lead-indexed skill verifies against the frames after the start") {
  const int ny = 12, nx = 8;
  data::Dataset truth;
  truth.header.nt = 10;
  truth.header.ny = ny;
  truth.header.nx = nx;
  for (int t = 0; t < 10; ++t)
    truth.frames.push_back(random_snapshot(ny, nx, 900 + t));

  std::vector<GridSnapshot> forecast;
  for (int i = 0; i < 3; ++i)
    forecast.push_back(random_snapshot(ny, nx, 950 + i));
  const Eigen::ArrayXXd clim = random_field(ny, nx, 99);

  SkillSeries s = skill_against_truth(forecast, truth, 2, clim, 50);
  REQUIRE(s.lead_times.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(s.lead_times[i] == (i + 1) * 50);
    CHECK(s.acc[i] == acc(forecast[i], truth.frames[3 + i], clim));
    CHECK(s.rmse[i] == rmse(forecast[i], truth.frames[3 + i]));
  }

  CHECK_THROWS_AS(skill_against_truth(forecast, truth, 8, clim, 50),
                  ShapeError);
}
