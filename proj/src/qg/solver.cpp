#include "qgvae/qg/solver.hpp"

#include <cmath>
#include <sstream>

#include "qgvae/common.hpp"

namespace qgvae::qg {

namespace {

// Layer sign (-1)^j for j in {1, 2} mapped to indices {0, 1}.
constexpr double kLayerSign[2] = {-1.0, 1.0};

void require_finite(const SpectralState& state, const char* where) {
  for (int j = 0; j < 2; ++j) {
    if (!state.q_hat[j].allFinite()) {
      std::ostringstream os;
      os << where << ": non-finite PV in layer " << (j + 1) << " at t = "
         << state.time;
      throw NumericalError(os.str());
    }
  }
}

}  // namespace

Eigen::ArrayXd equilibrium_profile(const QgParams& params) {
  const int ny = params.ny;
  const double dy = params.ly / ny;
  Eigen::ArrayXd psi_r(ny);
  for (int j = 0; j < ny; ++j) {
    double y = -0.5 * params.ly + j * dy;
    psi_r[j] = -params.sigma * std::tanh(y / params.sigma);
  }
  psi_r -= psi_r.mean();
  return psi_r;
}

Eigen::ArrayXd sponge_profile(const QgParams& params) {
  const int ny = params.ny;
  const double dy = params.ly / ny;
  const double width = params.sponge.width_fraction * params.ly;
  Eigen::ArrayXd r = Eigen::ArrayXd::Zero(ny);
  if (params.sponge.max_rate <= 0.0 || width <= 0.0) return r;
  for (int j = 0; j < ny; ++j) {
    double y = -0.5 * params.ly + j * dy;
    double d = 0.5 * params.ly - std::abs(y);  // distance to nearest wall
    if (d < width) {
      double c = std::cos(0.5 * M_PI * d / width);
      r[j] = params.sponge.max_rate * c * c;
    }
  }
  return r;
}

QgModel::QgModel(const QgParams& params)
    : params_(validated(params)),
      tf_(params_.nx, params_.ny, params_.lx, params_.ly) {
  const int nxr = params_.nx_r();
  const int ny = params_.ny;

  // Relaxation target: the y-profile lives on the kx = 0 line. Band-limit
  // it so the dynamics stay inside the retained set.
  GridField psir_grid(params_.nx, ny);
  Eigen::ArrayXd profile = equilibrium_profile(params_);
  for (int j = 0; j < ny; ++j) psir_grid.col(j).setConstant(profile[j]);
  SpecField psir_hat = tf_.forward(psir_grid);
  psir_hat *= tf_.dealias_mask();
  psi_r_hat_ = psir_hat.row(0);

  sponge_ = qgvae::qg::sponge_profile(params_);

  const Eigen::ArrayXXd& k2 = tf_.k2();
  k8_ = k2 * k2 * k2 * k2;
  e1_ = (-params_.nu * k8_ * params_.dt_n).exp();
  e2_ = e1_ * e1_;

  inv_det_.resize(nxr, ny);
  kp1_inv_det_.resize(nxr, ny);
  for (int j = 0; j < ny; ++j) {
    for (int k = 0; k < nxr; ++k) {
      double kk = k2(k, j);
      double det = kk * (kk + 2.0);
      double inv = (det > 0.0) ? 1.0 / det : 0.0;
      inv_det_(k, j) = inv;
      kp1_inv_det_(k, j) = (kk + 1.0) * inv;
    }
  }
}

LayerPair pv_from_streamfunction(const LayerPair& psi_hat, const QgModel& m) {
  const Eigen::ArrayXXd& k2 = m.transform().k2();
  SpecField shear = psi_hat[0] - psi_hat[1];
  LayerPair q;
  for (int j = 0; j < 2; ++j)
    q[j] = -k2 * psi_hat[j] + kLayerSign[j] * shear;
  return q;
}

LayerPair invert_pv(const LayerPair& q_hat, const QgModel& m) {
  for (int j = 0; j < 2; ++j)
    if (!q_hat[j].allFinite())
      throw NumericalError("invert_pv: non-finite input in layer " +
                           std::to_string(j + 1));
  LayerPair psi;
  psi[0] = -m.kp1_inv_det_ * q_hat[0] - m.inv_det_ * q_hat[1];
  psi[1] = -m.inv_det_ * q_hat[0] - m.kp1_inv_det_ * q_hat[1];
  return psi;
}

SpecField jacobian(const SpecField& a_hat, const SpecField& b_hat, QgModel& m) {
  SpectralTransform& tf = m.transform();
  GridField ax = tf.inverse(tf.deriv_x(a_hat));
  GridField ay = tf.inverse(tf.deriv_y(a_hat));
  GridField bx = tf.inverse(tf.deriv_x(b_hat));
  GridField by = tf.inverse(tf.deriv_y(b_hat));
  GridField prod = ax * by - ay * bx;
  SpecField out = tf.forward(prod);
  out *= tf.dealias_mask();
  out(0, 0) = 0.0;  // divergence form: the domain mean vanishes identically
  return out;
}

namespace {

LayerPair tendency_impl(const SpectralState& state, QgModel& m,
                        bool with_hyper) {
  require_finite(state, "tendency");
  const QgParams& p = m.params();
  SpectralTransform& tf = m.transform();
  const double rd = 1.0 / p.tau_d;  // zero when tau_d = +inf
  const double rf = 1.0 / p.tau_f;

  LayerPair psi = invert_pv(state.q_hat, m);
  SpecField shear = psi[0] - psi[1];
  shear.row(0) -= m.psi_r_hat().transpose();

  const bool sponge_on = (p.sponge.max_rate > 0.0);
  LayerPair out;
  for (int j = 0; j < 2; ++j) {
    SpecField t = -jacobian(psi[j], state.q_hat[j], m);
    t -= p.beta * tf.deriv_x(psi[j]);
    t -= (rd * kLayerSign[j]) * shear;
    if (j == 1) t += rf * (tf.k2() * psi[1]);
    if (sponge_on) {
      GridField qg = tf.inverse(state.q_hat[j]);
      GridField damped = qg.rowwise() * m.sponge_profile().transpose();
      SpecField sp = tf.forward(damped);
      t -= sp * tf.dealias_mask();
    }
    if (with_hyper) t -= p.nu * (m.k8() * state.q_hat[j]);
    out[j] = std::move(t);
  }
  return out;
}

}  // namespace

LayerPair tendency(const SpectralState& state, QgModel& m) {
  return tendency_impl(state, m, true);
}

LayerPair tendency_no_hyper(const SpectralState& state, QgModel& m) {
  return tendency_impl(state, m, false);
}

SpectralState step_leapfrog(const SpectralState& prev, SpectralState& curr,
                            QgModel& m) {
  const double dt = m.params().dt_n;
  const double ra = m.params().ra_coeff;
  LayerPair rhs = tendency_no_hyper(curr, m);
  SpectralState next;
  next.time = curr.time + dt;
  for (int j = 0; j < 2; ++j) {
    next.q_hat[j] =
        prev.q_hat[j] * m.hyper_factor2() + (2.0 * dt) * rhs[j] * m.hyper_factor();
    if (!next.q_hat[j].allFinite()) {
      std::ostringstream os;
      os << "solver blow-up in layer " << (j + 1) << " at t = " << next.time;
      throw NumericalError(os.str());
    }
    if (ra > 0.0)
      curr.q_hat[j] += ra * (prev.q_hat[j] - 2.0 * curr.q_hat[j] + next.q_hat[j]);
  }
  return next;
}

SpectralState step_euler(const SpectralState& state, QgModel& m) {
  const double dt = m.params().dt_n;
  LayerPair rhs = tendency_no_hyper(state, m);
  SpectralState next;
  next.time = state.time + dt;
  for (int j = 0; j < 2; ++j)
    next.q_hat[j] = (state.q_hat[j] + dt * rhs[j]) * m.hyper_factor();
  require_finite(next, "step_euler");
  return next;
}

double total_energy(const SpectralState& state, const QgModel& m) {
  const SpectralTransform& tf = m.transform();
  LayerPair psi = invert_pv(state.q_hat, m);
  SpecField shear = psi[0] - psi[1];
  double e = 0.0;
  // 0.5 k^2 |psi_j|^2 per layer plus 0.5 |psi_1 - psi_2|^2, conjugate pairs
  // counted via the Parseval weights.
  const Eigen::ArrayXXd& k2 = tf.k2();
  const Eigen::ArrayXXd& w = tf.conj_weights();
  for (int j = 0; j < 2; ++j)
    e += 0.5 * (w * k2 * psi[j].abs2()).sum();
  e += 0.5 * (w * shear.abs2()).sum();
  return e;
}

SpectralState initial_state(QgModel& m, std::uint64_t seed) {
  const QgParams& p = m.params();
  SpectralTransform& tf = m.transform();
  Eigen::ArrayXd profile = equilibrium_profile(p);
  GaussianStream noise(seed, /*stream=*/0x1C0);
  LayerPair psi_hat;
  for (int layer = 0; layer < 2; ++layer) {
    GridField g(p.nx, p.ny);
    for (int j = 0; j < p.ny; ++j)
      for (int i = 0; i < p.nx; ++i)
        g(i, j) = (layer == 0 ? profile[j] : 0.0) + 1e-3 * noise.next();
    psi_hat[layer] = tf.forward(g) * tf.dealias_mask();
  }
  SpectralState state;
  state.q_hat = pv_from_streamfunction(psi_hat, m);
  state.time = 0.0;
  return state;
}

GridSnapshot snapshot_from_state(const SpectralState& state, QgModel& m) {
  LayerPair psi = invert_pv(state.q_hat, m);
  GridSnapshot snap;
  snap.time = state.time;
  for (int j = 0; j < 2; ++j) {
    GridField g = m.transform().inverse(psi[j]);  // (nx, ny)
    snap.psi[j] = g.transpose().cast<float>();    // (ny, nx)
  }
  return snap;
}

void run_with_callback(const QgParams& raw, std::uint64_t seed,
                       int spinup_days, int record_days, int sample_every,
                       const std::function<void(const GridSnapshot&)>& on_sample) {
  if (sample_every < 1) throw ConfigError("sample_every must be >= 1");
  if (spinup_days < 0 || record_days < 0)
    throw ConfigError("spinup_days and record_days must be >= 0");
  QgModel m(raw);
  const QgParams& p = m.params();
  const int spd = p.steps_per_day();
  const long spinup_steps = static_cast<long>(spinup_days) * spd;
  const long record_steps = static_cast<long>(record_days) * spd;
  const long total_steps = spinup_steps + record_steps;
  const double dt_sample = sample_every * p.dt_n;
  // First recorded frame sits one sampling interval past spinup; later
  // frames use the same first_time + k*dt_sample expression the file reader
  // uses, so timestamps survive a round trip bit-exactly.
  const double first_time = spinup_steps * p.dt_n + dt_sample;

  SpectralState curr = initial_state(m, seed);
  if (total_steps == 0) return;
  SpectralState prev = curr;
  curr = step_euler(prev, m);

  long emitted = 0;
  for (long step = 1; step <= total_steps; ++step) {
    if (step > 1) {
      SpectralState next = step_leapfrog(prev, curr, m);
      prev = std::move(curr);
      curr = std::move(next);
    }
    if (step > spinup_steps && (step - spinup_steps) % sample_every == 0) {
      GridSnapshot snap = snapshot_from_state(curr, m);
      snap.time = first_time + emitted * dt_sample;
      ++emitted;
      on_sample(snap);
    }
  }
}

data::Dataset run_simulation(const QgParams& params, std::uint64_t seed,
                             int spinup_days, int record_days, int sample_every,
                             data::SystemTag tag, std::uint32_t ensemble_id) {
  data::Dataset ds;
  QgParams resolved = validated(params);
  ds.header.ny = resolved.ny;
  ds.header.nx = resolved.nx;
  ds.header.dt_sample = sample_every * resolved.dt_n;
  ds.header.solver_params = resolved;
  ds.header.system_tag = tag;
  ds.header.ensemble_id = ensemble_id;
  ds.header.noise_eta = 0.0;
  ds.header.t0 = static_cast<double>(spinup_days) * resolved.steps_per_day() *
                     resolved.dt_n +
                 ds.header.dt_sample;
  run_with_callback(resolved, seed, spinup_days, record_days, sample_every,
                    [&ds](const GridSnapshot& s) { ds.frames.push_back(s); });
  ds.header.nt = ds.frames.size();
  return ds;
}

}  // namespace qgvae::qg
