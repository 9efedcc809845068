#include "qgvae/cli/commands.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qgvae/common.hpp"
#include "qgvae/data/dataset.hpp"
#include "qgvae/eval/metrics.hpp"
#include "qgvae/forecast/climate.hpp"
#include "qgvae/forecast/rollout.hpp"
#include "qgvae/io/config.hpp"
#include "qgvae/io/csv.hpp"
#include "qgvae/io/svg.hpp"
#include "qgvae/model/training.hpp"
#include "qgvae/model/weights_io.hpp"
#include "qgvae/qg/solver.hpp"

namespace fs = std::filesystem;

namespace qgvae::cli {

namespace {

io::RunConfig load_config(const std::string& path) {
  if (path.empty()) return io::RunConfig{};
  return io::parse_config_file(path);
}

// Resolved-config snapshot goes next to the command's primary output.
void snapshot_config(const io::RunConfig& cfg, const std::string& out_path,
                     bool out_is_dir, const std::string& cmd) {
  fs::path dir = out_is_dir ? fs::path(out_path) : fs::path(out_path).parent_path();
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  io::write_resolved_config((dir / ("resolved_" + cmd + ".ini")).string(), cfg);
}

std::vector<data::Dataset> read_datasets(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const std::string& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> inside;
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".qgd") inside.push_back(e.path().string());
      std::sort(inside.begin(), inside.end());
      files.insert(files.end(), inside.begin(), inside.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw IoError("no dataset files given");
  std::vector<data::Dataset> out;
  out.reserve(files.size());
  for (const std::string& f : files) out.push_back(data::read_dataset(f));
  return out;
}

Eigen::ArrayXXd mean_psi1(const data::Dataset& ds) {
  if (ds.frames.empty()) throw IoError("cannot average an empty dataset");
  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(ds.header.ny, ds.header.nx);
  for (const GridSnapshot& f : ds.frames) sum += f.psi[0].cast<double>();
  return sum / static_cast<double>(ds.frames.size());
}

data::Dataset trajectory_dataset(const std::vector<GridSnapshot>& frames,
                                 const data::DatasetHeader& like) {
  data::Dataset out;
  out.header = like;
  out.header.nt = frames.size();
  out.header.t0 = frames.empty() ? 0.0 : frames.front().time;
  out.frames = frames;
  return out;
}

int whole_days(double days, const char* what) {
  if (!(days >= 0.0) || days != std::floor(days))
    throw ConfigError(std::string(what) + " must be a non-negative whole number of days");
  return static_cast<int>(days);
}

void cmd_simulate(const io::RunConfig& cfg, const std::string& system,
                  const std::string& out_prefix, int n_ensembles) {
  if (n_ensembles < 1) throw ConfigError("--ensembles must be >= 1");
  qg::QgParams p = cfg.solver.params;
  data::SystemTag tag = data::SystemTag::perfect;
  if (system == "imperfect") {
    p = qg::make_imperfect(p, cfg.imperfect.beta_factor, cfg.imperfect.sigma_factor);
    tag = data::SystemTag::imperfect;
  } else if (system != "perfect") {
    throw ConfigError("--system must be 'perfect' or 'imperfect'");
  }
  snapshot_config(cfg, out_prefix, false, "simulate");
  for (int e = 0; e < n_ensembles; ++e) {
    data::Dataset ds = qg::run_simulation(
        p, cfg.solver.seed + static_cast<std::uint64_t>(e),
        whole_days(cfg.solver.spinup_days, "spinup_days"),
        whole_days(cfg.solver.record_days, "record_days"),
        cfg.solver.sample_every, tag, static_cast<std::uint32_t>(e));
    const std::string path = out_prefix + "_e" + std::to_string(e) + ".qgd";
    data::write_dataset(path, ds);
    std::cout << "wrote " << path << " (" << ds.frames.size() << " frames)\n";
  }
}

void cmd_train(const io::RunConfig& cfg, const std::string& model,
               const std::vector<std::string>& data_paths,
               const std::string& out) {
  std::vector<data::Dataset> sets = read_datasets(data_paths);
  data::NormStats stats = data::compute_norm_stats(sets);
  data::TrainingPairs pairs(&sets, stats);

  model::VaeConfig mc;
  mc.ny = static_cast<int>(sets[0].header.ny);
  mc.nx = static_cast<int>(sets[0].header.nx);
  mc.filters = cfg.training.filters;
  mc.latent_dim = cfg.training.latent_dim;
  mc.kl_weight = cfg.training.kl_weight;
  mc.seed = cfg.training.seed;
  if (model == "vae") mc.kind = model::ModelKind::vae;
  else if (model == "baseline") mc.kind = model::ModelKind::deterministic;
  else throw ConfigError("--model must be 'vae' or 'baseline'");

  model::TrainConfig tc;
  tc.epochs = cfg.training.epochs;
  tc.batch_size = cfg.training.batch;
  tc.lr = cfg.training.lr;
  tc.seed = cfg.training.seed;
  tc.progress_csv = out + ".loss.csv";

  snapshot_config(cfg, out, false, "train");
  model::TrainResult res = model::train_model(mc, pairs, tc);
  model::save_weights(out, res.weights);
  std::cout << "wrote " << out << " (best epoch " << res.best_epoch << ")\n";
}

void cmd_transfer(const io::RunConfig& cfg, const std::string& weights_in,
                  const std::string& obs_path, const std::string& out) {
  model::ModelWeights w = model::load_weights(weights_in);
  data::Dataset obs = data::read_dataset(obs_path);
  data::Dataset sub = data::subsample_observations(obs, cfg.transfer.fraction);
  data::NormStats clean_stats = data::compute_norm_stats(sub);
  data::Dataset noisy = data::add_observation_noise(sub, cfg.transfer.eta,
                                                    clean_stats, cfg.transfer.seed);
  std::vector<data::Dataset> sets;
  sets.push_back(std::move(noisy));
  data::NormStats noisy_stats = data::compute_norm_stats(sets);
  data::TrainingPairs pairs(&sets, noisy_stats);

  model::TrainConfig tc;
  tc.epochs = cfg.transfer.epochs;
  tc.batch_size = cfg.transfer.batch;
  tc.lr = cfg.transfer.lr;
  tc.seed = cfg.transfer.seed;
  tc.progress_csv = out + ".loss.csv";

  snapshot_config(cfg, out, false, "transfer");
  model::ModelWeights w2 = model::transfer_retrain(w, pairs, tc);
  model::save_weights(out, w2);
  std::cout << "wrote " << out << " (" << sub.frames.size()
            << " observation frames, eta " << cfg.transfer.eta << ")\n";
}

void cmd_forecast(const io::RunConfig& cfg, const std::string& weights_path,
                  bool numerical, const std::string& numerical_system,
                  const std::string& truth_path, const std::string& clim_path,
                  int n_ics, const std::string& out_dir) {
  data::Dataset truth = data::read_dataset(truth_path);
  Eigen::ArrayXXd clim =
      clim_path.empty() ? mean_psi1(truth) : mean_psi1(data::read_dataset(clim_path));
  const int sps = static_cast<int>(
      std::lround(truth.header.dt_sample / truth.header.solver_params.dt_n));

  forecast::ForecastConfig fc;
  fc.n_members = cfg.forecast.members;
  fc.n_steps = cfg.forecast.steps;
  fc.eta = cfg.forecast.eta;
  fc.seed = cfg.forecast.seed;
  fc.dt_sample = truth.header.dt_sample;

  if (n_ics < 1) throw ConfigError("--ics must be >= 1");
  const std::size_t nt = truth.frames.size();
  if (nt < static_cast<std::size_t>(fc.n_steps) + 2)
    throw IoError("truth dataset too short for the requested lead count");
  const std::size_t usable = nt - fc.n_steps - 1;
  const std::size_t stride = std::max<std::size_t>(1, usable / n_ics);

  model::ModelWeights w;
  data::NormStats noise_stats;
  if (!numerical) {
    w = model::load_weights(weights_path);
    noise_stats = w.stats;
  } else {
    noise_stats = data::compute_norm_stats(truth);
  }
  // The numerical baseline integrates a model of the truth: either the truth
  // system itself or its imperfect variant (already-imperfect truth is used
  // as stored rather than degraded twice).
  qg::QgParams np = truth.header.solver_params;
  if (numerical) {
    if (numerical_system == "imperfect") {
      if (truth.header.system_tag != data::SystemTag::imperfect)
        np = qg::make_imperfect(np, cfg.imperfect.beta_factor,
                                cfg.imperfect.sigma_factor);
    } else if (numerical_system != "same") {
      throw ConfigError("--numerical-system must be 'same' or 'imperfect'");
    }
  }

  fs::create_directories(out_dir);
  snapshot_config(cfg, out_dir, true, "forecast");

  std::vector<double> acc_sum(fc.n_steps, 0.0), rmse_sum(fc.n_steps, 0.0);
  io::CsvTable horizons;
  horizons.columns = {"ic", "ic_frame", "horizon_steps", "never_crossed"};
  bool wrote_traj = false;

  for (int i = 0; i < n_ics; ++i) {
    const std::size_t ic_frame = std::min(usable, static_cast<std::size_t>(i) * stride);
    GridSnapshot ic = forecast::make_noisy_ic(
        truth.frames[ic_frame], fc.eta, noise_stats,
        fc.seed + 1000ull * static_cast<std::uint64_t>(i));
    forecast::ForecastResult res;
    if (numerical) {
      res = forecast::rollout_numerical(np, ic, fc.n_steps);
    } else if (w.config.kind == model::ModelKind::vae) {
      forecast::ForecastConfig fci = fc;
      fci.seed = fc.seed + 1000ull * static_cast<std::uint64_t>(i);
      res = forecast::rollout_vae(w, ic, fci);
    } else {
      res = forecast::rollout_deterministic(w, ic, fc);
    }
    eval::SkillSeries skill =
        eval::skill_against_truth(res.mean_trajectory, truth, ic_frame, clim, sps);
    eval::Horizon h = eval::prediction_horizon(skill, cfg.evaluation.acc_threshold);
    horizons.rows.push_back({static_cast<double>(i), static_cast<double>(ic_frame),
                             static_cast<double>(h.lead),
                             h.never_crossed ? 1.0 : 0.0});
    for (std::size_t s = 0; s < skill.acc.size(); ++s) {
      acc_sum[s] += skill.acc[s];
      rmse_sum[s] += skill.rmse[s];
    }
    if (!wrote_traj) {
      data::write_dataset((fs::path(out_dir) / "forecast_mean.qgd").string(),
                          trajectory_dataset(res.mean_trajectory, truth.header));
      wrote_traj = true;
    }
  }

  io::CsvTable skill_csv;
  skill_csv.columns = {"lead_steps", "acc_mean", "rmse_mean"};
  io::LineSeries acc_line{"ACC (mean over ICs)", {}, {}};
  for (int s = 0; s < fc.n_steps; ++s) {
    const double lead = static_cast<double>((s + 1) * sps);
    const double a = acc_sum[s] / n_ics;
    skill_csv.rows.push_back({lead, a, rmse_sum[s] / n_ics});
    acc_line.x.push_back(lead);
    acc_line.y.push_back(a);
  }
  io::write_csv((fs::path(out_dir) / "skill.csv").string(), skill_csv);
  io::write_csv((fs::path(out_dir) / "horizons.csv").string(), horizons);
  io::write_line_plot((fs::path(out_dir) / "acc.svg").string(),
                      "Forecast skill", "lead (solver steps)", "ACC",
                      {acc_line});
  std::cout << "wrote " << out_dir << "/skill.csv over " << n_ics << " ICs\n";
}

void cmd_climate(const io::RunConfig& cfg, const std::string& weights_path,
                 int days, const std::string& ic_path, int ic_frame,
                 const std::string& ref_path, const std::string& out_dir) {
  model::ModelWeights w = model::load_weights(weights_path);
  data::Dataset icds = data::read_dataset(ic_path);
  if (ic_frame < 0 || static_cast<std::size_t>(ic_frame) >= icds.frames.size())
    throw IoError("--ic-frame out of range");

  forecast::ForecastConfig fc;
  fc.n_members = cfg.forecast.members;
  fc.seed = cfg.forecast.seed;
  fc.dt_sample = icds.header.dt_sample;

  fs::create_directories(out_dir);
  snapshot_config(cfg, out_dir, true, "climate");

  eval::ClimateAccumulator acc = forecast::climate_run(
      w, icds.frames[ic_frame], days, fc, icds.header.solver_params.lx,
      icds.header.solver_params.ly);
  eval::Climatology clim = acc.finalize();

  io::CsvTable zonal;
  zonal.columns = {"y", "zonal_mean_psi1", "u1", "u2", "eof1_u1"};
  io::LineSeries u1_line{"run u1", {}, {}};
  for (int y = 0; y < clim.zonal_mean_psi1.size(); ++y) {
    const double e = clim.eof1_u1.pattern.size() > y ? clim.eof1_u1.pattern[y] : 0.0;
    zonal.rows.push_back({static_cast<double>(y), clim.zonal_mean_psi1[y],
                          clim.zonal_mean_u[0][y], clim.zonal_mean_u[1][y], e});
    u1_line.x.push_back(y);
    u1_line.y.push_back(clim.zonal_mean_u[0][y]);
  }
  io::write_csv((fs::path(out_dir) / "zonal.csv").string(), zonal);

  std::vector<io::LineSeries> lines{u1_line};
  std::ofstream report((fs::path(out_dir) / "drift.txt").string());
  report << "days = " << days << "\n";
  report << "frames = " << acc.frames() << "\n";
  report << "all_finite = " << (acc.all_finite() ? "yes" : "no") << "\n";
  report << "blowup_day = " << acc.blowup_day() << "\n";
  report << "eof1_explained = " << clim.eof1_u1.explained << "\n";
  if (!ref_path.empty()) {
    eval::Climatology ref =
        eval::climatology_from_dataset(data::read_dataset(ref_path));
    eval::DriftReport dr = eval::drift_audit(clim, ref);
    report << "rmse_zonal_psi1 = " << dr.rmse_zonal_psi1 << "\n";
    report << "rmse_u1 = " << dr.rmse_u1 << "\n";
    report << "rmse_u2 = " << dr.rmse_u2 << "\n";
    report << "eof_cosine = " << dr.eof_cosine << "\n";
    io::LineSeries ref_line{"reference u1", {}, {}};
    for (int y = 0; y < ref.zonal_mean_u[0].size(); ++y) {
      ref_line.x.push_back(y);
      ref_line.y.push_back(ref.zonal_mean_u[0][y]);
    }
    lines.push_back(std::move(ref_line));
  }
  io::write_line_plot((fs::path(out_dir) / "u1.svg").string(),
                      "Time-mean zonal-mean u1", "y index", "u1", lines);
  io::write_heatmap((fs::path(out_dir) / "mean_psi1.svg").string(),
                    "Time-mean psi1", clim.mean_field[0]);
  std::cout << "wrote " << out_dir << "/zonal.csv (" << acc.frames()
            << " frames)\n";
}

void cmd_eval(const io::RunConfig& cfg, const std::string& forecast_path,
              const std::string& truth_path, int ic_frame,
              const std::string& clim_path, const std::string& out_dir) {
  data::Dataset fcst = data::read_dataset(forecast_path);
  data::Dataset truth = data::read_dataset(truth_path);
  Eigen::ArrayXXd clim =
      clim_path.empty() ? mean_psi1(truth) : mean_psi1(data::read_dataset(clim_path));
  if (ic_frame < 0) throw ConfigError("--ic-frame must be >= 0");

  const int sps = static_cast<int>(
      std::lround(truth.header.dt_sample / truth.header.solver_params.dt_n));
  eval::SkillSeries skill = eval::skill_against_truth(
      fcst.frames, truth, static_cast<std::size_t>(ic_frame), clim, sps);
  eval::Horizon h = eval::prediction_horizon(skill, cfg.evaluation.acc_threshold);

  fs::create_directories(out_dir);
  snapshot_config(cfg, out_dir, true, "eval");
  io::CsvTable t;
  t.columns = {"lead_steps", "acc", "rmse"};
  for (std::size_t i = 0; i < skill.acc.size(); ++i)
    t.rows.push_back({static_cast<double>(skill.lead_times[i]), skill.acc[i],
                      skill.rmse[i]});
  io::write_csv((fs::path(out_dir) / "skill.csv").string(), t);

  std::ofstream report((fs::path(out_dir) / "eval.txt").string());
  report << "horizon_steps = " << h.lead << "\n";
  report << "never_crossed = " << (h.never_crossed ? "yes" : "no") << "\n";
  try {
    report << "windowed_rmse = "
           << eval::windowed_error(skill, cfg.evaluation.window_days) << "\n";
  } catch (const ShapeError&) {
    report << "windowed_rmse = n/a (series shorter than window)\n";
  }
  std::cout << "wrote " << out_dir << "/eval.txt (horizon " << h.lead << ")\n";
}

void cmd_plot(const std::string& csv_path, const std::string& x_col,
              const std::vector<std::string>& y_cols,
              const std::string& dataset_path, int frame, int channel,
              const std::string& title, const std::string& out) {
  if (!csv_path.empty()) {
    io::CsvTable t = io::read_csv(csv_path);
    auto col_index = [&](const std::string& name) {
      for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name) return i;
      throw ConfigError("csv has no column '" + name + "'");
    };
    const std::size_t xi = col_index(x_col);
    std::vector<io::LineSeries> lines;
    for (const std::string& yc : y_cols) {
      const std::size_t yi = col_index(yc);
      io::LineSeries s{yc, {}, {}};
      for (const auto& row : t.rows) {
        s.x.push_back(row[xi]);
        s.y.push_back(row[yi]);
      }
      lines.push_back(std::move(s));
    }
    io::write_line_plot(out, title.empty() ? csv_path : title, x_col, "value",
                        lines);
  } else if (!dataset_path.empty()) {
    data::Dataset ds = data::read_dataset(dataset_path);
    if (frame < 0 || static_cast<std::size_t>(frame) >= ds.frames.size())
      throw IoError("--frame out of range");
    if (channel < 1 || channel > 2) throw ConfigError("--channel must be 1 or 2");
    io::write_heatmap(out, title.empty() ? dataset_path : title,
                      ds.frames[frame].psi[channel - 1].cast<double>());
  } else {
    throw ConfigError("plot needs --csv or --dataset");
  }
  std::cout << "wrote " << out << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  Eigen::setNbThreads(worker_threads());
  CLI::App app{"Two-layer quasi-geostrophic solver with a predictive"
               " convolutional VAE surrogate"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Config file (key = value sections)")
      ->envname("QGVAE_CONFIG");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate QGD1 climate datasets");
  std::string sim_system = "perfect", sim_out = "dataset";
  int sim_ens = 1;
  double sim_spinup = 0, sim_record = 0;
  std::uint64_t sim_seed = 0;
  sim->add_option("--system", sim_system, "perfect|imperfect");
  sim->add_option("--out", sim_out, "Output path prefix")->required();
  sim->add_option("--ensembles", sim_ens, "Number of ensemble runs");
  sim->add_option("--spinup-days", sim_spinup, "Override spinup length");
  sim->add_option("--record-days", sim_record, "Override recorded length");
  sim->add_option("--seed", sim_seed, "Override solver seed");
  int sim_nx = 0, sim_ny = 0;
  sim->add_option("--nx", sim_nx, "Override grid points in x");
  sim->add_option("--ny", sim_ny, "Override grid points in y");

  // train
  auto* tr = app.add_subcommand("train", "Train the VAE or the baseline");
  std::string tr_model = "vae", tr_out;
  std::vector<std::string> tr_data;
  int tr_epochs = 0;
  double tr_lr = 0;
  tr->add_option("--model", tr_model, "vae|baseline");
  tr->add_option("--data", tr_data, "QGD1 files or directories")->required();
  tr->add_option("--out", tr_out, "Output QGW1 path")->required();
  tr->add_option("--epochs", tr_epochs, "Override epoch count");
  tr->add_option("--lr", tr_lr, "Override learning rate");

  // transfer
  auto* tf = app.add_subcommand("transfer", "Retrain unfrozen layers on noisy observations");
  std::string tf_in, tf_obs, tf_out;
  double tf_eta = 0, tf_fraction = 0;
  int tf_epochs = 0;
  tf->add_option("--weights", tf_in, "Pretrained QGW1 file")->required();
  tf->add_option("--obs", tf_obs, "Observation QGD1 file")->required();
  tf->add_option("--out", tf_out, "Output QGW1 path")->required();
  tf->add_option("--eta", tf_eta, "Override observation noise fraction");
  tf->add_option("--fraction", tf_fraction, "Override observation fraction");
  tf->add_option("--epochs", tf_epochs, "Override epoch count");

  // forecast
  auto* fc = app.add_subcommand("forecast", "Roll out forecasts and score them");
  std::string fc_weights, fc_truth, fc_clim, fc_out = "forecast_out";
  std::string fc_nsystem = "imperfect";
  bool fc_numerical = false;
  int fc_ics = 1, fc_steps = 0, fc_members = 0;
  double fc_eta = 0;
  fc->add_option("--weights", fc_weights, "QGW1 file");
  fc->add_flag("--numerical", fc_numerical, "Integrate the solver instead of a model");
  fc->add_option("--numerical-system", fc_nsystem,
                 "Solver variant for --numerical: same|imperfect");
  fc->add_option("--truth", fc_truth, "Verification QGD1 file")->required();
  fc->add_option("--clim", fc_clim, "Climatology QGD1 file (default: truth)");
  fc->add_option("--ics", fc_ics, "Number of initial conditions");
  fc->add_option("--steps", fc_steps, "Override lead count");
  fc->add_option("--members", fc_members, "Override ensemble size");
  fc->add_option("--eta", fc_eta, "Override IC noise fraction");
  fc->add_option("--out", fc_out, "Output directory")->required();

  // climate
  auto* cl = app.add_subcommand("climate", "Long rollout climate statistics");
  std::string cl_weights, cl_ic, cl_ref, cl_out = "climate_out";
  int cl_days = 100, cl_frame = 0, cl_members = 0;
  cl->add_option("--weights", cl_weights, "QGW1 file")->required();
  cl->add_option("--days", cl_days, "Rollout length in days")->required();
  cl->add_option("--ic-from", cl_ic, "QGD1 file supplying the IC")->required();
  cl->add_option("--ic-frame", cl_frame, "Frame index of the IC");
  cl->add_option("--ref", cl_ref, "Reference QGD1 file for drift audit");
  cl->add_option("--members", cl_members, "Override ensemble size");
  cl->add_option("--out", cl_out, "Output directory")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Recompute skill from stored artifacts");
  std::string ev_forecast, ev_truth, ev_clim, ev_out = "eval_out";
  int ev_frame = 0;
  ev->add_option("--forecast", ev_forecast, "Forecast mean QGD1")->required();
  ev->add_option("--truth", ev_truth, "Truth QGD1")->required();
  ev->add_option("--ic-frame", ev_frame, "IC frame index in the truth file");
  ev->add_option("--clim", ev_clim, "Climatology QGD1 (default: truth)");
  ev->add_option("--out", ev_out, "Output directory")->required();

  // plot
  auto* pl = app.add_subcommand("plot", "Render CSV columns or a snapshot as SVG");
  std::string pl_csv, pl_x = "lead_steps", pl_dataset, pl_title, pl_out;
  std::vector<std::string> pl_y;
  int pl_frame = 0, pl_channel = 1;
  pl->add_option("--csv", pl_csv, "CSV input");
  pl->add_option("--x", pl_x, "X column name");
  pl->add_option("--y", pl_y, "Y column names");
  pl->add_option("--dataset", pl_dataset, "QGD1 input for a heatmap");
  pl->add_option("--frame", pl_frame, "Frame index");
  pl->add_option("--channel", pl_channel, "Channel (1 or 2)");
  pl->add_option("--title", pl_title, "Plot title");
  pl->add_option("--out", pl_out, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    io::RunConfig cfg = load_config(config_path);
    if (sim->parsed()) {
      if (sim->count("--spinup-days")) cfg.solver.spinup_days = sim_spinup;
      if (sim->count("--record-days")) cfg.solver.record_days = sim_record;
      if (sim->count("--seed")) cfg.solver.seed = sim_seed;
      if (sim->count("--nx") || sim->count("--ny")) {
        if (sim->count("--nx")) cfg.solver.params.nx = sim_nx;
        if (sim->count("--ny")) cfg.solver.params.ny = sim_ny;
        cfg.solver.params.nu = -1.0;  // re-derive for the overridden grid
      }
      cmd_simulate(cfg, sim_system, sim_out, sim_ens);
    } else if (tr->parsed()) {
      if (tr->count("--epochs")) cfg.training.epochs = tr_epochs;
      if (tr->count("--lr")) cfg.training.lr = tr_lr;
      cmd_train(cfg, tr_model, tr_data, tr_out);
    } else if (tf->parsed()) {
      if (tf->count("--eta")) cfg.transfer.eta = tf_eta;
      if (tf->count("--fraction")) cfg.transfer.fraction = tf_fraction;
      if (tf->count("--epochs")) cfg.transfer.epochs = tf_epochs;
      cmd_transfer(cfg, tf_in, tf_obs, tf_out);
    } else if (fc->parsed()) {
      if (fc_weights.empty() && !fc_numerical)
        throw ConfigError("forecast needs --weights or --numerical");
      if (!fc_weights.empty() && fc_numerical)
        throw ConfigError("--weights and --numerical are mutually exclusive");
      if (fc->count("--steps")) cfg.forecast.steps = fc_steps;
      if (fc->count("--members")) cfg.forecast.members = fc_members;
      if (fc->count("--eta")) cfg.forecast.eta = fc_eta;
      cmd_forecast(cfg, fc_weights, fc_numerical, fc_nsystem, fc_truth, fc_clim,
                   fc_ics, fc_out);
    } else if (cl->parsed()) {
      if (cl->count("--members")) cfg.forecast.members = cl_members;
      cmd_climate(cfg, cl_weights, cl_days, cl_ic, cl_frame, cl_ref, cl_out);
    } else if (ev->parsed()) {
      cmd_eval(cfg, ev_forecast, ev_truth, ev_frame, ev_clim, ev_out);
    } else if (pl->parsed()) {
      cmd_plot(pl_csv, pl_x, pl_y, pl_dataset, pl_frame, pl_channel, pl_title, pl_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qgvae::cli
