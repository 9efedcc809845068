#pragma once

#include <cstdint>
#include <string>

#include "qgvae/qg/params.hpp"

namespace qgvae::io {

// Plain-text `key = value` configuration. Sections: [solver], [imperfect],
// [training], [transfer], [forecast], [evaluation], [paths]; a bare `seed`
// before any section sets the global seed. '#' starts a comment. Unknown
// sections or keys are rejected with the offending line number.
struct SolverSection {
  qg::QgParams params;
  std::uint64_t seed = 42;
  double spinup_days = 500.0;
  double record_days = 1400.0;
  int sample_every = 40;
};

struct ImperfectSection {
  double beta_factor = 3.0;
  double sigma_factor = 0.8;
};

struct TrainingSection {
  int epochs = 20;
  int batch = 32;
  double lr = 1e-4;
  double kl_weight = 1e-3;
  int latent_dim = 128;
  int filters = 32;
  std::uint64_t seed = 7;
};

struct TransferSection {
  int epochs = 40;
  int batch = 16;
  double lr = 1e-4;
  double eta = 0.05;
  double fraction = 0.1;
  std::uint64_t seed = 11;
};

struct ForecastSection {
  int members = 20;
  int steps = 50;
  double eta = 0.05;
  std::uint64_t seed = 13;
};

struct EvaluationSection {
  double acc_threshold = 0.6;
  double window_days = 2.0;
};

struct PathsSection {
  std::string out_dir = "out";
};

struct RunConfig {
  std::uint64_t seed = 1234;
  SolverSection solver;
  ImperfectSection imperfect;
  TrainingSection training;
  TransferSection transfer;
  ForecastSection forecast;
  EvaluationSection evaluation;
  PathsSection paths;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name);

// Serialization is the parser's inverse; field order is fixed, so identical
// configs serialize to identical bytes.
std::string serialize_config(const RunConfig& cfg);
void write_resolved_config(const std::string& path, const RunConfig& cfg);

}  // namespace qgvae::io
