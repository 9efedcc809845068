#include "qgvae/io/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qgvae/common.hpp"

namespace qgvae::io {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const std::size_t a = s.find_first_not_of(ws);
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, const std::string& name, int line) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    fail(name, line, "expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v, const std::string& name, int line) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    fail(name, line, "expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& v, const std::string& name, int line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    fail(name, line, "expected a nonnegative integer, got '" + v + "'");
  return x;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const std::size_t hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(name, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "solver" && section != "imperfect" && section != "training" &&
          section != "transfer" && section != "forecast" &&
          section != "evaluation" && section != "paths")
        fail(name, line, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(name, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(name, line, "empty key");
    if (val.empty()) fail(name, line, "empty value for '" + key + "'");

    auto unknown = [&]() {
      fail(name, line, "unknown key '" + key + "' in " +
                           (section.empty() ? "the global scope" : "[" + section + "]"));
    };

    if (section.empty()) {
      if (key == "seed") cfg.seed = to_u64(val, name, line);
      else unknown();
    } else if (section == "solver") {
      qg::QgParams& p = cfg.solver.params;
      if (key == "beta") p.beta = to_double(val, name, line);
      else if (key == "sigma") p.sigma = to_double(val, name, line);
      else if (key == "tau_d") p.tau_d = to_double(val, name, line);
      else if (key == "tau_f") p.tau_f = to_double(val, name, line);
      else if (key == "nu") p.nu = to_double(val, name, line);
      else if (key == "nx") p.nx = static_cast<int>(to_int(val, name, line));
      else if (key == "ny") p.ny = static_cast<int>(to_int(val, name, line));
      else if (key == "lx") p.lx = to_double(val, name, line);
      else if (key == "ly") p.ly = to_double(val, name, line);
      else if (key == "dt_n") p.dt_n = to_double(val, name, line);
      else if (key == "ra_coeff") p.ra_coeff = to_double(val, name, line);
      else if (key == "sponge_width") p.sponge.width_fraction = to_double(val, name, line);
      else if (key == "sponge_rate") p.sponge.max_rate = to_double(val, name, line);
      else if (key == "seed") cfg.solver.seed = to_u64(val, name, line);
      else if (key == "spinup_days") cfg.solver.spinup_days = to_double(val, name, line);
      else if (key == "record_days") cfg.solver.record_days = to_double(val, name, line);
      else if (key == "sample_every") cfg.solver.sample_every = static_cast<int>(to_int(val, name, line));
      else unknown();
    } else if (section == "imperfect") {
      if (key == "beta_factor") cfg.imperfect.beta_factor = to_double(val, name, line);
      else if (key == "sigma_factor") cfg.imperfect.sigma_factor = to_double(val, name, line);
      else unknown();
    } else if (section == "training") {
      if (key == "epochs") cfg.training.epochs = static_cast<int>(to_int(val, name, line));
      else if (key == "batch") cfg.training.batch = static_cast<int>(to_int(val, name, line));
      else if (key == "lr") cfg.training.lr = to_double(val, name, line);
      else if (key == "kl_weight") cfg.training.kl_weight = to_double(val, name, line);
      else if (key == "latent_dim") cfg.training.latent_dim = static_cast<int>(to_int(val, name, line));
      else if (key == "filters") cfg.training.filters = static_cast<int>(to_int(val, name, line));
      else if (key == "seed") cfg.training.seed = to_u64(val, name, line);
      else unknown();
    } else if (section == "transfer") {
      if (key == "epochs") cfg.transfer.epochs = static_cast<int>(to_int(val, name, line));
      else if (key == "batch") cfg.transfer.batch = static_cast<int>(to_int(val, name, line));
      else if (key == "lr") cfg.transfer.lr = to_double(val, name, line);
      else if (key == "eta") cfg.transfer.eta = to_double(val, name, line);
      else if (key == "fraction") cfg.transfer.fraction = to_double(val, name, line);
      else if (key == "seed") cfg.transfer.seed = to_u64(val, name, line);
      else unknown();
    } else if (section == "forecast") {
      if (key == "members") cfg.forecast.members = static_cast<int>(to_int(val, name, line));
      else if (key == "steps") cfg.forecast.steps = static_cast<int>(to_int(val, name, line));
      else if (key == "eta") cfg.forecast.eta = to_double(val, name, line);
      else if (key == "seed") cfg.forecast.seed = to_u64(val, name, line);
      else unknown();
    } else if (section == "evaluation") {
      if (key == "acc_threshold") cfg.evaluation.acc_threshold = to_double(val, name, line);
      else if (key == "window_days") cfg.evaluation.window_days = to_double(val, name, line);
      else unknown();
    } else if (section == "paths") {
      if (key == "out_dir") cfg.paths.out_dir = val;
      else unknown();
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "seed = " << cfg.seed << "\n\n";
  const qg::QgParams& p = cfg.solver.params;
  os << "[solver]\n";
  os << "beta = " << fmt(p.beta) << "\n";
  os << "sigma = " << fmt(p.sigma) << "\n";
  os << "tau_d = " << fmt(p.tau_d) << "\n";
  os << "tau_f = " << fmt(p.tau_f) << "\n";
  os << "nu = " << fmt(p.nu) << "\n";
  os << "nx = " << p.nx << "\n";
  os << "ny = " << p.ny << "\n";
  os << "lx = " << fmt(p.lx) << "\n";
  os << "ly = " << fmt(p.ly) << "\n";
  os << "dt_n = " << fmt(p.dt_n) << "\n";
  os << "ra_coeff = " << fmt(p.ra_coeff) << "\n";
  os << "sponge_width = " << fmt(p.sponge.width_fraction) << "\n";
  os << "sponge_rate = " << fmt(p.sponge.max_rate) << "\n";
  os << "seed = " << cfg.solver.seed << "\n";
  os << "spinup_days = " << fmt(cfg.solver.spinup_days) << "\n";
  os << "record_days = " << fmt(cfg.solver.record_days) << "\n";
  os << "sample_every = " << cfg.solver.sample_every << "\n\n";
  os << "[imperfect]\n";
  os << "beta_factor = " << fmt(cfg.imperfect.beta_factor) << "\n";
  os << "sigma_factor = " << fmt(cfg.imperfect.sigma_factor) << "\n\n";
  os << "[training]\n";
  os << "epochs = " << cfg.training.epochs << "\n";
  os << "batch = " << cfg.training.batch << "\n";
  os << "lr = " << fmt(cfg.training.lr) << "\n";
  os << "kl_weight = " << fmt(cfg.training.kl_weight) << "\n";
  os << "latent_dim = " << cfg.training.latent_dim << "\n";
  os << "filters = " << cfg.training.filters << "\n";
  os << "seed = " << cfg.training.seed << "\n\n";
  os << "[transfer]\n";
  os << "epochs = " << cfg.transfer.epochs << "\n";
  os << "batch = " << cfg.transfer.batch << "\n";
  os << "lr = " << fmt(cfg.transfer.lr) << "\n";
  os << "eta = " << fmt(cfg.transfer.eta) << "\n";
  os << "fraction = " << fmt(cfg.transfer.fraction) << "\n";
  os << "seed = " << cfg.transfer.seed << "\n\n";
  os << "[forecast]\n";
  os << "members = " << cfg.forecast.members << "\n";
  os << "steps = " << cfg.forecast.steps << "\n";
  os << "eta = " << fmt(cfg.forecast.eta) << "\n";
  os << "seed = " << cfg.forecast.seed << "\n\n";
  os << "[evaluation]\n";
  os << "acc_threshold = " << fmt(cfg.evaluation.acc_threshold) << "\n";
  os << "window_days = " << fmt(cfg.evaluation.window_days) << "\n\n";
  os << "[paths]\n";
  os << "out_dir = " << cfg.paths.out_dir << "\n";
  return os.str();
}

void write_resolved_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << serialize_config(cfg);
}

}  // namespace qgvae::io
