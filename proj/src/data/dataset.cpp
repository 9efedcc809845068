#include "qgvae/data/dataset.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qgvae/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "QGD1/QGW1 writers assume a little-endian host");

namespace qgvae::data {

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError(std::string("truncated header while reading ") + what);
  return v;
}

void put_params(std::ostream& os, const qg::QgParams& p) {
  put(os, p.beta);
  put(os, p.sigma);
  put(os, p.tau_d);
  put(os, p.tau_f);
  put(os, p.nu);
  put(os, p.lx);
  put(os, p.ly);
  put(os, static_cast<std::uint32_t>(p.nx));
  put(os, static_cast<std::uint32_t>(p.ny));
  put(os, p.dt_n);
  put(os, p.sponge.width_fraction);
  put(os, p.sponge.max_rate);
  put(os, p.sponge.profile);
  put(os, p.ra_coeff);
}

qg::QgParams get_params(std::istream& is) {
  qg::QgParams p;
  p.beta = get<double>(is, "beta");
  p.sigma = get<double>(is, "sigma");
  p.tau_d = get<double>(is, "tau_d");
  p.tau_f = get<double>(is, "tau_f");
  p.nu = get<double>(is, "nu");
  p.lx = get<double>(is, "lx");
  p.ly = get<double>(is, "ly");
  p.nx = static_cast<int>(get<std::uint32_t>(is, "nx"));
  p.ny = static_cast<int>(get<std::uint32_t>(is, "ny"));
  p.dt_n = get<double>(is, "dt_n");
  p.sponge.width_fraction = get<double>(is, "sponge_width");
  p.sponge.max_rate = get<double>(is, "sponge_rate");
  p.sponge.profile = get<std::uint32_t>(is, "sponge_profile");
  p.ra_coeff = get<double>(is, "ra_coeff");
  return p;
}

}  // namespace

void write_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  const DatasetHeader& h = ds.header;
  if (h.nt != ds.frames.size())
    throw ShapeError("dataset header nt does not match frame count");
  os.write(DatasetHeader::magic, 4);
  put(os, h.version);
  put(os, h.nt);
  put(os, h.ny);
  put(os, h.nx);
  put(os, h.dt_sample);
  put_params(os, h.solver_params);
  put(os, static_cast<std::uint32_t>(h.system_tag));
  put(os, h.ensemble_id);
  put(os, h.noise_eta);
  put(os, h.t0);
  std::vector<float> row(h.nx);
  for (const GridSnapshot& f : ds.frames) {
    if (f.ny() != static_cast<int>(h.ny) || f.nx() != static_cast<int>(h.nx))
      throw ShapeError("frame shape does not match dataset header");
    for (int c = 0; c < 2; ++c)
      for (int y = 0; y < static_cast<int>(h.ny); ++y) {
        for (int x = 0; x < static_cast<int>(h.nx); ++x) row[x] = f.psi[c](y, x);
        os.write(reinterpret_cast<const char*>(row.data()),
                 sizeof(float) * row.size());
      }
  }
  if (!os) throw IoError("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, DatasetHeader::magic, 4) != 0)
    throw IoError("bad magic in " + path + " (expected QGD1)");
  Dataset ds;
  DatasetHeader& h = ds.header;
  h.version = get<std::uint32_t>(is, "version");
  if (h.version != 1)
    throw IoError("unsupported QGD1 version " + std::to_string(h.version) +
                  " in " + path);
  h.nt = get<std::uint64_t>(is, "nt");
  h.ny = get<std::uint32_t>(is, "ny");
  h.nx = get<std::uint32_t>(is, "nx");
  h.dt_sample = get<double>(is, "dt_sample");
  h.solver_params = get_params(is);
  h.system_tag = static_cast<SystemTag>(get<std::uint32_t>(is, "system_tag"));
  h.ensemble_id = get<std::uint32_t>(is, "ensemble_id");
  h.noise_eta = get<double>(is, "noise_eta");
  h.t0 = get<double>(is, "t0");

  const std::uint64_t frame_bytes =
      2ull * h.ny * h.nx * sizeof(float);
  const std::uint64_t expected = h.nt * frame_bytes;
  std::uint64_t header_end = static_cast<std::uint64_t>(is.tellg());
  std::uint64_t file_size = std::filesystem::file_size(path);
  if (file_size - header_end != expected) {
    std::ostringstream oss;
    oss << "truncated payload in " << path << ": expected " << expected
        << " frame bytes, found " << (file_size - header_end);
    throw IoError(oss.str());
  }

  ds.frames.resize(h.nt);
  std::vector<float> row(h.nx);
  for (std::uint64_t t = 0; t < h.nt; ++t) {
    GridSnapshot& f = ds.frames[t];
    f.time = h.t0 + static_cast<double>(t) * h.dt_sample;
    for (int c = 0; c < 2; ++c) {
      f.psi[c].resize(h.ny, h.nx);
      for (int y = 0; y < static_cast<int>(h.ny); ++y) {
        is.read(reinterpret_cast<char*>(row.data()), sizeof(float) * row.size());
        for (int x = 0; x < static_cast<int>(h.nx); ++x) f.psi[c](y, x) = row[x];
      }
    }
  }
  if (!is) throw IoError("read failed: " + path);
  return ds;
}

NormStats compute_norm_stats(const Dataset& ds) {
  return compute_norm_stats(std::vector<Dataset>{ds});
}

NormStats compute_norm_stats(const std::vector<Dataset>& sets) {
  std::uint64_t total = 0;
  for (const Dataset& ds : sets) total += ds.frames.size();
  if (total < 2) throw IoError("compute_norm_stats: need at least 2 frames");
  NormStats st;
  for (int c = 0; c < 2; ++c) {
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t n = 0;
    for (const Dataset& ds : sets)
      for (const GridSnapshot& f : ds.frames) {
        sum += f.psi[c].cast<double>().sum();
        sumsq += f.psi[c].cast<double>().square().sum();
        n += f.psi[c].size();
      }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    if (!(var > 1e-24))
      throw NumericalError("degenerate channel " + std::to_string(c + 1) +
                           " (zero variance)");
    st.mean[c] = mean;
    st.std[c] = std::sqrt(var);
  }
  return st;
}

void write_norm_stats_csv(const std::string& path, const NormStats& stats) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "channel,mean,std\n";
  char buf[80];
  for (int c = 0; c < 2; ++c) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", c + 1, stats.mean[c],
                  stats.std[c]);
    os << buf;
  }
}

Dataset add_observation_noise(const Dataset& ds, double eta,
                              const NormStats& stats, std::uint64_t seed) {
  if (eta < 0) throw ConfigError("noise eta must be >= 0");
  Dataset out = ds;
  out.header.noise_eta = eta;
  if (eta == 0.0) return out;
  GaussianStream g(seed, /*stream=*/0xEB5);
  for (GridSnapshot& f : out.frames)
    for (int c = 0; c < 2; ++c) {
      const double amp = eta * stats.std[c];
      float* p = f.psi[c].data();
      for (Eigen::Index i = 0; i < f.psi[c].size(); ++i)
        p[i] = static_cast<float>(p[i] + amp * g.next());
    }
  return out;
}

Dataset subsample_observations(const Dataset& ds, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw ConfigError("observation fraction must lie in (0, 1]");
  Dataset out;
  out.header = ds.header;
  std::uint64_t keep = static_cast<std::uint64_t>(
      std::ceil(fraction * static_cast<double>(ds.frames.size())));
  keep = std::min<std::uint64_t>(keep, ds.frames.size());
  out.frames.assign(ds.frames.begin(), ds.frames.begin() + keep);
  out.header.nt = keep;
  return out;
}

TrainingPairs::TrainingPairs(const std::vector<Dataset>* sets, NormStats stats)
    : sets_(sets), stats_(stats) {
  if (sets_ == nullptr || sets_->empty())
    throw IoError("TrainingPairs: no datasets");
  const Dataset& first = (*sets_)[0];
  for (std::uint32_t s = 0; s < sets_->size(); ++s) {
    const Dataset& ds = (*sets_)[s];
    if (ds.frames.size() < 2)
      throw IoError("TrainingPairs: ensemble " + std::to_string(s) +
                    " has fewer than 2 frames");
    if (ds.header.ny != first.header.ny || ds.header.nx != first.header.nx)
      throw ShapeError("TrainingPairs: ensembles disagree on grid shape");
    for (std::uint32_t i = 0; i + 1 < ds.frames.size(); ++i)
      index_.emplace_back(s, i);
  }
}

int TrainingPairs::ny() const { return static_cast<int>((*sets_)[0].header.ny); }
int TrainingPairs::nx() const { return static_cast<int>((*sets_)[0].header.nx); }

void TrainingPairs::materialize(std::size_t pair, double* input,
                                double* target) const {
  const auto [s, i] = index_.at(pair);
  const Dataset& ds = (*sets_)[s];
  normalize_snapshot(ds.frames[i], stats_, input);
  normalize_snapshot(ds.frames[i + 1], stats_, target);
}

void normalize_snapshot(const GridSnapshot& snap, const NormStats& stats,
                        double* out) {
  const int ny = snap.ny(), nx = snap.nx();
  for (int c = 0; c < 2; ++c) {
    const double mu = stats.mean[c], inv = 1.0 / stats.std[c];
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        *out++ = (static_cast<double>(snap.psi[c](y, x)) - mu) * inv;
  }
}

GridSnapshot denormalize_snapshot(const double* z, int ny, int nx,
                                  const NormStats& stats, double time) {
  GridSnapshot snap;
  snap.time = time;
  for (int c = 0; c < 2; ++c) {
    snap.psi[c].resize(ny, nx);
    const double mu = stats.mean[c], sd = stats.std[c];
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        snap.psi[c](y, x) = static_cast<float>(*z++ * sd + mu);
  }
  return snap;
}

}  // namespace qgvae::data
