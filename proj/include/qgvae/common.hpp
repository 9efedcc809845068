#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qgvae {

/// Config file problems (bad key, bad value, parse failure). CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File format / filesystem problems. CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failures: solver blow-up, divergent training. CLI exit code 4.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape or contract violations between tensors/fields.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Number of worker threads: QGVAE_THREADS if set, else hardware count.
int worker_threads();

/// splitmix64 mix step; used to derive independent RNG streams.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic counter-based Gaussian generator (Box-Muller over
/// splitmix64). Independent of any standard-library distribution details,
/// so identical seeds give identical draws on every build.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);

  double next();

  /// Uniform in [0, n). Used for shuffles.
  std::uint64_t next_index(std::uint64_t n);

 private:
  double u01();
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qgvae
