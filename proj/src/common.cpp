#include "qgvae/common.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

namespace qgvae {

int worker_threads() {
  if (const char* env = std::getenv("QGVAE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed ^ mix64(stream))) {}

double GaussianStream::u01() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = mix64(state_);
  // 53-bit mantissa, strictly inside (0, 1) so log() below is safe.
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = u01();
  double u2 = u01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t GaussianStream::next_index(std::uint64_t n) {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_) % n;
}

}  // namespace qgvae
