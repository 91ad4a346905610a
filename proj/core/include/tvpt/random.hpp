#pragma once

#include <cstdint>
#include <random>

#include "tvpt/common.hpp"

namespace tvpt {

/// Stream tags keep independent random quantities derived from one master
/// seed from colliding (pattern draws vs. Gaussian samples vs. matrices).
enum class Stream : std::uint64_t {
  kPattern = 0x70617474,
  kGaussian = 0x67617573,
  kSignal = 0x7369676e,
  kMatrix = 0x6d617472,
  kCertificate = 0x63657274,
};

/// splitmix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic child seed for task `index` of a run seeded with `master`.
/// Used for every per-sample and per-trial seed so that results do not depend
/// on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index);

/// mt19937_64 with portable uniform and Gaussian draws. The standard library
/// distributions are implementation-defined, so the conversions are done here
/// to keep CSV outputs bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via the Box-Muller transform.
  double gaussian();
  /// +1 or -1 with equal probability.
  int sign() { return (engine_() >> 63) != 0 ? 1 : -1; }

  Vector gaussian_vector(Index size);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace tvpt
