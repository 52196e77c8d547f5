#pragma once

#include <cstdint>
#include <random>

namespace subcdm {

/// What a random stream is used for. Each (seed, robot, purpose) triple gets
/// its own generator so reordering modules never perturbs another stream.
enum class Purpose : std::uint32_t {
  Environment = 1,
  Placement,
  Identity,
  InitialOpinion,
  Motion,
  Sensing,
  Dmvd,
  Role,
  Membership,
  Fault,
  Delivery,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for the substream identified by (seed, stream index, purpose).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, Purpose purpose) noexcept;

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t seed, std::uint64_t stream, Purpose purpose)
      : engine_(derive_seed(seed, stream, purpose)) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given mean (inverse CDF, independent of the stdlib's distributions).
  double exponential(double mean) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace subcdm
