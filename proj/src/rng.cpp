#include "subcdm/rng.hpp"

#include <cmath>

namespace subcdm {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, Purpose purpose) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (stream * 0x632be59bd9b4e019ULL));
  return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

double RngStream::exponential(double mean) noexcept {
  return -mean * std::log1p(-uniform());
}

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
  // Lemire-style rejection keeps the draw unbiased.
  const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - n + 1) % n;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= limit) return r % n;
  }
}

}  // namespace subcdm
