#include "rrg/rng.hpp"

namespace rrg {

Rng Rng::stream(std::uint64_t seed, std::uint64_t experiment, std::uint64_t replica) {
  std::uint64_t k = mix(seed + 0x632BE59BD9B4E019ULL);
  k = mix(k ^ (experiment * 0xD1B54A32D192ED03ULL));
  k = mix(k + replica * 0x8CB92BA72F3D8DD7ULL);
  return Rng(k);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t t = (0 - n) % n;
    while (lo < t) {
      m = static_cast<unsigned __int128>((*this)()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace rrg
