#pragma once

#include <cstdint>
#include <initializer_list>

namespace sibsurv {

// Small counter-free PRNG (splitmix64). Used instead of <random> engines so
// that streams are bit-identical across standard-library implementations,
// which the determinism contracts require.
class rng {
 public:
  explicit rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return u01() < p; }

  // Uniform integer in [0, n); Lemire multiply-shift reduction.
  std::uint64_t bounded(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent substream seed from a base seed and a list of
// integer coordinates (replicate index, stratum hash, ...). Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> parts) {
  rng r(seed);
  std::uint64_t h = r.next();
  for (std::uint64_t p : parts) {
    rng mix(h ^ (p + 0x9e3779b97f4a7c15ULL));
    h = mix.next();
  }
  return h;
}

// FNV-1a over a string, for seeding substreams keyed by identifiers.
inline std::uint64_t hash_str(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ULL;
  return h;
}

}  // namespace sibsurv
