#ifndef MISSVAR_RNG_HPP
#define MISSVAR_RNG_HPP

#include <cstdint>
#include <cmath>
#include <random>

namespace missvar {

// SplitMix64 finalizer; used both for seed mixing and for deriving
// per-(seed, stream) engine states so independent streams never overlap.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed derivation for experiment cells:
// seed(cell, rep) = splitmix64(splitmix64(splitmix64(master) ^ cell) ^ rep).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                 std::uint64_t rep) {
  return splitmix64(splitmix64(splitmix64(master) ^ cell) ^ rep);
}

// Seeded RNG stream. All draws are built from raw mt19937_64 output words,
// so sequences are identical across platforms for a fixed (seed, stream).
// Distinct streams of the same seed are independent for practical purposes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(splitmix64(splitmix64(seed) ^
                        (stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() { return eng_(); }

  // in [0, 1)
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // in (0, 1]; safe as a log() argument
  double uniform01_open0() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller; consumes exactly two words per draw (no cached spare),
  // which keeps stream layouts reproducible.
  double normal() {
    const double u1 = uniform01_open0();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  bool bernoulli(double p_true) { return uniform01() < p_true; }

  // uniform integer in [lo, hi] via rejection-free 128-bit multiply
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const auto wide = static_cast<unsigned __int128>(next_u64()) * span;
    return lo + static_cast<std::int64_t>(wide >> 64);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace missvar

#endif
