#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ptflab {

// SplitMix64 finalizer. Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// (master, stream) pair that fully determines every sampled value.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  Seed with_stream(std::uint64_t s) const { return Seed{master, s}; }
  // Derived sub-stream; used to hand disjoint streams to blocks/estimators.
  Seed sub(std::uint64_t j) const { return Seed{master, mix64(stream + 0x632be59bd9b4e019ULL * (j + 1))}; }
};

// Counter-addressable generator: the value at counter c depends only on
// (master, stream, c), so any partition of the counter range across threads
// reproduces the single-thread sequence bit for bit.
class CounterRng {
 public:
  explicit CounterRng(Seed seed, std::uint64_t counter = 0)
      : key_(mix64(seed.master) ^ mix64(mix64(seed.stream) + 0x9e3779b97f4a7c15ULL)),
        counter_(counter) {}

  std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

  void jump_to(std::uint64_t counter) { counter_ = counter; }
  std::uint64_t counter() const { return counter_; }

  // Uniform in (0,1); never returns an exact 0 or 1.
  double next_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double next_normal();

  // Uniform integer in [0, bound) via 128-bit multiply-high (bias < bound/2^64).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

// Inverse standard normal CDF (Wichura's PPND16 rational approximations).
// |error| < 1e-9 over (1e-12, 1-1e-12); arguments outside are clamped.
double normal_icdf(double p);

inline double CounterRng::next_normal() { return normal_icdf(next_unit()); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488); }

}  // namespace ptflab
