#pragma once

#include <cstdint>

namespace marlab {

// Deterministic, platform-independent random stream (splitmix64).
// Every stochastic component in the project owns one of these; the standard
// library distributions are avoided on purpose so that a (seed, action
// sequence) pair fixes every draw bit-for-bit across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n must be positive.
  int uniform_int(int n) {
    int v = static_cast<int>(u01() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  bool bernoulli(double p) { return u01() < p; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Derives an independent child seed from (seed, stream_id).  Used to give
  // each consumer (environment, per-agent action noise, initializers,
  // replay sampling) its own stream under one experiment seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream_id) {
    RngStream mix(seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1)));
    mix.next_u64();
    return mix.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace marlab
