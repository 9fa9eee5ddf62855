#pragma once

#include <cmath>
#include <cstdint>

namespace levikern {

// Counter-based RNG built on the splitmix64 finalizer. A stream is
// (key, counter); draws never mutate shared state, so per-path streams
// split off a master seed are reproducible under any scheduling.
class CounterRng {
 public:
  CounterRng() = default;
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ull + 0xBF58476D1CE4E5B9ull))) {}

  static CounterRng stream_of(std::uint64_t seed, std::uint64_t stream) {
    return CounterRng(seed, stream);
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

  // Uniform in (0,1): top 53 bits, never exactly 0.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double a, double b) { return a + (b - a) * next_uniform(); }

  double next_exponential() { return -std::log(next_uniform()); }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = next_uniform();
    double v = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double c = std::cos(2.0 * M_PI * v), s = std::sin(2.0 * M_PI * v);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_ = 0x853C49E6748FEA9Bull;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// FNV-1a over bytes; used for config/content hashing in provenance records.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace levikern
