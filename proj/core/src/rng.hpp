#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace appsplit::detail {

// splitmix64; used to derive independent stream seeds from (seed, index).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d4a919c29b9c7full;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ull));
}

// Uniform helpers over mt19937_64 with portable (non-implementation-defined)
// results, unlike std::uniform_int_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [lo, hi] inclusive (bounded rejection).
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t span = hi - lo + 1;
    if (span == 0) return eng_();  // full 64-bit range
    std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return lo + v % span;
  }

  // Uniform in [lo, hi] inclusive; requires lo <= hi.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform(0, static_cast<std::uint64_t>(hi - lo)));
  }

  // Uniform in [0, 1).
  double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform01() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[uniform(0, v.size() - 1)];
  }

 private:
  std::mt19937_64 eng_;
};

// Zipf sampler over ranks 1..n with the given exponent, by inverse CDF over
// precomputed cumulative weights.
class Zipf {
 public:
  Zipf(int n, double exponent);

  // Returns a rank in [0, n).
  int sample(Rng& rng) const;

 private:
  std::vector<double> cumulative_;
};

}  // namespace appsplit::detail
