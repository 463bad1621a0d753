#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace psrsel {

// splitmix64 finalizer; also used to derive independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic seed for sub-stream `stream` of a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(base ^ mix_seed(stream + 0x632be59bd9b4e019ull));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t s1,
                                 std::uint64_t s2) {
  return derive_seed(derive_seed(base, s1), s2);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t s1,
                                 std::uint64_t s2, std::uint64_t s3) {
  return derive_seed(derive_seed(base, s1, s2), s3);
}

// mt19937_64 engine with hand-rolled variate transforms.  The standard
// library distribution objects are implementation-defined, which would break
// bit-exact reproducibility across toolchains; the raw engine is fully
// specified by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, exactly uniform.
  int uniform_int(int n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t rem = (UINT64_MAX % un + 1u) % un;
    const std::uint64_t accept_max = UINT64_MAX - rem;
    std::uint64_t v = eng_();
    while (v > accept_max) v = eng_();
    return static_cast<int>(v % un);
  }

  // Index sampled with probability proportional to probs[i] (which are
  // assumed to sum to ~1); falls back to the last index under fp rounding.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    const int n = static_cast<int>(probs.size());
    for (int i = 0; i < n; ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace psrsel
