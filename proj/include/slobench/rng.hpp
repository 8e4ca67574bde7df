#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace slobench {

// splitmix64 finalizer; used to derive independent seed streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t hash_str(std::string_view s) { return fnv1a(s.data(), s.size()); }

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t n = 0) {
  return mix64(seed ^ mix64(hash_str(tag)) ^ mix64(n + 0x51ed0c0ffeeULL));
}

// mt19937_64 engine plus hand-rolled distributions. The standard pins the
// engine's output sequence but not the distributions', so sampling goes
// through these helpers to keep runs reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  // Multiplicative noise factor with mean 1 and standard deviation ~sigma.
  double lognormal_factor(double sigma) {
    if (sigma <= 0.0) return 1.0;
    const double s = std::sqrt(std::log1p(sigma * sigma));
    return std::exp(s * normal() - 0.5 * s * s);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace slobench
