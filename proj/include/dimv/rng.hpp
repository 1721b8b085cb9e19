#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace dimv {

// Mixes a seed with a stream index into a fresh 64-bit seed (splitmix64).
// Used to derive independent, reproducible RNG streams per benchmark cell.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Thin wrapper over std::mt19937_64 with self-contained uniform/normal/bounded
// draws. std::*_distribution output is implementation-defined, so the draws
// are implemented here to keep seeded runs bit-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection.
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound < 2) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Fisher-Yates sample of k distinct indices from [0, n), ascending order.
  std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n,
                                                       Eigen::Index k);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline std::vector<Eigen::Index> Rng::sample_without_replacement(
    Eigen::Index n, Eigen::Index k) {
  if (k > n) k = n;
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           bounded(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace dimv
