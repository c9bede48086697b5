#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace d2dhop::sim {

/// splitmix64 step; used to derive independent per-replication seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Generator for replication r of a run seeded with `seed`. Depends only on
/// (seed, r), so results do not depend on which thread runs the replication.
inline std::mt19937_64 replication_stream(std::uint64_t seed, std::uint64_t r) {
  std::uint64_t st = seed ^ (0xD1B54A32D192ED03ULL * (r + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(st)), static_cast<std::uint32_t>(splitmix64(st)),
                    static_cast<std::uint32_t>(splitmix64(st)), static_cast<std::uint32_t>(splitmix64(st)),
                    static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform on [0, 1) from the top 53 bits; cheaper than std::generate_canonical.
template <class Rng>
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exp(1) variate by inversion.
template <class Rng>
inline double exp1(Rng& rng) {
  return -std::log1p(-uniform01(rng));
}

/// Neumaier compensated sum.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for k successes out of n trials.
inline std::pair<double, double> wilson_interval(double k, double n, double z = kZ95) {
  const double p = k / n;
  const double z2n = z * z / n;
  const double center = (p + 0.5 * z2n) / (1.0 + z2n);
  const double half = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace d2dhop::sim
