#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace traceinv {

/// SplitMix64 finalizer. Used to derive independent sub-seeds from a master
/// seed and a stream index so that sample k does not depend on who draws it.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Random engine for sample vector `index` of a run seeded with `master`.
inline std::mt19937_64 stream_engine(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(derive_seed(master, index));
}

/// Vector of i.i.d. +1/-1 entries.
inline Eigen::VectorXd rademacher(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::VectorXd z(n);
  std::uint64_t bits = 0;
  int left = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    z[i] = (bits & 1U) ? 1.0 : -1.0;
    bits >>= 1;
    --left;
  }
  return z;
}

inline Eigen::VectorXd standard_normal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = dist(rng);
  return z;
}

}  // namespace traceinv
