#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "traceinv/cholesky.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/random.hpp"
#include "traceinv/spd_matrix.hpp"
#include "traceinv/trace_estimate.hpp"

namespace traceinv {

/// Mean and standard error of per-sample values, reduced in index order.
inline void summarize_samples(const std::vector<double>& samples, TraceEstimate& e) {
  const double count = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= count;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  e.value = mean;
  e.num_samples = static_cast<int>(samples.size());
  e.std_error = samples.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
}

/// Hutchinson estimate from an existing factor: z^T M^-1 z = |L^-1 z|^2 for
/// Rademacher z. Sample k draws from its own stream derived from `seed`.
inline TraceEstimate trace_inv_hutchinson(const CholeskyFactor& l, int num_samples, std::uint64_t seed,
                                          std::size_t threads = 0) {
  if (num_samples < 1) throw InvalidArgument("trace_inv_hutchinson: n_v must be >= 1");
  const Index n = l.order();
  constexpr int block = 32;
  const int nblocks = (num_samples + block - 1) / block;
  std::vector<double> samples(static_cast<std::size_t>(num_samples));
  parallel_for(
      static_cast<std::size_t>(nblocks),
      [&](std::size_t b) {
        const int k0 = static_cast<int>(b) * block;
        const int width = std::min(block, num_samples - k0);
        Eigen::MatrixXd z(n, width);
        for (int c = 0; c < width; ++c) {
          auto rng = stream_engine(seed, static_cast<std::uint64_t>(k0 + c));
          z.col(c) = rademacher(n, rng);
        }
        l.solve_in_place(z);
        for (int c = 0; c < width; ++c) samples[static_cast<std::size_t>(k0 + c)] = z.col(c).squaredNorm();
      },
      threads);
  TraceEstimate e;
  e.method = TraceMethod::hutchinson;
  e.seed = seed;
  summarize_samples(samples, e);
  return e;
}

inline TraceEstimate trace_inv_hutchinson(const SpdMatrix& m, int num_samples, std::uint64_t seed,
                                          std::size_t threads = 0) {
  return trace_inv_hutchinson(cholesky(m), num_samples, seed, threads);
}

}  // namespace traceinv
