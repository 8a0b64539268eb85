#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "traceinv/errors.hpp"
#include "traceinv/hutchinson.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/random.hpp"
#include "traceinv/spd_matrix.hpp"
#include "traceinv/trace_estimate.hpp"
#include "traceinv/tridiagonal.hpp"

namespace traceinv {

/// Tridiagonal T_k = tridiag(beta, alpha, beta) from k Lanczos steps.
struct LanczosTriDiag {
  Eigen::VectorXd alpha;  // size k
  Eigen::VectorXd beta;   // size k - 1

  Index degree() const noexcept { return alpha.size(); }

  Eigen::MatrixXd to_dense() const {
    const Index k = degree();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    t.diagonal() = alpha;
    if (k > 1) {
      t.diagonal(1) = beta;
      t.diagonal(-1) = beta;
    }
    return t;
  }
};

/// Relative size of the residual below which the Krylov space is treated as
/// invariant and the recurrence stops.
inline constexpr double kLanczosBreakdown = 1e-13;

/// Lanczos tridiagonalization of M started from v0, with full
/// reorthogonalization against every previous basis vector. Stops early when
/// beta_j < kLanczosBreakdown * |M|_est, where the norm estimate is the
/// largest Gershgorin bound of T seen so far.
inline LanczosTriDiag lanczos(const SpdMatrix& m, const Eigen::VectorXd& v0, Index degree) {
  const Index n = m.order();
  if (v0.size() != n) throw DimensionMismatch("lanczos: start vector length != order");
  if (degree < 1) throw InvalidArgument("lanczos: degree must be >= 1");
  const double v0_norm = v0.norm();
  if (!(v0_norm > 0.0)) throw InvalidArgument("lanczos: start vector must be nonzero");
  degree = std::min(degree, n);

  Eigen::MatrixXd q(n, degree);
  q.col(0) = v0 / v0_norm;
  std::vector<double> alpha;
  std::vector<double> beta;
  alpha.reserve(static_cast<std::size_t>(degree));
  double norm_est = 0.0;

  for (Index j = 0; j < degree; ++j) {
    Eigen::VectorXd w = m.apply(q.col(j));
    const double a = q.col(j).dot(w);
    alpha.push_back(a);
    w -= a * q.col(j);
    if (j > 0) w -= beta.back() * q.col(j - 1);
    // Classical Gram-Schmidt, twice.
    for (int pass = 0; pass < 2; ++pass) {
      const auto basis = q.leftCols(j + 1);
      w -= basis * (basis.transpose() * w);
    }
    const double b = w.norm();
    const double prev = beta.empty() ? 0.0 : beta.back();
    norm_est = std::max(norm_est, std::abs(a) + b + prev);
    if (j + 1 == degree || b < kLanczosBreakdown * norm_est) break;
    beta.push_back(b);
    q.col(j + 1) = w / b;
  }

  LanczosTriDiag t;
  t.alpha = Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Index>(alpha.size()));
  t.beta = Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Index>(beta.size()));
  return t;
}

/// Gauss quadrature estimate of v^T M^-1 v for a unit v from its Lanczos
/// tridiagonal: sum_j tau_j^2 / theta_j.
inline double lanczos_quadrature_inverse(const LanczosTriDiag& t) {
  const TridiagonalEigen eig = tridiagonal_eigen(t.alpha, t.beta);
  double sum = 0.0;
  for (Index j = 0; j < eig.values.size(); ++j) {
    const double theta = eig.values[j];
    if (!(theta > 0.0)) {
      throw NotPositiveDefinite("trace_inv_slq: non-positive Ritz value " + std::to_string(theta) +
                                " (matrix is indefinite or t is below t_min)");
    }
    const double tau = eig.first_components[j];
    sum += tau * tau / theta;
  }
  return sum;
}

/// Stochastic Lanczos quadrature for trace(M^-1).
///
/// Each Rademacher vector z is normalized to v = z / sqrt(n); its quadratic
/// form is estimated by Gauss quadrature on the Lanczos tridiagonal and scaled
/// back by |z|^2 = n.
inline TraceEstimate trace_inv_slq(const SpdMatrix& m, int num_samples, Index degree, std::uint64_t seed,
                                   std::size_t threads = 0) {
  if (num_samples < 1) throw InvalidArgument("trace_inv_slq: n_v must be >= 1");
  if (degree < 1) throw InvalidArgument("trace_inv_slq: degree must be >= 1");
  const Index n = m.order();
  const double scale = static_cast<double>(n);
  std::vector<double> samples(static_cast<std::size_t>(num_samples));
  parallel_for(
      static_cast<std::size_t>(num_samples),
      [&](std::size_t k) {
        auto rng = stream_engine(seed, k);
        const Eigen::VectorXd v = rademacher(n, rng) / std::sqrt(scale);
        samples[k] = scale * lanczos_quadrature_inverse(lanczos(m, v, degree));
      },
      threads);
  TraceEstimate e;
  e.method = TraceMethod::slq;
  e.seed = seed;
  summarize_samples(samples, e);
  return e;
}

}  // namespace traceinv
