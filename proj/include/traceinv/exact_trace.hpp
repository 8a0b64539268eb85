#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "traceinv/cholesky.hpp"
#include "traceinv/errors.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/spd_matrix.hpp"
#include "traceinv/trace_estimate.hpp"

namespace traceinv {

/// ||L^-1||_F^2 = trace((L L^T)^-1).
///
/// Columns of L^-1 are produced in blocks by solving L X = [e_j .. e_j+b) and
/// discarded after their squared norms are added. Column j of L^-1 vanishes
/// above row j, so each block only solves the trailing triangle. Block sums are
/// reduced in block order.
inline double inverse_frobenius_squared(const CholeskyFactor& l, std::size_t threads = 0) {
  const Index n = l.order();
  if (l.storage() == CholeskyFactor::Storage::identity) {
    const double d = l.identity_diagonal();
    return static_cast<double>(n) / (d * d);
  }
  constexpr Index block = 64;
  const Index nblocks = (n + block - 1) / block;
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
  parallel_for(
      static_cast<std::size_t>(nblocks),
      [&](std::size_t b) {
        const Index j0 = static_cast<Index>(b) * block;
        const Index width = std::min(block, n - j0);
        if (l.storage() == CholeskyFactor::Storage::dense) {
          const Index rows = n - j0;
          Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, width);
          x.topRows(width).setIdentity();
          l.dense_lower().bottomRightCorner(rows, rows).triangularView<Eigen::Lower>().solveInPlace(x);
          partial[b] = x.squaredNorm();
        } else {
          Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, width);
          x.middleRows(j0, width).setIdentity();
          l.solve_in_place(x);
          partial[b] = x.squaredNorm();
        }
      },
      threads);
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

/// trace(M^-1) through a Cholesky factorization of M.
inline TraceEstimate trace_inv_exact_cholesky(const SpdMatrix& m, std::size_t threads = 0) {
  const CholeskyFactor l = cholesky(m);
  TraceEstimate e;
  e.value = inverse_frobenius_squared(l, threads);
  e.method = TraceMethod::exact_cholesky;
  return e;
}

/// Closed-form t -> trace((A + tB)^-1) from the generalized eigenproblem.
///
/// With A x_i = g_i B x_i and x_i^T B x_i = 1, (A + tB)^-1 = sum x_i x_i^T /
/// (g_i + t), so the function is sum_i 1/(lambda_i + t mu_i) with
/// mu_i = 1/|x_i|^2 and lambda_i = g_i mu_i. For B = cI these reduce to the
/// eigenvalues of A and mu_i = c.
class EigenTraceFunction {
 public:
  EigenTraceFunction(Eigen::VectorXd lambda, Eigen::VectorXd mu)
      : lambda_(std::move(lambda)), mu_(std::move(mu)) {}

  double operator()(double t) const {
    double sum = 0.0;
    for (Index i = 0; i < lambda_.size(); ++i) {
      const double d = lambda_[i] + t * mu_[i];
      if (!(d > 0.0)) {
        throw NotPositiveDefinite("trace_inv_exact_eigen: A + tB is not positive definite at t = " +
                                  std::to_string(t));
      }
      sum += 1.0 / d;
    }
    return sum;
  }

  TraceEstimate estimate(double t) const {
    TraceEstimate e;
    e.value = (*this)(t);
    e.method = TraceMethod::exact_eigen;
    return e;
  }

  /// -min_i lambda_i / mu_i, the left end of the positive-definite range.
  double t_min() const { return -(lambda_.array() / mu_.array()).minCoeff(); }

  const Eigen::VectorXd& lambda() const noexcept { return lambda_; }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }

 private:
  Eigen::VectorXd lambda_;
  Eigen::VectorXd mu_;
};

inline constexpr Index kMaxEigenOrder = 2000;

inline EigenTraceFunction trace_inv_exact_eigen(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.order() != b.order()) throw DimensionMismatch("trace_inv_exact_eigen: orders differ");
  if (a.order() > kMaxEigenOrder) {
    throw InvalidArgument("trace_inv_exact_eigen: order " + std::to_string(a.order()) +
                          " exceeds the dense eigensolver limit " + std::to_string(kMaxEigenOrder));
  }
  const Index n = a.order();
  if (b.is_identity()) {
    if (!(b.shift() > 0.0)) throw NotPositiveDefinite("trace_inv_exact_eigen: B is not positive definite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("trace_inv_exact_eigen: eigensolver failed");
    if (!(es.eigenvalues().minCoeff() > 0.0)) {
      throw NotPositiveDefinite("trace_inv_exact_eigen: A is not positive definite");
    }
    return EigenTraceFunction(es.eigenvalues(), Eigen::VectorXd::Constant(n, b.shift()));
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_dense(), b.to_dense(),
                                                               Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) {
    throw NotPositiveDefinite("trace_inv_exact_eigen: B is not positive definite");
  }
  const Eigen::VectorXd g = es.eigenvalues();
  if (!(g.minCoeff() > 0.0)) throw NotPositiveDefinite("trace_inv_exact_eigen: A is not positive definite");
  Eigen::VectorXd mu = es.eigenvectors().colwise().squaredNorm().transpose().cwiseInverse();
  Eigen::VectorXd lambda = g.cwiseProduct(mu);
  return EigenTraceFunction(std::move(lambda), std::move(mu));
}

}  // namespace traceinv
