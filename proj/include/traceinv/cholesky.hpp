#pragma once

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "traceinv/errors.hpp"
#include "traceinv/spd_matrix.hpp"

namespace traceinv {

/// Pivots smaller than this fraction of the largest diagonal entry are
/// treated as loss of positive definiteness.
inline constexpr double kPivotTolerance = 1e-14;

/// Lower-triangular factor L with L L^T equal to the source matrix. Keeps the
/// storage class of the source: dense, sparse (natural ordering, so L is the
/// factor of the matrix as given), or a scaled identity.
class CholeskyFactor {
 public:
  using Storage = SpdMatrix::Storage;

  static CholeskyFactor from_dense(Eigen::MatrixXd lower) {
    CholeskyFactor f;
    f.n_ = lower.rows();
    f.storage_ = Storage::dense;
    f.dense_ = std::move(lower);
    return f;
  }

  static CholeskyFactor from_sparse(SparseMat lower) {
    CholeskyFactor f;
    f.n_ = lower.rows();
    f.storage_ = Storage::sparse;
    f.sparse_ = std::move(lower);
    return f;
  }

  static CholeskyFactor scaled_identity(Index n, double diag) {
    CholeskyFactor f;
    f.n_ = n;
    f.storage_ = Storage::identity;
    f.diag_ = diag;
    return f;
  }

  Index order() const noexcept { return n_; }
  Storage storage() const noexcept { return storage_; }

  const Eigen::MatrixXd& dense_lower() const { return dense_; }
  const SparseMat& sparse_lower() const { return sparse_; }
  double identity_diagonal() const { return diag_; }

  Eigen::MatrixXd to_dense() const {
    switch (storage_) {
      case Storage::dense: return dense_.triangularView<Eigen::Lower>();
      case Storage::sparse: return Eigen::MatrixXd(sparse_);
      case Storage::identity: break;
    }
    return diag_ * Eigen::MatrixXd::Identity(n_, n_);
  }

  /// Solves L X = B in place for a block of right-hand sides.
  void solve_in_place(Eigen::Ref<Eigen::MatrixXd> rhs) const {
    switch (storage_) {
      case Storage::dense: dense_.triangularView<Eigen::Lower>().solveInPlace(rhs); break;
      case Storage::sparse: {
        Eigen::MatrixXd tmp = rhs;
        sparse_.triangularView<Eigen::Lower>().solveInPlace(tmp);
        rhs = tmp;
        break;
      }
      case Storage::identity: rhs /= diag_; break;
    }
  }

  /// Solves L^T X = B in place.
  void solve_transpose_in_place(Eigen::Ref<Eigen::MatrixXd> rhs) const {
    switch (storage_) {
      case Storage::dense:
        dense_.triangularView<Eigen::Lower>().transpose().solveInPlace(rhs);
        break;
      case Storage::sparse: {
        Eigen::MatrixXd tmp = rhs;
        sparse_.triangularView<Eigen::Lower>().transpose().solveInPlace(tmp);
        rhs = tmp;
        break;
      }
      case Storage::identity: rhs /= diag_; break;
    }
  }

  /// Solves (L L^T) x = b.
  Eigen::VectorXd solve_spd(const Eigen::VectorXd& b) const {
    if (b.size() != n_) throw DimensionMismatch("CholeskyFactor::solve_spd: length mismatch");
    Eigen::MatrixXd x = b;
    solve_in_place(x);
    solve_transpose_in_place(x);
    return x.col(0);
  }

  /// log det(L L^T).
  double log_determinant() const {
    switch (storage_) {
      case Storage::dense: return 2.0 * dense_.diagonal().array().log().sum();
      case Storage::sparse: return 2.0 * Eigen::VectorXd(sparse_.diagonal()).array().log().sum();
      case Storage::identity: break;
    }
    return 2.0 * static_cast<double>(n_) * std::log(diag_);
  }

 private:
  Index n_ = 0;
  Storage storage_ = Storage::identity;
  Eigen::MatrixXd dense_;
  SparseMat sparse_;
  double diag_ = 1.0;
};

namespace detail {

inline void check_pivots(const Eigen::VectorXd& l_diag, double max_diag) {
  const double floor = kPivotTolerance * max_diag;
  for (Index j = 0; j < l_diag.size(); ++j) {
    const double pivot = l_diag[j] * l_diag[j];
    if (!(pivot >= floor) || !std::isfinite(pivot)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " = " +
                                std::to_string(pivot) + " below tolerance " +
                                std::to_string(floor));
    }
  }
}

}  // namespace detail

/// Cholesky factorization A = L L^T.
///
/// Throws NotPositiveDefinite when a pivot drops below
/// kPivotTolerance * max(diag(A)); for A + tB this is how a shift below
/// t_min shows up.
inline CholeskyFactor cholesky(const SpdMatrix& a) {
  const Index n = a.order();
  if (n == 0) throw InvalidShape("cholesky: empty matrix");
  const Eigen::VectorXd diag = a.diagonal_entries();
  const double max_diag = diag.maxCoeff();
  if (!(max_diag > 0.0)) throw NotPositiveDefinite("cholesky: non-positive diagonal");

  switch (a.storage()) {
    case SpdMatrix::Storage::identity: {
      if (!(a.shift() > 0.0)) throw NotPositiveDefinite("cholesky: non-positive multiple of identity");
      return CholeskyFactor::scaled_identity(n, std::sqrt(a.shift()));
    }
    case SpdMatrix::Storage::dense: {
      Eigen::MatrixXd m = a.dense_data();
      m.diagonal().array() += a.shift();
      Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(m);
      if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("cholesky: matrix is not positive definite");
      }
      detail::check_pivots(m.diagonal(), max_diag);
      m.triangularView<Eigen::StrictlyUpper>().setZero();
      return CholeskyFactor::from_dense(std::move(m));
    }
    case SpdMatrix::Storage::sparse: {
      Eigen::SimplicialLLT<SparseMat, Eigen::Lower, Eigen::NaturalOrdering<int>> llt;
      llt.compute(a.to_sparse());
      if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("cholesky: sparse matrix is not positive definite");
      }
      SparseMat lower = llt.matrixL();
      detail::check_pivots(Eigen::VectorXd(lower.diagonal()), max_diag);
      return CholeskyFactor::from_sparse(std::move(lower));
    }
  }
  throw Error("cholesky: unknown storage");
}

/// Forward substitution L x = b.
inline Eigen::VectorXd solve_lower_triangular(const CholeskyFactor& l, const Eigen::VectorXd& b) {
  if (b.size() != l.order()) {
    throw DimensionMismatch("solve_lower_triangular: rhs length " + std::to_string(b.size()) +
                            " != order " + std::to_string(l.order()));
  }
  Eigen::MatrixXd x = b;
  l.solve_in_place(x);
  return x.col(0);
}

}  // namespace traceinv
