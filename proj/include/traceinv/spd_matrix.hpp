#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "traceinv/errors.hpp"

namespace traceinv {

using Index = Eigen::Index;
using SparseMat = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Symmetric positive-definite operand.
///
/// The value represented is `stored + shift * I`, where the stored part is a
/// dense matrix, a sparse matrix, or absent (implicit identity storage). Both
/// stored variants keep the full symmetric pattern, so matrix-vector products
/// need no triangular bookkeeping. Stored data is shared between copies and
/// never mutated, so an SpdMatrix is cheap to copy and safe to share across
/// threads. Positive definiteness is only confirmed when a factorization is
/// attempted.
class SpdMatrix {
 public:
  enum class Storage { dense, sparse, identity };

  SpdMatrix() = default;

  /// Accepts a dense matrix that is symmetric within `tolerance` relative to
  /// its largest entry. The lower triangle is kept and mirrored.
  static SpdMatrix dense(const Eigen::MatrixXd& m, double tolerance = 1e-12) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw InvalidShape("SpdMatrix: dense input must be square and non-empty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tolerance * std::max(scale, 1e-300)) {
      throw InvalidArgument("SpdMatrix: input is not symmetric (max |M - M^T| = " +
                            std::to_string(asym) + ")");
    }
    auto data = std::make_shared<Eigen::MatrixXd>(m.rows(), m.cols());
    data->triangularView<Eigen::Lower>() = m.triangularView<Eigen::Lower>();
    data->triangularView<Eigen::StrictlyUpper>() = m.transpose().triangularView<Eigen::StrictlyUpper>();
    SpdMatrix out;
    out.n_ = m.rows();
    out.storage_ = Storage::dense;
    out.dense_ = std::move(data);
    return out;
  }

  /// Accepts a sparse matrix given either as its lower triangle or as the
  /// full symmetric pattern.
  static SpdMatrix sparse(const SparseMat& m, double tolerance = 1e-12) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw InvalidShape("SpdMatrix: sparse input must be square and non-empty");
    }
    SparseMat lower = m.triangularView<Eigen::Lower>();
    SparseMat upper_t = SparseMat(m.triangularView<Eigen::StrictlyUpper>()).transpose();
    if (upper_t.nonZeros() > 0) {
      const double scale = std::max(max_abs(lower), 1e-300);
      SparseMat strict_lower = m.triangularView<Eigen::StrictlyLower>();
      if (max_abs(SparseMat(strict_lower - upper_t)) > tolerance * scale) {
        throw InvalidArgument("SpdMatrix: sparse input is not symmetric");
      }
    }
    SparseMat strict = lower.triangularView<Eigen::StrictlyLower>();
    auto data = std::make_shared<SparseMat>(lower + SparseMat(strict.transpose()));
    data->makeCompressed();
    SpdMatrix out;
    out.n_ = m.rows();
    out.storage_ = Storage::sparse;
    out.sparse_ = std::move(data);
    return out;
  }

  /// `scale * I` with no stored entries.
  static SpdMatrix identity(Index n, double scale = 1.0) {
    if (n <= 0) throw InvalidShape("SpdMatrix: identity order must be positive");
    SpdMatrix out;
    out.n_ = n;
    out.storage_ = Storage::identity;
    out.shift_ = scale;
    return out;
  }

  static SpdMatrix diagonal(const Eigen::VectorXd& d) {
    return dense(Eigen::MatrixXd(d.asDiagonal()));
  }

  Index order() const noexcept { return n_; }
  Storage storage() const noexcept { return storage_; }
  bool is_identity() const noexcept { return storage_ == Storage::identity; }

  /// Diagonal multiple of the identity added on top of the stored part.
  double shift() const noexcept { return shift_; }

  const Eigen::MatrixXd& dense_data() const { return *dense_; }
  const SparseMat& sparse_data() const { return *sparse_; }

  double entry(Index i, Index j) const {
    double v = (i == j) ? shift_ : 0.0;
    if (storage_ == Storage::dense) v += (*dense_)(i, j);
    if (storage_ == Storage::sparse) v += sparse_->coeff(i, j);
    return v;
  }

  Eigen::VectorXd diagonal_entries() const {
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n_, shift_);
    if (storage_ == Storage::dense) d += dense_->diagonal();
    if (storage_ == Storage::sparse) d += sparse_->diagonal();
    return d;
  }

  double trace() const { return diagonal_entries().sum(); }

  /// y = M x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (x.size() != n_) {
      throw DimensionMismatch("SpdMatrix::apply: vector length " + std::to_string(x.size()) +
                              " != order " + std::to_string(n_));
    }
    Eigen::VectorXd y = shift_ * x;
    if (storage_ == Storage::dense) y.noalias() += (*dense_) * x;
    if (storage_ == Storage::sparse) y += (*sparse_) * x;
    return y;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m;
    switch (storage_) {
      case Storage::dense: m = *dense_; break;
      case Storage::sparse: m = Eigen::MatrixXd(*sparse_); break;
      case Storage::identity: m = Eigen::MatrixXd::Zero(n_, n_); break;
    }
    m.diagonal().array() += shift_;
    return m;
  }

  SparseMat to_sparse() const {
    SparseMat m;
    switch (storage_) {
      case Storage::dense: m = dense_->sparseView(); break;
      case Storage::sparse: m = *sparse_; break;
      case Storage::identity: m.resize(n_, n_); break;
    }
    if (shift_ != 0.0) {
      SparseMat d(n_, n_);
      d.setIdentity();
      m = m + shift_ * d;
    }
    m.makeCompressed();
    return m;
  }

  /// Same stored part with `delta` added to the implicit diagonal shift.
  SpdMatrix shifted(double delta) const {
    SpdMatrix out = *this;
    out.shift_ += delta;
    return out;
  }

 private:
  static double max_abs(const SparseMat& m) {
    double v = 0.0;
    for (Index k = 0; k < m.outerSize(); ++k)
      for (SparseMat::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
    return v;
  }

  Index n_ = 0;
  Storage storage_ = Storage::identity;
  double shift_ = 0.0;
  std::shared_ptr<const Eigen::MatrixXd> dense_;
  std::shared_ptr<const SparseMat> sparse_;
};

/// A + t B. When B is an implicit identity the result shares A's storage and
/// only moves the diagonal shift; otherwise the sum is materialized in the
/// denser of the two storage classes.
inline SpdMatrix shifted_operand(const SpdMatrix& a, const SpdMatrix& b, double t) {
  if (a.order() != b.order()) {
    throw DimensionMismatch("shifted_operand: orders differ (" + std::to_string(a.order()) +
                            " vs " + std::to_string(b.order()) + ")");
  }
  if (b.is_identity()) return a.shifted(t * b.shift());
  using S = SpdMatrix::Storage;
  if (a.storage() != S::dense && b.storage() == S::sparse) {
    SparseMat sum = a.to_sparse() + t * b.to_sparse();
    return SpdMatrix::sparse(sum);
  }
  Eigen::MatrixXd sum = a.to_dense();
  sum += t * b.to_dense();
  return SpdMatrix::dense(sum);
}

}  // namespace traceinv
