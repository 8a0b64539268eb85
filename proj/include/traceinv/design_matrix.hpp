#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "traceinv/errors.hpp"
#include "traceinv/spd_matrix.hpp"

namespace traceinv {

/// Householder reflector H = I - 2 u u^T / |u|^2, applied implicitly.
class Householder {
 public:
  explicit Householder(Eigen::VectorXd u) : u_(std::move(u)) {
    norm2_ = u_.squaredNorm();
    if (!(norm2_ > 0.0)) throw InvalidArgument("Householder: generating vector must be nonzero");
  }

  Index order() const noexcept { return u_.size(); }
  const Eigen::VectorXd& vector() const noexcept { return u_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return x - (2.0 * u_.dot(x) / norm2_) * u_;
  }

  /// H M, as a rank-1 update of the rows of M.
  Eigen::MatrixXd apply_left(const Eigen::MatrixXd& m) const {
    Eigen::RowVectorXd w = (u_.transpose() * m) * (2.0 / norm2_);
    return m - u_ * w;
  }

  /// M H, as a rank-1 update of the columns of M.
  Eigen::MatrixXd apply_right(const Eigen::MatrixXd& m) const {
    Eigen::VectorXd w = (m * u_) * (2.0 / norm2_);
    return m - w * u_.transpose();
  }

  Eigen::MatrixXd to_dense() const {
    const Index n = u_.size();
    return Eigen::MatrixXd::Identity(n, n) - (2.0 / norm2_) * u_ * u_.transpose();
  }

 private:
  Eigen::VectorXd u_;
  double norm2_ = 0.0;
};

/// Singular values exp(-coeff * ((i-1)/m)^exponent), i = 1..m.
inline Eigen::VectorXd decaying_singular_values(Index m, double coeff = 40.0, double exponent = 0.75) {
  Eigen::VectorXd s(m);
  for (Index i = 0; i < m; ++i) {
    s[i] = std::exp(-coeff * std::pow(static_cast<double>(i) / static_cast<double>(m), exponent));
  }
  return s;
}

/// X = U Sigma V^T with Householder U (n x n), V (m x m) and a prescribed
/// diagonal Sigma. X is materialized once through rank-1 updates; products
/// with X^T X go through the factored form.
class DesignMatrix {
 public:
  DesignMatrix(Index n, Index m, Eigen::VectorXd u, Eigen::VectorXd v, Eigen::VectorXd sigma)
      : n_(n), m_(m), u_(std::move(u)), v_(std::move(v)), sigma_(std::move(sigma)) {
    if (m < 1 || n <= m) {
      throw InvalidShape("DesignMatrix: need n > m >= 1, got n=" + std::to_string(n) +
                         " m=" + std::to_string(m));
    }
    if (u_.order() != n || v_.order() != m || sigma_.size() != m) {
      throw DimensionMismatch("DesignMatrix: generator lengths do not match n, m");
    }
    // Sigma V^T = diag(sigma) V  (V is symmetric).
    Eigen::MatrixXd top = v_.apply_right(Eigen::MatrixXd(sigma_.asDiagonal()));
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, m);
    padded.topRows(m) = top;
    x_ = u_.apply_left(padded);
  }

  Index rows() const noexcept { return n_; }
  Index cols() const noexcept { return m_; }
  const Eigen::MatrixXd& matrix() const noexcept { return x_; }
  const Eigen::VectorXd& singular_values() const noexcept { return sigma_; }
  const Householder& left() const noexcept { return u_; }
  const Householder& right() const noexcept { return v_; }

  /// X^T X = V Sigma^2 V, formed without touching X.
  Eigen::MatrixXd gram() const {
    Eigen::VectorXd s2 = sigma_.array().square();
    Eigen::MatrixXd g = v_.apply_left(Eigen::MatrixXd(s2.asDiagonal()));
    g = v_.apply_right(g);
    // Exact symmetry for downstream SPD checks.
    return 0.5 * (g + g.transpose());
  }

  /// X^T y = V Sigma^T U y.
  Eigen::VectorXd transpose_times(const Eigen::VectorXd& y) const {
    if (y.size() != n_) throw DimensionMismatch("DesignMatrix::transpose_times: length mismatch");
    Eigen::VectorXd uy = u_.apply(y);
    Eigen::VectorXd s = sigma_.cwiseProduct(uy.head(m_));
    return v_.apply(s);
  }

  /// X b = U Sigma V b.
  Eigen::VectorXd times(const Eigen::VectorXd& b) const {
    if (b.size() != m_) throw DimensionMismatch("DesignMatrix::times: length mismatch");
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(n_);
    padded.head(m_) = sigma_.cwiseProduct(v_.apply(b));
    return u_.apply(padded);
  }

 private:
  Index n_;
  Index m_;
  Householder u_;
  Householder v_;
  Eigen::VectorXd sigma_;
  Eigen::MatrixXd x_;
};

inline DesignMatrix build_design_matrix(Index n, Index m, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& v, double decay_coeff = 40.0,
                                        double decay_exp = 0.75) {
  if (m < 1 || n <= m) {
    throw InvalidShape("build_design_matrix: need n > m >= 1, got n=" + std::to_string(n) +
                       " m=" + std::to_string(m));
  }
  return DesignMatrix(n, m, u, v, decaying_singular_values(m, decay_coeff, decay_exp));
}

}  // namespace traceinv
