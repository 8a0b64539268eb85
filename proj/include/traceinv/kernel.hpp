#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Core>

#include "traceinv/errors.hpp"
#include "traceinv/spd_matrix.hpp"

namespace traceinv {

/// Points in the unit square, one per row.
class PointCloud {
 public:
  PointCloud() = default;

  explicit PointCloud(Eigen::MatrixX2d coords) : coords_(std::move(coords)) {
    if ((coords_.array() < 0.0).any() || (coords_.array() > 1.0).any()) {
      throw InvalidArgument("PointCloud: coordinates must lie in [0,1]");
    }
  }

  Index size() const noexcept { return coords_.rows(); }
  Eigen::Vector2d operator[](Index i) const { return coords_.row(i).transpose(); }
  const Eigen::MatrixX2d& coords() const noexcept { return coords_; }

 private:
  Eigen::MatrixX2d coords_;
};

/// side x side cell centres of a uniform grid over [0,1]^2, row-major in x.
inline PointCloud grid_points(Index side) {
  if (side < 1) throw InvalidArgument("grid_points: side must be >= 1");
  Eigen::MatrixX2d c(side * side, 2);
  const double h = 1.0 / static_cast<double>(side);
  for (Index i = 0; i < side; ++i) {
    for (Index j = 0; j < side; ++j) {
      c(i * side + j, 0) = (static_cast<double>(i) + 0.5) * h;
      c(i * side + j, 1) = (static_cast<double>(j) + 0.5) * h;
    }
  }
  return PointCloud(std::move(c));
}

/// count points drawn uniformly from [0,1]^2.
inline PointCloud random_points(Index count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("random_points: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixX2d c(count, 2);
  for (Index i = 0; i < count; ++i) {
    c(i, 0) = unif(rng);
    c(i, 1) = unif(rng);
  }
  return PointCloud(std::move(c));
}

/// Correlation as a function of Euclidean distance.
using DistanceKernel = std::function<double(double)>;

inline DistanceKernel exponential_decay(double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("exponential kernel: rho must be positive");
  return [rho](double r) { return std::exp(-r / rho); };
}

/// K_ij = kernel(|x_i - x_j|). The diagonal is kernel(0).
inline SpdMatrix build_kernel(const PointCloud& points, const DistanceKernel& kernel) {
  const Index n = points.size();
  if (n == 0) throw InvalidShape("build_kernel: empty point cloud");
  Eigen::MatrixXd k(n, n);
  const double k0 = kernel(0.0);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = k0;
    const Eigen::Vector2d xj = points[j];
    for (Index i = j + 1; i < n; ++i) {
      const double v = kernel((points[i] - xj).norm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return SpdMatrix::dense(k);
}

/// Isotropic exponential decay kernel exp(-|x - x'| / rho).
inline SpdMatrix build_exponential_kernel(const PointCloud& points, double rho) {
  return build_kernel(points, exponential_decay(rho));
}

}  // namespace traceinv
