#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "traceinv/errors.hpp"
#include "traceinv/spd_matrix.hpp"

namespace traceinv {

struct TridiagonalEigen {
  Eigen::VectorXd values;          // ascending
  Eigen::VectorXd first_components;  // row 0 of the eigenvector matrix
  Eigen::MatrixXd vectors;         // full eigenvectors, only when requested
};

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (size diag.size() - 1), by implicit QL
/// iteration with Wilkinson shifts. Only the first row of the eigenvector
/// matrix is tracked unless `full_vectors` is set, which is all Gauss
/// quadrature needs.
inline TridiagonalEigen tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                          bool full_vectors = false) {
  const Index n = diag.size();
  if (n == 0) throw InvalidShape("tridiagonal_eigen: empty matrix");
  if (off.size() != n - 1) throw DimensionMismatch("tridiagonal_eigen: off-diagonal must have n-1 entries");

  std::vector<double> d(diag.data(), diag.data() + n);
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i + 1 < n; ++i) e[static_cast<std::size_t>(i)] = off[i];

  // z holds the rows of the eigenvector matrix being tracked.
  const Index tracked = full_vectors ? n : 1;
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(tracked, n);

  constexpr int max_iter = 60;
  const double eps = std::numeric_limits<double>::epsilon();
  for (Index l = 0; l < n; ++l) {
    int iter = 0;
    Index m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iter > max_iter) throw Error("tridiagonal_eigen: QL iteration did not converge");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (Index i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        for (Index k = 0; k < tracked; ++k) {
          f = z(k, i + 1);
          z(k, i + 1) = s * z(k, i) + c * f;
          z(k, i) = c * z(k, i) - s * f;
        }
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d[a] < d[b]; });

  TridiagonalEigen out;
  out.values.resize(n);
  out.first_components.resize(n);
  if (full_vectors) out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values[k] = d[src];
    out.first_components[k] = z(0, src);
    if (full_vectors) out.vectors.col(k) = z.col(src);
  }
  return out;
}

}  // namespace traceinv
