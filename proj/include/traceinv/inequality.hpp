#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "traceinv/bounds.hpp"
#include "traceinv/random.hpp"
#include "traceinv/spd_matrix.hpp"

namespace traceinv {

/// Outcome of one family of checks: how many cases ran, how many broke the
/// inequality, and the worst relative slack seen (negative means violated).
struct InequalityCheck {
  std::string name;
  long cases = 0;
  long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<std::string> examples;  // first few violations

  void record(double slack, double tolerance, const std::string& what) {
    ++cases;
    worst_slack = std::min(worst_slack, slack);
    if (slack < -tolerance) {
      ++violations;
      if (examples.size() < 5) examples.push_back(what);
    }
  }
};

struct InequalityReport {
  InequalityCheck superadditive{"trace-superadditivity"};
  InequalityCheck equality{"equality-for-proportional"};
  InequalityCheck subtractive{"trace-subtraction"};
  InequalityCheck harmonic{"harmonic-mean-superadditivity"};

  long total_violations() const {
    return superadditive.violations + equality.violations + subtractive.violations + harmonic.violations;
  }
};

inline nlohmann::ordered_json to_json(const InequalityCheck& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["cases"] = c.cases;
  j["violations"] = c.violations;
  j["worst_slack"] = c.worst_slack;
  j["examples"] = c.examples;
  return j;
}

inline nlohmann::ordered_json to_json(const InequalityReport& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto* c : {&r.superadditive, &r.equality, &r.subtractive, &r.harmonic}) j.push_back(to_json(*c));
  return j;
}

namespace detail {

inline Eigen::MatrixXd random_orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::MatrixXd g(n, n);
  std::normal_distribution<double> normal;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

/// Spectrum log-uniform over [1e-2, 1e2].
inline Eigen::VectorXd random_spectrum(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Eigen::VectorXd s(n);
  for (Index i = 0; i < n; ++i) s[i] = std::pow(10.0, unif(rng));
  return s;
}

inline Eigen::MatrixXd from_spectrum(const Eigen::MatrixXd& q, const Eigen::VectorXd& s) {
  Eigen::MatrixXd m = q * s.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

/// trace(M^-1) from an eigendecomposition.
inline double trace_inv_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseInverse().sum();
}

}  // namespace detail

/// Random checks of the trace inequality and its harmonic-mean root:
///  - 1/tr((A+B)^-1) >= 1/tr(A^-1) + 1/tr(B^-1) for random SPD A, B;
///  - equality when B = cA;
///  - 1/tr((A-B)^-1) <= 1/tr(A^-1) - 1/tr(B^-1) when A, B share eigenvectors
///    and every eigenvalue of A exceeds the matching one of B;
///  - H(x+y) >= H(x) + H(y) for random positive vectors (harmonic_trials of
///    them).
/// Traces are evaluated by eigendecomposition.
inline InequalityReport check_inequality_suite(int trials, Index n, std::uint64_t seed, int harmonic_trials = 10000,
                                               double slack_tolerance = 1e-12, double equality_tolerance = 1e-10) {
  InequalityReport report;
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int k = 0; k < trials; ++k) {
    const Eigen::MatrixXd a = detail::from_spectrum(detail::random_orthogonal(n, rng), detail::random_spectrum(n, rng));
    const Eigen::MatrixXd b = detail::from_spectrum(detail::random_orthogonal(n, rng), detail::random_spectrum(n, rng));
    const double ta = detail::trace_inv_eig(a), tb = detail::trace_inv_eig(b);
    const double lhs = 1.0 / detail::trace_inv_eig(a + b);
    const double rhs = 1.0 / ta + 1.0 / tb;
    report.superadditive.record((lhs - rhs) / rhs, slack_tolerance, "trial " + std::to_string(k));

    const double c = std::pow(10.0, 4.0 * unif(rng) - 2.0);
    const double lhs_eq = 1.0 / detail::trace_inv_eig(a + c * a);
    const double rhs_eq = 1.0 / ta + 1.0 / detail::trace_inv_eig(c * a);
    report.equality.record(-std::abs(lhs_eq - rhs_eq) / rhs_eq, equality_tolerance, "trial " + std::to_string(k));

    const Eigen::MatrixXd q = detail::random_orthogonal(n, rng);
    const Eigen::VectorXd lambda = detail::random_spectrum(n, rng);
    Eigen::VectorXd mu(n);
    for (Index i = 0; i < n; ++i) mu[i] = lambda[i] * (0.01 + 0.98 * unif(rng));
    const Eigen::MatrixXd as = detail::from_spectrum(q, lambda);
    const Eigen::MatrixXd bs = detail::from_spectrum(q, mu);
    const double lhs_neg = 1.0 / detail::trace_inv_eig(detail::from_spectrum(q, lambda - mu));
    const double rhs_neg = 1.0 / detail::trace_inv_eig(as) - 1.0 / detail::trace_inv_eig(bs);
    report.subtractive.record((rhs_neg - lhs_neg) / std::abs(lhs_neg), slack_tolerance, "trial " + std::to_string(k));
  }

  for (int k = 0; k < harmonic_trials; ++k) {
    const Eigen::VectorXd x = detail::random_spectrum(n, rng);
    const Eigen::VectorXd y = detail::random_spectrum(n, rng);
    const Eigen::VectorXd xy = x + y;
    const double lhs = harmonic_mean(xy);
    const double rhs = harmonic_mean(x) + harmonic_mean(y);
    report.harmonic.record((lhs - rhs) / rhs, slack_tolerance, "vector " + std::to_string(k));
  }
  return report;
}

}  // namespace traceinv
