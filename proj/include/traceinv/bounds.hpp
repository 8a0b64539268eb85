#pragma once

#include <cmath>
#include <string>

#include "traceinv/errors.hpp"

namespace traceinv {

/// tau0 / (1 + t tau0). Never below tau(t) for t >= 0, equal at t = 0 and
/// asymptotically equal as t grows.
inline double tau_upper_bound(double t, double tau0) {
  if (!(tau0 > 0.0)) throw InvalidArgument("tau_upper_bound: tau0 must be positive");
  return tau0 / (1.0 + t * tau0);
}

/// Arithmetic-harmonic mean bound n^2 / (trace(A) + t trace(B)) on
/// trace((A + tB)^-1), divided by trace_b_inv so it can be compared with tau.
/// With the default trace_b_inv = 1 the raw trace bound is returned.
inline double tau_lower_bound(double t, double trace_a, double trace_b, long long n,
                              double trace_b_inv = 1.0) {
  const double denom = trace_a + t * trace_b;
  if (!(denom > 0.0)) throw InvalidArgument("tau_lower_bound: trace(A) + t trace(B) must be positive");
  const double nn = static_cast<double>(n);
  return nn * nn / denom / trace_b_inv;
}

/// Harmonic mean n / sum(1/x_i) of positive entries.
template <typename Vec>
double harmonic_mean(const Vec& x) {
  double s = 0.0;
  for (auto v : x) s += 1.0 / v;
  return static_cast<double>(x.size()) / s;
}

}  // namespace traceinv
