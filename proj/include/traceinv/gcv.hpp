#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "traceinv/cholesky.hpp"
#include "traceinv/design_matrix.hpp"
#include "traceinv/differential_evolution.hpp"
#include "traceinv/errors.hpp"
#include "traceinv/exact_trace.hpp"
#include "traceinv/hutchinson.hpp"
#include "traceinv/interpolant.hpp"
#include "traceinv/lanczos.hpp"
#include "traceinv/random.hpp"
#include "traceinv/tau.hpp"

namespace traceinv {

/// Ridge regression data z = X beta + delta with a Householder-built design
/// matrix, plus the GCV search settings.
struct GcvProblem {
  DesignMatrix x;
  Eigen::VectorXd z;
  double shift = 1e-3;  // s in A = X^T X + s I
  double theta_lo = 1e-7;
  double theta_hi = 10.0;
  double sigma = 0.4;
  Eigen::VectorXd beta_true;
  std::uint64_t seed = 0;

  Index n() const noexcept { return x.rows(); }
  Index m() const noexcept { return x.cols(); }

  /// t = n theta - s.
  double t_of(double theta) const { return static_cast<double>(n()) * theta - shift; }
};

/// Default data seed for the n = 1000, m = 500 study. V(theta) has one
/// interior minimum for most draws; this one shows two.
inline constexpr std::uint64_t kDefaultGcvSeed = 76;

/// Generates u, v, beta ~ N(0, I) and delta ~ N(0, sigma^2 I), each from its
/// own stream of `seed`.
inline GcvProblem make_gcv_problem(Index n, Index m, std::uint64_t seed, double shift = 1e-3, double sigma = 0.4,
                                   double decay_coeff = 40.0, double decay_exp = 0.75) {
  if (!(shift > 0.0)) throw InvalidArgument("make_gcv_problem: shift s must be positive");
  auto ru = stream_engine(seed, 0);
  auto rv = stream_engine(seed, 1);
  auto rb = stream_engine(seed, 2);
  auto rd = stream_engine(seed, 3);
  const Eigen::VectorXd u = standard_normal(n, ru);
  const Eigen::VectorXd v = standard_normal(m, rv);
  DesignMatrix x = build_design_matrix(n, m, u, v, decay_coeff, decay_exp);
  Eigen::VectorXd beta = standard_normal(m, rb);
  Eigen::VectorXd delta = sigma * standard_normal(n, rd);
  Eigen::VectorXd z = x.matrix() * beta + delta;
  return GcvProblem{std::move(x), std::move(z), shift, 1e-7, 10.0, sigma, std::move(beta), seed};
}

/// Quantities shared by every GCV evaluation of one problem.
class GcvSystem {
 public:
  explicit GcvSystem(const GcvProblem& problem)
      : problem_(&problem), gram_(problem.x.gram()), xtz_(problem.x.matrix().transpose() * problem.z) {
    Eigen::MatrixXd a = gram_;
    a.diagonal().array() += problem.shift;
    ctx_a_ = SpdMatrix::dense(a);
  }

  const GcvProblem& problem() const noexcept { return *problem_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }

  /// A = X^T X + s I, so that A + tI = X^T X + n theta I.
  const SpdMatrix& a() const noexcept { return ctx_a_; }

  /// X^T X + n theta I.
  SpdMatrix regularized(double theta) const { return ctx_a_.shifted(problem_->t_of(theta)); }

  /// (1/n) |z - X w|^2 with (X^T X + n theta I) w = X^T z, from a factor of
  /// the regularized matrix.
  double numerator(const CholeskyFactor& l) const {
    const Eigen::VectorXd w = l.solve_spd(xtz_);
    const Eigen::VectorXd r = problem_->z - problem_->x.matrix() * w;
    return r.squaredNorm() / static_cast<double>(problem_->n());
  }

  /// ((n - m + n theta m tau) / n)^2.
  double denominator(double theta, double tau) const {
    const double n = static_cast<double>(problem_->n());
    const double m = static_cast<double>(problem_->m());
    const double d = (n - m + n * theta * m * tau) / n;
    return d * d;
  }

 private:
  const GcvProblem* problem_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xtz_;
  SpdMatrix ctx_a_;
};

/// Where tau(t) = trace((A + tI)^-1)/m comes from inside V(theta).
struct TauSource {
  TraceOptions exact;                        // back-end used when no interpolant is given
  const Interpolant* interpolant = nullptr;  // optional
};

/// Counts of tau evaluations and the time spent in exact ones.
struct GcvCounters {
  long exact_calls = 0;
  long total_calls = 0;
  double exact_seconds = 0.0;
};

/// tau at t = n theta - s from the back-end of `opt`, reusing the factor of
/// the regularized matrix when the back-end needs one.
inline TraceEstimate gcv_exact_tau(const GcvSystem& sys, const CholeskyFactor& l, double theta,
                                   const TraceOptions& opt) {
  const double m = static_cast<double>(sys.problem().m());
  TraceEstimate e;
  switch (opt.method) {
    case TraceMethod::exact_cholesky:
      e.value = inverse_frobenius_squared(l, opt.threads);
      e.method = TraceMethod::exact_cholesky;
      break;
    case TraceMethod::hutchinson: e = trace_inv_hutchinson(l, opt.num_samples, opt.seed, opt.threads); break;
    case TraceMethod::slq:
      e = trace_inv_slq(sys.regularized(theta), opt.num_samples, opt.degree, opt.seed, opt.threads);
      break;
    case TraceMethod::exact_eigen: e = estimate_trace_inv(sys.regularized(theta), opt); break;
  }
  e.value /= m;
  e.std_error /= m;
  return e;
}

/// Generalized cross-validation function V(theta).
inline double gcv_value(const GcvSystem& sys, double theta, const TauSource& source, GcvCounters* counters = nullptr) {
  const GcvProblem& prob = sys.problem();
  if (!(theta > 0.0)) throw InvalidArgument("gcv_value: theta must be positive");
  const CholeskyFactor l = cholesky(sys.regularized(theta));
  const double num = sys.numerator(l);
  double tau = 0.0;
  if (source.interpolant) {
    tau = source.interpolant->evaluate(prob.t_of(theta));
  } else {
    const auto start = std::chrono::steady_clock::now();
    tau = gcv_exact_tau(sys, l, theta, source.exact).value;
    if (counters) {
      ++counters->exact_calls;
      counters->exact_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  }
  if (counters) ++counters->total_calls;
  return num / sys.denominator(theta, tau);
}

/// |log10 theta_interp - log10 theta_exact| / |log10 theta_exact|.
inline double relative_log_theta_error(double theta_interp, double theta_exact) {
  if (!(theta_interp > 0.0) || !(theta_exact > 0.0)) {
    throw InvalidArgument("relative_log_theta_error: both arguments must be positive");
  }
  const double le = std::log10(theta_exact);
  return std::abs(std::log10(theta_interp) - le) / std::abs(le);
}

/// How tau is obtained during one optimization run.
struct GcvMode {
  TraceOptions trace;
  int rational_p = 0;          // 0: every call goes to the trace back-end
  std::vector<double> nodes;   // empty: the standard nodes for rational_p

  static std::vector<double> standard_nodes(int p) {
    if (p == 1) return {1e-3, 1e-1};
    if (p == 2) return {1e-3, 1e-2, 1e-1, 1.0};
    return logspace(1e-3, 1.0, 2 * p);
  }

  std::vector<double> effective_nodes() const { return nodes.empty() ? standard_nodes(rational_p) : nodes; }

  std::string label() const {
    if (rational_p == 0) return "No interpolation";
    return "Rational polynomial, p = " + std::to_string(rational_p);
  }
};

/// One row of the method comparison: counts, timings and the optimum.
struct OptimizationResult {
  std::string algorithm;
  std::string interpolation;
  std::vector<double> nodes;
  long n_tr = 0;
  long n_tot = 0;
  double t_tr = 0.0;
  double t_tot = 0.0;
  double theta = 0.0;
  double value = 0.0;
  double log10_theta = 0.0;
  std::optional<double> error;  // vs the exact run, when known
  double tau0 = 0.0;
  int generations = 0;
  bool converged = false;
  std::optional<Interpolant> interpolant;
};

inline nlohmann::ordered_json to_json(const OptimizationResult& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["interpolate"] = r.interpolation;
  j["interpolant_points"] = r.nodes;
  j["N_tr"] = r.n_tr;
  j["N_tot"] = r.n_tot;
  j["T_tr"] = r.t_tr;
  j["T_tot"] = r.t_tot;
  j["V_theta_star"] = r.value;
  j["log10_theta_star"] = r.log10_theta;
  j["theta_star"] = r.theta;
  j["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
  j["tau0"] = r.tau0;
  j["generations"] = r.generations;
  j["converged"] = r.converged;
  j["interpolant"] = r.interpolant ? to_json(*r.interpolant) : nlohmann::ordered_json(nullptr);
  return j;
}

inline std::string algorithm_name(TraceMethod m) {
  switch (m) {
    case TraceMethod::exact_cholesky: return "Cholesky";
    case TraceMethod::exact_eigen: return "Eigen";
    case TraceMethod::hutchinson: return "Hutchinson";
    case TraceMethod::slq: return "SLQ";
  }
  return "unknown";
}

/// Fits the rational interpolant of tau for `mode`: tau0 and the 2p node
/// values come from the mode's trace back-end (2p + 1 evaluations). The pole
/// check covers the whole theta search interval.
inline Interpolant fit_gcv_interpolant(const GcvSystem& sys, const GcvMode& mode, GcvCounters& counters,
                                       double& tau0_out) {
  const GcvProblem& prob = sys.problem();
  auto timed = [&](double t) {
    const auto start = std::chrono::steady_clock::now();
    const CholeskyFactor l = cholesky(sys.a().shifted(t));
    const double theta = (t + prob.shift) / static_cast<double>(prob.n());
    TraceEstimate e = gcv_exact_tau(sys, l, theta, mode.trace);
    counters.exact_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++counters.exact_calls;
    ++counters.total_calls;
    return e;
  };
  const double tau0 = timed(0.0).value;
  tau0_out = tau0;
  InterpolantPoints pts;
  for (double t : mode.effective_nodes()) {
    TraceEstimate e = timed(t);
    pts.t.push_back(t);
    pts.tau.push_back(e.value);
    pts.meta.push_back(e);
  }
  const TauContext ctx = TauContext::from_values(tau0, static_cast<double>(prob.m()), prob.m());
  return fit_rational(ctx, pts, mode.rational_p, EvalInterval{prob.t_of(prob.theta_lo), prob.t_of(prob.theta_hi)});
}

/// Minimizes V(theta) over the problem's theta interval with differential
/// evolution in log10(theta).
inline OptimizationResult gcv_experiment(const GcvProblem& problem, const GcvMode& mode, const DeOptions& de = {}) {
  const auto start = std::chrono::steady_clock::now();
  const GcvSystem sys(problem);
  GcvCounters counters;
  OptimizationResult res;
  res.algorithm = algorithm_name(mode.trace.method);
  res.interpolation = mode.label();

  TauSource source;
  source.exact = mode.trace;
  if (mode.rational_p > 0) {
    res.nodes = mode.effective_nodes();
    res.interpolant = fit_gcv_interpolant(sys, mode, counters, res.tau0);
    source.interpolant = &*res.interpolant;
  }
  const long fitted_calls = counters.exact_calls;

  auto objective = [&](double log_theta) {
    return gcv_value(sys, std::pow(10.0, log_theta), source, &counters);
  };
  DeOptions serial = de;
  serial.threads = 1;  // counters are not synchronized
  const DeResult opt =
      differential_evolution(objective, std::log10(problem.theta_lo), std::log10(problem.theta_hi), serial);
  if (mode.rational_p > 0 && counters.exact_calls != fitted_calls) {
    throw Error("gcv_experiment: trace back-end was called during interpolated optimization");
  }

  res.n_tr = counters.exact_calls;
  res.n_tot = counters.total_calls;
  res.t_tr = counters.exact_seconds;
  res.log10_theta = opt.x[0];
  res.theta = std::pow(10.0, opt.x[0]);
  res.value = opt.value;
  res.generations = opt.generations;
  res.converged = opt.converged;
  res.t_tot = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

/// Local minima of a sampled curve: interior points where the forward
/// difference changes sign from negative to positive.
inline std::vector<std::size_t> local_minima(const std::vector<double>& values) {
  std::vector<std::size_t> minima;
  int last_sign = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double d = values[i + 1] - values[i];
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign < 0 && sign > 0) minima.push_back(i);
    last_sign = sign;
  }
  return minima;
}

/// theta grid for curve output: `count` log-spaced points over the search
/// interval plus a linear run through theta = s/n (t = 0).
inline std::vector<double> gcv_theta_grid(const GcvProblem& problem, int count = 300, int linear = 21,
                                          double t_halfwidth = 1e-6) {
  std::vector<double> grid = logspace(problem.theta_lo, problem.theta_hi, count);
  const double n = static_cast<double>(problem.n());
  for (int i = 0; i < linear; ++i) {
    const double t = -t_halfwidth + 2.0 * t_halfwidth * i / (linear - 1);
    const double theta = (t + problem.shift) / n;
    if (theta > problem.theta_lo) grid.push_back(theta);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace traceinv
