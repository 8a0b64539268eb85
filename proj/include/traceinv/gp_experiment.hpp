#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "traceinv/bounds.hpp"
#include "traceinv/exact_trace.hpp"
#include "traceinv/interpolant.hpp"
#include "traceinv/kernel.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/tau.hpp"

namespace traceinv {

struct GpConfig {
  Index side = 50;
  double rho = 0.1;
  bool random_points = false;  // uniform random instead of the cell-centre grid
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> node_sets = {{1e-1}, {1e-4, 4e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 1e2, 1e3}};
  std::vector<double> sweep = logspace(1e-4, 1e3, 100);
  std::size_t threads = 0;
};

/// Interpolated curve for one node set.
struct GpCurve {
  int p = 0;
  std::vector<double> nodes;
  Interpolant interpolant;
  std::vector<double> tau;
  std::vector<double> rel_error;
  double max_rel_error = 0.0;
};

struct GpResult {
  double tau0 = 0.0;
  Index n = 0;
  std::vector<double> t;
  std::vector<double> tau_exact;
  std::vector<double> tau_upper;
  std::vector<double> tau_lower;
  double upper_max_rel_error = 0.0;
  std::vector<GpCurve> curves;
};

/// Exact tau(t) = trace((K + tI)^-1)/n at every t, one Cholesky per point.
/// Points run concurrently; each writes its own slot.
inline std::vector<double> exact_tau_curve(const SpdMatrix& k, const std::vector<double>& t, std::size_t threads = 0) {
  std::vector<double> out(t.size());
  const double n = static_cast<double>(k.order());
  parallel_for(
      t.size(), [&](std::size_t i) { out[i] = trace_inv_exact_cholesky(k.shifted(t[i]), 1).value / n; }, threads);
  return out;
}

/// Correlation-matrix study: exact tau over the sweep, both bounds, and a
/// basis-function interpolant per node set with its relative error.
inline GpResult gp_experiment(const GpConfig& cfg) {
  if (cfg.side < 1 || cfg.side * cfg.side > 10000) throw InvalidArgument("gp_experiment: need 1 <= side^2 <= 10^4");
  const PointCloud points =
      cfg.random_points ? random_points(cfg.side * cfg.side, cfg.seed) : grid_points(cfg.side);
  const SpdMatrix k = build_exponential_kernel(points, cfg.rho);
  const SpdMatrix identity = SpdMatrix::identity(k.order());

  TraceOptions opt;
  opt.threads = cfg.threads;
  const TauContext ctx = TauContext::build(k, identity, opt);

  GpResult res;
  res.tau0 = ctx.tau0;
  res.n = ctx.n;
  res.t = cfg.sweep;
  res.tau_exact = exact_tau_curve(k, cfg.sweep, cfg.threads);
  const double trace_k = k.trace();
  for (std::size_t i = 0; i < res.t.size(); ++i) {
    const double t = res.t[i];
    res.tau_upper.push_back(tau_upper_bound(t, ctx.tau0));
    res.tau_lower.push_back(tau_lower_bound(t, trace_k, static_cast<double>(ctx.n), ctx.n, ctx.trace_b_inv));
    res.upper_max_rel_error =
        std::max(res.upper_max_rel_error, std::abs(res.tau_upper.back() - res.tau_exact[i]) / res.tau_exact[i]);
  }

  for (const auto& nodes : cfg.node_sets) {
    GpCurve curve;
    curve.p = static_cast<int>(nodes.size());
    curve.nodes = nodes;
    InterpolantPoints pts;
    pts.t = nodes;
    pts.tau = exact_tau_curve(k, nodes, cfg.threads);
    for (double v : pts.tau) {
      TraceEstimate e;
      e.value = v;
      pts.meta.push_back(e);
    }
    curve.interpolant = fit_basis(ctx, pts);
    for (std::size_t i = 0; i < res.t.size(); ++i) {
      const double v = curve.interpolant.evaluate(res.t[i]);
      curve.tau.push_back(v);
      curve.rel_error.push_back(std::abs(v - res.tau_exact[i]) / res.tau_exact[i]);
      curve.max_rel_error = std::max(curve.max_rel_error, curve.rel_error.back());
    }
    res.curves.push_back(std::move(curve));
  }
  return res;
}

inline nlohmann::ordered_json summary_json(const GpResult& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["tau0"] = r.tau0;
  j["upper_bound_max_rel_error"] = r.upper_max_rel_error;
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (const auto& c : r.curves) {
    nlohmann::ordered_json cj;
    cj["p"] = c.p;
    cj["nodes"] = c.nodes;
    cj["max_rel_error"] = c.max_rel_error;
    cj["condition"] = c.interpolant.condition();
    cj["interpolant"] = to_json(c.interpolant);
    curves.push_back(std::move(cj));
  }
  j["curves"] = std::move(curves);
  return j;
}

}  // namespace traceinv
