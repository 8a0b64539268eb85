#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "traceinv/errors.hpp"
#include "traceinv/exact_trace.hpp"
#include "traceinv/hutchinson.hpp"
#include "traceinv/lanczos.hpp"
#include "traceinv/spd_matrix.hpp"
#include "traceinv/trace_estimate.hpp"

namespace traceinv {

/// How trace(M^-1) is computed.
struct TraceOptions {
  TraceMethod method = TraceMethod::exact_cholesky;
  int num_samples = 30;
  Index degree = 30;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

inline TraceEstimate estimate_trace_inv(const SpdMatrix& m, const TraceOptions& opt) {
  switch (opt.method) {
    case TraceMethod::exact_cholesky: return trace_inv_exact_cholesky(m, opt.threads);
    case TraceMethod::exact_eigen:
      return trace_inv_exact_eigen(m, SpdMatrix::identity(m.order())).estimate(0.0);
    case TraceMethod::hutchinson: return trace_inv_hutchinson(m, opt.num_samples, opt.seed, opt.threads);
    case TraceMethod::slq: return trace_inv_slq(m, opt.num_samples, opt.degree, opt.seed, opt.threads);
  }
  throw Error("estimate_trace_inv: unknown method");
}

/// The pencil (A, B) with tau(t) = trace((A + tB)^-1) / trace(B^-1) and its
/// normalization constants.
struct TauContext {
  SpdMatrix a;
  SpdMatrix b;
  double tau0 = 0.0;
  double trace_b_inv = 0.0;
  Index n = 0;
  std::optional<double> t_min;

  /// Computes trace(A^-1) and trace(B^-1) with `opt` (B = cI is done in
  /// closed form).
  static TauContext build(SpdMatrix a, SpdMatrix b, const TraceOptions& opt = {},
                          std::optional<double> t_min = std::nullopt) {
    if (a.order() != b.order()) throw DimensionMismatch("TauContext: A and B orders differ");
    TauContext ctx;
    ctx.n = a.order();
    ctx.trace_b_inv = b.is_identity() ? static_cast<double>(ctx.n) / b.shift()
                                      : estimate_trace_inv(b, opt).value;
    ctx.tau0 = estimate_trace_inv(a, opt).value / ctx.trace_b_inv;
    if (t_min && !(*t_min < 0.0)) throw InvalidArgument("TauContext: t_min must be negative");
    ctx.t_min = t_min;
    ctx.a = std::move(a);
    ctx.b = std::move(b);
    return ctx;
  }

  /// Context carrying only the normalization constants, for fitting from
  /// externally computed node values.
  static TauContext from_values(double tau0, double trace_b_inv, Index n,
                                std::optional<double> t_min = std::nullopt) {
    if (!(tau0 > 0.0) || !(trace_b_inv > 0.0)) throw InvalidArgument("TauContext: tau0 and trace(B^-1) must be positive");
    TauContext ctx;
    ctx.tau0 = tau0;
    ctx.trace_b_inv = trace_b_inv;
    ctx.n = n;
    ctx.t_min = t_min;
    return ctx;
  }
};

/// tau(t) through a trace back-end, counting every evaluation.
class TauFunction {
 public:
  TauFunction(const TauContext& ctx, TraceOptions opt)
      : ctx_(&ctx), opt_(opt), calls_(std::make_shared<std::atomic<long>>(0)) {}

  TraceEstimate estimate(double t) const {
    ++*calls_;
    TraceEstimate e = estimate_trace_inv(shifted_operand(ctx_->a, ctx_->b, t), opt_);
    e.value /= ctx_->trace_b_inv;
    e.std_error /= ctx_->trace_b_inv;
    return e;
  }

  double operator()(double t) const { return estimate(t).value; }

  long calls() const { return calls_->load(); }
  const TraceOptions& options() const noexcept { return opt_; }
  const TauContext& context() const noexcept { return *ctx_; }

 private:
  const TauContext* ctx_;
  TraceOptions opt_;
  std::shared_ptr<std::atomic<long>> calls_;
};

/// Nodes t_i with tau(t_i) and how each value was obtained.
struct InterpolantPoints {
  std::vector<double> t;
  std::vector<double> tau;
  std::vector<TraceEstimate> meta;

  std::size_t size() const noexcept { return t.size(); }

  /// Nodes strictly increasing and above t_min; values positive and strictly
  /// decreasing.
  void validate(std::optional<double> t_min = std::nullopt) const {
    if (t.size() != tau.size()) throw DimensionMismatch("InterpolantPoints: t and tau lengths differ");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t_min && !(t[i] > *t_min)) {
        throw InvalidArgument("InterpolantPoints: node " + std::to_string(t[i]) + " is not above t_min");
      }
      if (!(tau[i] > 0.0)) throw InvalidArgument("InterpolantPoints: tau values must be positive");
      if (i > 0 && !(t[i] > t[i - 1])) {
        throw InvalidArgument("InterpolantPoints: nodes must be distinct and strictly increasing");
      }
      if (i > 0 && !(tau[i] < tau[i - 1])) {
        throw InvalidArgument(
            "InterpolantPoints: tau is not decreasing between nodes " + std::to_string(t[i - 1]) + " and " +
            std::to_string(t[i]) + "; if the values are stochastic estimates, raise n_v");
      }
    }
  }
};

inline InterpolantPoints compute_interpolant_points(const TauFunction& tau, const std::vector<double>& nodes) {
  InterpolantPoints pts;
  for (double t : nodes) {
    TraceEstimate e = tau.estimate(t);
    pts.t.push_back(t);
    pts.tau.push_back(e.value);
    pts.meta.push_back(e);
  }
  pts.validate(tau.context().t_min);
  return pts;
}

/// `count` log-spaced nodes centred on 1/tau0, spanning `decades` in total.
inline std::vector<double> default_nodes(double tau0, int count, double decades = 4.0) {
  if (count < 0) throw InvalidArgument("default_nodes: count must be non-negative");
  std::vector<double> nodes;
  const double centre = -std::log10(tau0);
  for (int i = 0; i < count; ++i) {
    const double offset = count == 1 ? 0.0 : decades * (static_cast<double>(i) / (count - 1) - 0.5);
    nodes.push_back(std::pow(10.0, centre + offset));
  }
  return nodes;
}

/// count points log-spaced over [lo, hi].
inline std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw InvalidArgument("logspace: need 0 < lo <= hi and count >= 1");
  std::vector<double> out;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? lo : std::pow(10.0, a + (b - a) * i / (count - 1)));
  }
  return out;
}

}  // namespace traceinv
