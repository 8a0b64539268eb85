#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "traceinv/bounds.hpp"
#include "traceinv/errors.hpp"
#include "traceinv/ortho.hpp"
#include "traceinv/tau.hpp"

namespace traceinv {

/// Below this fraction of the smallest node the basis interpolant oscillates
/// and is not evaluated unless forced.
inline constexpr double kBasisFloorFactor = 1e-3;

/// Fitted approximation of tau(t).
///
///   bound:    tau0 / (1 + t tau0)
///   basis:    1/tau(t) = 1/tau0 + t + sum_j w_j phi_j^perp(t / l)
///   rational: tau(t) = (t^p + a_{p-1} t^{p-1} + .. + a_0) /
///                      (t^{p+1} + b_p t^p + .. + b_0),   a_0 = b_0 tau0
///
/// Immutable once fitted.
class Interpolant {
 public:
  enum class Variant { bound, basis, rational };

  static Interpolant bound(double tau0) {
    if (!(tau0 > 0.0)) throw InvalidArgument("Interpolant: tau0 must be positive");
    Interpolant f;
    f.variant_ = Variant::bound;
    f.tau0_ = tau0;
    return f;
  }

  static Interpolant basis(double tau0, std::vector<double> weights, double scale, OrthoCoefficients coeffs,
                           std::vector<double> nodes) {
    Interpolant f;
    f.variant_ = Variant::basis;
    f.tau0_ = tau0;
    f.p_ = static_cast<int>(weights.size());
    f.weights_ = std::move(weights);
    f.scale_ = scale;
    f.ortho_ = std::move(coeffs);
    f.nodes_ = std::move(nodes);
    return f;
  }

  /// numerator: a_0 .. a_{p-1} (a_p = 1 implied for p >= 1);
  /// denominator: b_0 .. b_p (b_{p+1} = 1 implied).
  static Interpolant rational(double tau0, std::vector<double> numerator, std::vector<double> denominator,
                              std::vector<double> nodes) {
    Interpolant f;
    f.variant_ = Variant::rational;
    f.tau0_ = tau0;
    f.p_ = static_cast<int>(denominator.size()) - 1;
    f.num_ = std::move(numerator);
    f.den_ = std::move(denominator);
    f.nodes_ = std::move(nodes);
    return f;
  }

  Variant variant() const noexcept { return variant_; }
  int p() const noexcept { return p_; }
  double tau0() const noexcept { return tau0_; }
  double scale() const noexcept { return scale_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& numerator() const noexcept { return num_; }
  const std::vector<double>& denominator() const noexcept { return den_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const OrthoCoefficients& ortho() const noexcept { return ortho_; }

  /// 2-norm condition number of the fitting system (0 when nothing was solved).
  double condition() const noexcept { return condition_; }
  double residual() const noexcept { return residual_; }
  void set_diagnostics(double condition, double residual) {
    condition_ = condition;
    residual_ = residual;
  }

  /// Smallest t > 0 the basis variant evaluates without `force`.
  double basis_floor() const {
    if (variant_ != Variant::basis || nodes_.empty()) return 0.0;
    return kBasisFloorFactor * nodes_.front();
  }

  double operator()(double t) const { return evaluate(t); }

  double evaluate(double t, bool force = false) const {
    switch (variant_) {
      case Variant::bound: return tau_upper_bound(t, tau0_);
      case Variant::basis: return eval_basis(t, force);
      case Variant::rational: return eval_rational(t);
    }
    throw Error("Interpolant: unknown variant");
  }

  /// 1/tau = 1/tau0 + t + sum_j w_j phi_j^perp(t/l).
  double eval_basis(double t, bool force = false) const {
    if (variant_ != Variant::basis) throw InvalidArgument("eval_basis: not a basis interpolant");
    if (t < 0.0) throw InvalidArgument("eval_basis: t must be non-negative");
    if (t == 0.0) return tau0_;
    if (!force && t < basis_floor()) {
      throw InvalidArgument("eval_basis: t = " + std::to_string(t) + " is below " + std::to_string(basis_floor()) +
                            " where the basis interpolant oscillates; use the rational variant or force");
    }
    double inv = 1.0 / tau0_ + t;
    for (int j = 0; j < p_; ++j) {
      inv += weights_[static_cast<std::size_t>(j)] * eval_ortho_function(ortho_, j + 1, t / scale_);
    }
    if (!(inv > 0.0)) {
      throw NonPositiveResult("eval_basis: 1/tau evaluated to " + std::to_string(inv) + " at t = " + std::to_string(t));
    }
    return 1.0 / inv;
  }

  double eval_rational(double t) const {
    if (variant_ != Variant::rational) throw InvalidArgument("eval_rational: not a rational interpolant");
    if (t == 0.0) return tau0_;
    const double num = numerator_at(t);
    const double den = denominator_at(t);
    if (!(std::abs(den) >= 1e-300 * std::max(std::abs(num), 1.0))) {
      throw PoleInDomain("eval_rational: denominator vanishes at t = " + std::to_string(t), {t});
    }
    return num / den;
  }

  double numerator_at(double t) const {
    if (p_ == 0) return num_.front();
    double v = 1.0;
    for (int k = p_ - 1; k >= 0; --k) v = v * t + num_[static_cast<std::size_t>(k)];
    return v;
  }

  double denominator_at(double t) const {
    double v = 1.0;
    for (int k = p_; k >= 0; --k) v = v * t + den_[static_cast<std::size_t>(k)];
    return v;
  }

  /// Real roots of the rational denominator.
  std::vector<double> poles() const {
    if (variant_ != Variant::rational) return {};
    const Index deg = p_ + 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (Index i = 0; i < deg; ++i) companion(i, deg - 1) = -den_[static_cast<std::size_t>(i)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<double> roots;
    for (Index i = 0; i < deg; ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z.real()))) roots.push_back(z.real());
    }
    std::sort(roots.begin(), roots.end());
    return roots;
  }

 private:
  Variant variant_ = Variant::bound;
  double tau0_ = 1.0;
  int p_ = 0;
  std::vector<double> weights_;
  double scale_ = 1.0;
  OrthoCoefficients ortho_;
  std::vector<double> num_;
  std::vector<double> den_;
  std::vector<double> nodes_;
  double condition_ = 0.0;
  double residual_ = 0.0;
};

inline std::string to_string(Interpolant::Variant v) {
  switch (v) {
    case Interpolant::Variant::bound: return "bound";
    case Interpolant::Variant::basis: return "basis";
    case Interpolant::Variant::rational: return "rational";
  }
  return "unknown";
}

inline Interpolant::Variant parse_variant(const std::string& s) {
  if (s == "bound") return Interpolant::Variant::bound;
  if (s == "basis") return Interpolant::Variant::basis;
  if (s == "rational") return Interpolant::Variant::rational;
  throw InvalidArgument("unknown interpolant variant '" + s + "'");
}

namespace detail {

struct LinearSolve {
  Eigen::VectorXd x;
  double condition = 0.0;
  double residual = 0.0;
};

/// Column-equilibrated LU with partial pivoting. Reports the 2-norm condition
/// number of the equilibrated system and the relative residual.
inline LinearSolve solve_dense(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, const char* who) {
  Eigen::VectorXd col_scale(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double s = m.col(j).cwiseAbs().maxCoeff();
    if (!(s > 0.0)) throw SingularSystem(std::string(who) + ": zero column in the interpolation system");
    col_scale[j] = 1.0 / s;
  }
  const Eigen::MatrixXd scaled = m * col_scale.asDiagonal();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& sv = svd.singularValues();
  LinearSolve out;
  out.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  if (!(out.condition < 1e15)) {
    throw SingularSystem(std::string(who) + ": interpolation system is singular (coincident nodes?)");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
  const Eigen::VectorXd y = lu.solve(rhs);
  out.x = col_scale.asDiagonal() * y;
  const double rhs_norm = std::max(rhs.norm(), 1e-300);
  out.residual = (m * out.x - rhs).norm() / rhs_norm;
  return out;
}

}  // namespace detail

/// Basis-function interpolant through the given nodes. The number of nodes
/// must equal coeffs.order(); zero nodes gives the upper bound.
inline Interpolant fit_basis(const TauContext& ctx, const InterpolantPoints& pts, const OrthoCoefficients& coeffs) {
  pts.validate(ctx.t_min);
  const int p = static_cast<int>(pts.size());
  if (p != coeffs.order()) {
    throw InvalidArgument("fit_basis: " + std::to_string(p) + " nodes but orthogonal basis of order " +
                          std::to_string(coeffs.order()));
  }
  if (p == 0) return Interpolant::basis(ctx.tau0, {}, 1.0, coeffs, {});
  for (double t : pts.t) {
    if (!(t > 0.0)) throw InvalidArgument("fit_basis: nodes must be positive");
  }
  const double scale = pts.t.back();
  Eigen::MatrixXd m(p, p);
  Eigen::VectorXd rhs(p);
  for (int i = 0; i < p; ++i) {
    const double t = pts.t[static_cast<std::size_t>(i)];
    for (int j = 0; j < p; ++j) m(i, j) = eval_ortho_function(coeffs, j + 1, t / scale);
    rhs[i] = 1.0 / pts.tau[static_cast<std::size_t>(i)] - 1.0 / ctx.tau0 - t;
  }
  const auto sol = detail::solve_dense(m, rhs, "fit_basis");
  std::vector<double> w(sol.x.data(), sol.x.data() + p);
  Interpolant f = Interpolant::basis(ctx.tau0, std::move(w), scale, coeffs, pts.t);
  f.set_diagnostics(sol.condition, sol.residual);
  return f;
}

/// Convenience overload generating the orthogonal basis for pts.size() nodes.
inline Interpolant fit_basis(const TauContext& ctx, const InterpolantPoints& pts) {
  if (pts.size() == 0) return Interpolant::basis(ctx.tau0, {}, 1.0, OrthoCoefficients{}, {});
  return fit_basis(ctx, pts, gram_schmidt(static_cast<int>(pts.size())));
}

/// Interval [lo, hi] in t where the rational interpolant must be pole-free.
struct EvalInterval {
  double lo;
  double hi;
};

/// Rational interpolant of order p through 2p nodes. The fitted denominator is
/// checked for real roots inside `interval`, defaulting to
/// [-|t_min|/2, 10 max(t_i)] (lower end 0 when t_min is unknown).
inline Interpolant fit_rational(const TauContext& ctx, const InterpolantPoints& pts, int p,
                                std::optional<EvalInterval> interval = std::nullopt) {
  if (p < 0) throw InvalidArgument("fit_rational: p must be non-negative");
  if (static_cast<int>(pts.size()) != 2 * p) {
    throw InvalidArgument("fit_rational: order p = " + std::to_string(p) + " needs " + std::to_string(2 * p) +
                          " nodes, got " + std::to_string(pts.size()));
  }
  pts.validate(ctx.t_min);
  const double tau0 = ctx.tau0;
  if (p == 0) {
    const double b0 = 1.0 / tau0;
    return Interpolant::rational(tau0, {b0 * tau0}, {b0}, {});
  }

  // Unknowns: a_1 .. a_{p-1}, b_0 .. b_p.
  const int dim = 2 * p;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs(dim);
  for (int i = 0; i < dim; ++i) {
    const double t = pts.t[static_cast<std::size_t>(i)];
    const double tau = pts.tau[static_cast<std::size_t>(i)];
    for (int k = 1; k <= p - 1; ++k) m(i, k - 1) = -std::pow(t, k);
    m(i, p - 1) = tau - tau0;
    for (int k = 1; k <= p; ++k) m(i, p - 1 + k) = tau * std::pow(t, k);
    rhs[i] = std::pow(t, p) - tau * std::pow(t, p + 1);
  }
  const auto sol = detail::solve_dense(m, rhs, "fit_rational");
  std::vector<double> den(static_cast<std::size_t>(p + 1));
  for (int k = 0; k <= p; ++k) den[static_cast<std::size_t>(k)] = sol.x[p - 1 + k];
  std::vector<double> num(static_cast<std::size_t>(p));
  num[0] = den[0] * tau0;
  for (int k = 1; k <= p - 1; ++k) num[static_cast<std::size_t>(k)] = sol.x[k - 1];

  Interpolant f = Interpolant::rational(tau0, std::move(num), std::move(den), pts.t);
  f.set_diagnostics(sol.condition, sol.residual);

  EvalInterval dom = interval.value_or(
      EvalInterval{ctx.t_min ? -std::abs(*ctx.t_min) / 2.0 : 0.0, 10.0 * pts.t.back()});
  std::vector<double> inside;
  const std::vector<double> roots = f.poles();
  for (double r : roots) {
    if (r >= dom.lo && r <= dom.hi) inside.push_back(r);
  }
  if (!inside.empty()) {
    std::string where;
    for (double r : inside) where += (where.empty() ? "" : ", ") + std::to_string(r);
    throw PoleInDomain("fit_rational: denominator has real root(s) " + where + " inside [" + std::to_string(dom.lo) +
                           ", " + std::to_string(dom.hi) + "]; move the interpolant points slightly",
                       roots);
  }
  return f;
}

/// {variant, p, tau0, scale, coefficients[], nodes[]}. Basis coefficients are
/// the weights w_1..w_p; rational coefficients are a_0..a_{p-1} followed by
/// b_0..b_p.
inline nlohmann::ordered_json to_json(const Interpolant& f) {
  nlohmann::ordered_json j;
  j["variant"] = to_string(f.variant());
  j["p"] = f.p();
  j["tau0"] = f.tau0();
  j["scale"] = f.scale();
  nlohmann::ordered_json c = nlohmann::ordered_json::array();
  if (f.variant() == Interpolant::Variant::basis) {
    for (double w : f.weights()) c.push_back(w);
  } else if (f.variant() == Interpolant::Variant::rational) {
    for (double a : f.numerator()) c.push_back(a);
    for (double b : f.denominator()) c.push_back(b);
  }
  j["coefficients"] = std::move(c);
  j["nodes"] = f.nodes();
  return j;
}

inline Interpolant interpolant_from_json(const nlohmann::ordered_json& j) {
  const auto variant = parse_variant(j.at("variant").get<std::string>());
  const double tau0 = j.at("tau0").get<double>();
  const int p = j.at("p").get<int>();
  const auto c = j.at("coefficients").get<std::vector<double>>();
  const auto nodes = j.value("nodes", std::vector<double>{});
  switch (variant) {
    case Interpolant::Variant::bound: return Interpolant::bound(tau0);
    case Interpolant::Variant::basis: {
      if (static_cast<int>(c.size()) != p) throw InvalidArgument("interpolant JSON: expected p weights");
      OrthoCoefficients coeffs = p > 0 ? gram_schmidt(p) : OrthoCoefficients{};
      return Interpolant::basis(tau0, c, j.at("scale").get<double>(), std::move(coeffs), nodes);
    }
    case Interpolant::Variant::rational: {
      const std::size_t nnum = p == 0 ? 1 : static_cast<std::size_t>(p);
      if (c.size() != nnum + static_cast<std::size_t>(p + 1)) {
        throw InvalidArgument("interpolant JSON: wrong number of rational coefficients");
      }
      return Interpolant::rational(tau0, std::vector<double>(c.begin(), c.begin() + static_cast<long>(nnum)),
                                   std::vector<double>(c.begin() + static_cast<long>(nnum), c.end()), nodes);
    }
  }
  throw Error("interpolant JSON: unknown variant");
}

}  // namespace traceinv
