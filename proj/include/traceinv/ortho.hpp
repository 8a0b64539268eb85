#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

#include "traceinv/errors.hpp"

namespace traceinv {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Inner product of t^(1/(i+1)) and t^(1/(j+1)) on [0,1] under dt/t:
/// 1 / (1/(i+1) + 1/(j+1)) = (i+1)(j+1) / (i+j+2).
inline Rational haar_inner_product_basis(int i, int j) {
  if (i < 1 || j < 1) throw InvalidArgument("haar_inner_product_basis: indices start at 1");
  return Rational(BigInt((i + 1) * (j + 1)), BigInt(i + j + 2));
}

/// phi_i^perp(t) = alpha_i * sum_{j<=i} a_ij t^(1/(j+1)), alpha_i = sign_i * sqrt(radicand_i).
struct OrthoRow {
  int sign = 1;
  Rational radicand;
  std::vector<BigInt> a;  // a_i1 .. a_ii

  double alpha() const { return sign * std::sqrt(radicand.convert_to<double>()); }
};

class OrthoCoefficients {
 public:
  OrthoCoefficients() = default;
  explicit OrthoCoefficients(std::vector<OrthoRow> rows) : rows_(std::move(rows)) {}

  int order() const noexcept { return static_cast<int>(rows_.size()); }

  /// Row i, 1-based.
  const OrthoRow& row(int i) const {
    if (i < 1 || i > order()) throw InvalidArgument("OrthoCoefficients: row index out of range");
    return rows_[static_cast<std::size_t>(i - 1)];
  }

  /// Sub-basis made of the first p rows.
  OrthoCoefficients truncated(int p) const {
    if (p < 0 || p > order()) throw InvalidArgument("OrthoCoefficients: cannot truncate beyond order");
    return OrthoCoefficients(std::vector<OrthoRow>(rows_.begin(), rows_.begin() + p));
  }

 private:
  std::vector<OrthoRow> rows_;
};

/// sum_k sum_l x_k y_l <phi_k, phi_l> for coefficient vectors over phi_1..
template <typename VecX, typename VecY>
Rational haar_bilinear(const VecX& x, const VecY& y) {
  Rational sum = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0) continue;
    for (std::size_t l = 0; l < y.size(); ++l) {
      if (y[l] == 0) continue;
      sum += Rational(x[k]) * Rational(y[l]) *
             haar_inner_product_basis(static_cast<int>(k) + 1, static_cast<int>(l) + 1);
    }
  }
  return sum;
}

inline constexpr int kMaxOrthoOrder = 12;

/// Orthonormalizes t^(1/2), t^(1/3), ..., t^(1/(p+1)) under dt/t on [0,1]
/// in exact rational arithmetic.
///
/// Each orthogonal direction is scaled to a primitive integer vector with a
/// positive first entry; the remaining scalar goes into alpha_i, whose sign
/// keeps the coefficient of phi_i positive (the Gram-Schmidt orientation).
inline OrthoCoefficients gram_schmidt(int p) {
  if (p < 1 || p > kMaxOrthoOrder) {
    throw InvalidArgument("gram_schmidt: order must be in [1, " + std::to_string(kMaxOrthoOrder) + "]");
  }
  const auto width = static_cast<std::size_t>(p);
  std::vector<std::vector<Rational>> psi;
  std::vector<Rational> psi_norm2;
  std::vector<OrthoRow> rows;

  for (std::size_t i = 0; i < width; ++i) {
    std::vector<Rational> r(width, Rational(0));
    r[i] = 1;
    for (std::size_t k = 0; k < i; ++k) {
      std::vector<Rational> unit(width, Rational(0));
      unit[i] = 1;
      const Rational proj = haar_bilinear(unit, psi[k]) / psi_norm2[k];
      for (std::size_t j = 0; j <= k; ++j) r[j] -= proj * psi[k][j];
    }
    psi.push_back(r);
    psi_norm2.push_back(haar_bilinear(r, r));

    BigInt lcm = 1;
    for (std::size_t j = 0; j <= i; ++j) lcm = boost::multiprecision::lcm(lcm, denominator(r[j]));
    std::vector<BigInt> a(i + 1);
    BigInt g = 0;
    for (std::size_t j = 0; j <= i; ++j) {
      a[j] = numerator(r[j]) * (lcm / denominator(r[j]));
      g = boost::multiprecision::gcd(g, a[j]);
    }
    const int lead_sign = a[0] < 0 ? -1 : 1;
    for (auto& v : a) v = v / g * lead_sign;

    OrthoRow row;
    row.a = a;
    row.radicand = Rational(1) / haar_bilinear(a, a);
    row.sign = a[i] < 0 ? -1 : 1;
    rows.push_back(std::move(row));
  }
  return OrthoCoefficients(std::move(rows));
}

/// phi_i^perp(t) in floating point.
inline double eval_ortho_function(const OrthoCoefficients& coeffs, int i, double t) {
  if (t < 0.0) throw InvalidArgument("eval_ortho_function: t must be non-negative");
  const OrthoRow& row = coeffs.row(i);
  double sum = 0.0;
  for (std::size_t j = 0; j < row.a.size(); ++j) {
    sum += row.a[j].convert_to<double>() * std::pow(t, 1.0 / static_cast<double>(j + 2));
  }
  return row.alpha() * sum;
}

/// alpha_i written as sqrt(2/(i+1)) when it has that form.
inline std::string alpha_string(const OrthoRow& row, int i) {
  std::ostringstream os;
  os << (row.sign < 0 ? '-' : '+') << "sqrt(";
  if (row.radicand == Rational(BigInt(2), BigInt(i + 1))) {
    os << "2/" << i + 1;
  } else {
    os << numerator(row.radicand) << '/' << denominator(row.radicand);
  }
  os << ')';
  return os.str();
}

inline nlohmann::ordered_json to_json(const OrthoCoefficients& c) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 1; i <= c.order(); ++i) {
    const OrthoRow& r = c.row(i);
    nlohmann::ordered_json row;
    row["i"] = i;
    row["alpha_sign"] = r.sign;
    row["alpha_squared"] = numerator(r.radicand).str() + "/" + denominator(r.radicand).str();
    row["alpha"] = r.alpha();
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& v : r.a) a.push_back(v.convert_to<long long>());
    row["a"] = std::move(a);
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json j;
  j["p"] = c.order();
  j["rows"] = std::move(rows);
  return j;
}

/// Plain-text table: i, alpha_i, a_i1 .. a_ip.
inline std::string format_table(const OrthoCoefficients& c) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"i", "alpha_i"};
  for (int j = 1; j <= c.order(); ++j) header.push_back("a_i" + std::to_string(j));
  cells.push_back(header);
  for (int i = 1; i <= c.order(); ++i) {
    const OrthoRow& r = c.row(i);
    std::vector<std::string> line = {std::to_string(i), alpha_string(r, i)};
    for (const auto& v : r.a) line.push_back(v.str());
    while (static_cast<int>(line.size()) < c.order() + 2) line.emplace_back();
    cells.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k].size());
  std::ostringstream os;
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t k = 0; k < line.size(); ++k) {
      std::string cell = line[k];
      cell.insert(0, width[k] - cell.size(), ' ');
      text += (k ? "  " : "") + cell;
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    os << text << '\n';
  }
  return os.str();
}

}  // namespace traceinv
