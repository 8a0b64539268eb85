#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "traceinv/errors.hpp"
#include "traceinv/kernel.hpp"
#include "traceinv/spd_matrix.hpp"

namespace traceinv::io {

/// Formats a double with 17 significant digits.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

inline double parse_double(const std::string& text, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path, line, "not a number: '" + text + "'");
  }
}

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

/// Reads a symmetric coordinate matrix:
///   %%MatrixMarket matrix coordinate real symmetric
///   % comments
///   n n nnz
///   i j value      (1-based, lower or upper triangle)
inline SpdMatrix read_matrix_market(const std::string& path) {
  auto in = detail::open_in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  ++lineno;
  if (line.rfind("%%MatrixMarket", 0) != 0 || line.find("coordinate") == std::string::npos) {
    throw ParseError(path, lineno, "expected '%%MatrixMarket matrix coordinate real symmetric' header");
  }
  const bool symmetric = line.find("symmetric") != std::string::npos;
  Index rows = -1, cols = -1;
  long long nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || detail::blank(line)) continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz) || rows <= 0 || rows != cols || nnz < 0) {
      throw ParseError(path, lineno, "bad size line (need 'n n nnz' for a square matrix)");
    }
    break;
  }
  if (rows < 0) throw ParseError(path, lineno, "missing size line");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  long long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || detail::blank(line)) continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    std::string value;
    if (!(ss >> i >> j >> value)) throw ParseError(path, lineno, "expected 'i j value'");
    if (i < 1 || j < 1 || i > rows || j > cols) throw ParseError(path, lineno, "index out of range");
    const double v = detail::parse_double(value, path, lineno);
    Index r = static_cast<Index>(i - 1), c = static_cast<Index>(j - 1);
    if (symmetric && r < c) std::swap(r, c);
    triplets.emplace_back(r, c, v);
    ++seen;
  }
  if (seen != nnz) {
    throw ParseError(path, lineno, "expected " + std::to_string(nnz) + " entries, found " +
                                       std::to_string(seen));
  }
  SparseMat m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SpdMatrix::sparse(m);
}

inline void write_matrix_market(const std::string& path, const SpdMatrix& a) {
  auto out = detail::open_out(path);
  const SparseMat m = a.to_sparse();
  SparseMat lower = m.triangularView<Eigen::Lower>();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.order() << ' ' << a.order() << ' ' << lower.nonZeros() << '\n';
  for (Index k = 0; k < lower.outerSize(); ++k)
    for (SparseMat::InnerIterator it(lower, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << fmt(it.value()) << '\n';
}

/// Dense CSV, one full row per line.
inline Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  auto in = detail::open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank(line)) continue;
    std::vector<double> row;
    for (const auto& cell : detail::split(line, ',')) row.push_back(detail::parse_double(cell, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path, lineno, "row has " + std::to_string(row.size()) + " columns, expected " +
                                         std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path, lineno, "no data");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline SpdMatrix read_dense_csv(const std::string& path) {
  Eigen::MatrixXd m = read_csv_matrix(path);
  if (m.rows() != m.cols()) {
    throw ParseError(path, static_cast<std::size_t>(m.rows()), "matrix is not square");
  }
  return SpdMatrix::dense(m);
}

inline void write_dense_csv(const std::string& path, const Eigen::MatrixXd& m) {
  auto out = detail::open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt(m(i, j));
    out << '\n';
  }
}

/// Dispatches on the extension: ".mtx" is coordinate format, anything else
/// dense CSV.
inline SpdMatrix read_matrix(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".mtx") return read_matrix_market(path);
  return read_dense_csv(path);
}

/// One "x,y" pair per line.
inline PointCloud read_points(const std::string& path) {
  Eigen::MatrixXd m = read_csv_matrix(path);
  if (m.cols() != 2) throw ParseError(path, 1, "expected two columns 'x,y'");
  return PointCloud(Eigen::MatrixX2d(m));
}

inline void write_points(const std::string& path, const PointCloud& points) {
  write_dense_csv(path, points.coords());
}

}  // namespace traceinv::io
