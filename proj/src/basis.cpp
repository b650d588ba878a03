#include "protofit/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace protofit {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("time grid must not be empty");
  std::vector<double> sorted = points_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("time grid points must be pairwise distinct");
}

ExponentSet::ExponentSet(std::vector<int> decreasing) : exponents_(std::move(decreasing)) {
  if (exponents_.empty()) throw std::invalid_argument("empty basis");
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] < 0) throw std::invalid_argument("negative exponent");
    if (i > 0 && exponents_[i] >= exponents_[i - 1])
      throw std::invalid_argument("exponents must be strictly decreasing");
  }
}

ExponentSet make_exponent_set(std::vector<int> degrees) {
  if (degrees.empty()) throw std::invalid_argument("empty basis");
  std::sort(degrees.begin(), degrees.end(), std::greater<int>());
  if (std::adjacent_find(degrees.begin(), degrees.end()) != degrees.end())
    throw std::invalid_argument("duplicate exponent");
  return ExponentSet(std::move(degrees));
}

DesignMatrix design_matrix(const ExponentSet& basis, const TimeGrid& grid) {
  const int n = grid.size();
  const int k = basis.size();
  Eigen::MatrixXd values(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) values(i, j) = pow_int(grid[i], basis[j]);
  return DesignMatrix{std::move(values), grid, basis};
}

Eigen::MatrixXd generalized_vandermonde(const ExponentSet& basis,
                                        const std::vector<double>& points) {
  const int k = basis.size();
  if (static_cast<int>(points.size()) != k)
    throw std::invalid_argument("point count must equal basis size");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) throw std::invalid_argument("points must be pairwise distinct");
  Eigen::MatrixXd g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = pow_int(points[j], basis[i]);
  return g;
}

double vandermonde_det(const std::vector<double>& points) {
  long double prod = 1.0L;
  const std::size_t k = points.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      prod *= static_cast<long double>(points[i]) - static_cast<long double>(points[j]);
  return static_cast<double>(prod);
}

namespace {

long double det2(const long double m[2][2]) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

long double det3(const long double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

long double det_cofactor(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0);
  if (n == 2) {
    long double b[2][2] = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
    return det2(b);
  }
  if (n == 3) {
    long double b[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b[i][j] = m(i, j);
    return det3(b);
  }
  // n == 4: expand along the first row.
  long double acc = 0.0L;
  for (int c = 0; c < 4; ++c) {
    long double minor[3][3];
    for (int i = 1; i < 4; ++i) {
      int cc = 0;
      for (int j = 0; j < 4; ++j) {
        if (j == c) continue;
        minor[i - 1][cc++] = m(i, j);
      }
    }
    const long double term = static_cast<long double>(m(0, c)) * det3(minor);
    acc += (c % 2 == 0) ? term : -term;
  }
  return acc;
}

long double det_lu(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<long double> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] = m(i, j);

  long double detsign = 1.0L;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    long double best = std::fabs(static_cast<double>(a[static_cast<std::size_t>(col) * n + col]));
    for (int r = col + 1; r < n; ++r) {
      const long double v = fabsl(a[static_cast<std::size_t>(r) * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (a[static_cast<std::size_t>(piv) * n + col] == 0.0L) return 0.0L;
    if (piv != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<std::size_t>(piv) * n + j], a[static_cast<std::size_t>(col) * n + j]);
      detsign = -detsign;
    }
    const long double pivot = a[static_cast<std::size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const long double f = a[static_cast<std::size_t>(r) * n + col] / pivot;
      a[static_cast<std::size_t>(r) * n + col] = 0.0L;
      for (int j = col + 1; j < n; ++j) a[static_cast<std::size_t>(r) * n + j] -= f * a[static_cast<std::size_t>(col) * n + j];
    }
  }
  long double prod = detsign;
  for (int i = 0; i < n; ++i) prod *= a[static_cast<std::size_t>(i) * n + i];
  return prod;
}

}  // namespace

double det(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  if (m.rows() == 0) throw std::invalid_argument("determinant of empty matrix");
  if (m.rows() <= 4) return static_cast<double>(det_cofactor(m));
  return static_cast<double>(det_lu(m));
}

}  // namespace protofit
