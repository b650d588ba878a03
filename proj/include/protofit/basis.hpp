#pragma once

#include <Eigen/Core>

#include <vector>

namespace protofit {

// Integer power by binary exponentiation, with 0^0 == 1. Every design or
// Vandermonde-type matrix entry in this library goes through this one
// routine so that equal (t, m) pairs produce bitwise-equal entries.
inline double pow_int(double t, int m) {
  double acc = 1.0;
  double base = t;
  for (int e = m; e > 0; e >>= 1) {
    if (e & 1) acc *= base;
    base *= base;
  }
  return acc;
}

// Shared sampling grid t_1,...,t_N. Points must be pairwise distinct; a
// repeated time makes every collocation determinant vanish identically,
// so duplicates have to be merged upstream.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  double operator[](int i) const { return points_[i]; }

  bool operator==(const TimeGrid& other) const { return points_ == other.points_; }

 private:
  std::vector<double> points_;
};

// Monomial basis described by strictly decreasing exponents m_1 > ... > m_k >= 0.
// Gaps in the sequence model "missing" monomials.
class ExponentSet {
 public:
  // `decreasing` must already be strictly decreasing and nonnegative.
  explicit ExponentSet(std::vector<int> decreasing);

  const std::vector<int>& exponents() const { return exponents_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  int operator[](int i) const { return exponents_[i]; }

  bool operator==(const ExponentSet& other) const { return exponents_ == other.exponents_; }

 private:
  std::vector<int> exponents_;
};

// N x k collocation matrix with entry (i, j) = t_i^(m_j); columns follow
// the decreasing exponent order of the basis.
struct DesignMatrix {
  Eigen::MatrixXd values;
  TimeGrid grid;
  ExponentSet basis;
};

// Sorts the given degrees into canonical strictly decreasing order.
// Throws std::invalid_argument on an empty input ("empty basis") or a
// repeated degree ("duplicate exponent").
ExponentSet make_exponent_set(std::vector<int> degrees);

DesignMatrix design_matrix(const ExponentSet& basis, const TimeGrid& grid);

// k x k matrix with entry (i, j) = t_j^(m_i): rows indexed by the exponents
// in decreasing order, columns by the points. Requires exactly k pairwise
// distinct points.
Eigen::MatrixXd generalized_vandermonde(const ExponentSet& basis,
                                        const std::vector<double>& points);

// prod_{i<j} (t_i - t_j); equals det(generalized_vandermonde) for the full
// basis (k-1,...,1,0). Coincident points give 0 rather than an error.
double vandermonde_det(const std::vector<double>& points);

// Determinant of a square matrix: cofactor expansion up to 4x4, LU with
// partial pivoting above that. Internal arithmetic is long double.
double det(const Eigen::MatrixXd& m);

}  // namespace protofit
