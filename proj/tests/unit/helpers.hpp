#pragma once

#include "protofit/lsq.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace testutil {

// |a - b| within tol of the larger magnitude, floored at 1 so values near
// zero are compared absolutely.
inline bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Independent determinant oracle: full Laplace expansion, any order.
inline double laplace_det(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0);
  double acc = 0.0;
  for (int c = 0; c < n; ++c) {
    Eigen::MatrixXd minor(n - 1, n - 1);
    for (int i = 1; i < n; ++i) {
      int cc = 0;
      for (int j = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, cc++) = m(i, j);
      }
    }
    const double term = m(0, c) * laplace_det(minor);
    acc += (c % 2 == 0) ? term : -term;
  }
  return acc;
}

// Distinct points with a minimum pairwise gap, uniform on [lo, hi].
inline std::vector<double> random_points(std::mt19937_64& rng, int k, double lo, double hi,
                                         double min_gap) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> pts;
  while (static_cast<int>(pts.size()) < k) {
    const double t = dist(rng);
    bool ok = true;
    for (double p : pts) ok = ok && std::fabs(p - t) >= min_gap;
    if (ok) pts.push_back(t);
  }
  return pts;
}

// Random strictly-decreasing exponent set with k entries drawn from
// [0, max_exp].
inline std::vector<int> random_exponents(std::mt19937_64& rng, int k, int max_exp) {
  std::vector<int> all(max_exp + 1);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  std::sort(all.begin(), all.end(), std::greater<int>());
  return all;
}

// Brute-force assembly of the full stacked system: B is l vertical copies
// of B0, Y the stacked signal columns. Returns (B^T B, B^T Y).
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> stacked_normal_system(
    const Eigen::MatrixXd& b0, const Eigen::MatrixXd& samples) {
  const int n = static_cast<int>(b0.rows());
  const int k = static_cast<int>(b0.cols());
  const int l = static_cast<int>(samples.cols());
  Eigen::MatrixXd b(n * l, k);
  Eigen::VectorXd y(n * l);
  for (int rep = 0; rep < l; ++rep) {
    b.block(rep * n, 0, n, k) = b0;
    y.segment(rep * n, n) = samples.col(rep);
  }
  return {b.transpose() * b, b.transpose() * y};
}

// Dense pseudo-inverse solve with an explicit rank cutoff.
inline Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                  double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  Eigen::VectorXd projected = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < projected.size(); ++i)
    projected(i) = sigma(i) > tol * sigma(0) ? projected(i) / sigma(i) : 0.0;
  return svd.matrixV() * projected;
}

}  // namespace testutil
