#include "protofit/schur.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace protofit {

namespace {

// Trigger for the bialternant 0/0 guard: |det V| below this fraction of the
// numerator's Hadamard bound means the quotient cannot be trusted.
constexpr long double kDenomTol = 1e-10L;

long double hadamard_bound(const Eigen::MatrixXd& m) {
  long double prod = 1.0L;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    long double row = 0.0L;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row += static_cast<long double>(m(i, j)) * static_cast<long double>(m(i, j));
    prod *= sqrtl(row);
  }
  return prod;
}

}  // namespace

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("partition must have at least one part");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0) throw std::invalid_argument("partition parts must be nonnegative");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw std::invalid_argument("partition parts must be weakly decreasing");
  }
}

int Partition::weight() const {
  return std::accumulate(parts_.begin(), parts_.end(), 0);
}

Partition partition_from_exponents(const ExponentSet& basis) {
  const int k = basis.size();
  std::vector<int> parts(k);
  for (int i = 0; i < k; ++i) parts[i] = basis[i] - (k - 1 - i);
  return Partition(std::move(parts));
}

ExponentSet exponents_from_partition(const Partition& p) {
  const int k = p.size();
  std::vector<int> exps(k);
  for (int i = 0; i < k; ++i) exps[i] = p[i] + (k - 1 - i);
  return ExponentSet(std::move(exps));
}

SchurValue schur_combinatorial(const Partition& p, const std::vector<double>& points) {
  const int k = static_cast<int>(points.size());
  if (k != p.size()) throw std::invalid_argument("point count must equal partition size");
  if (p.weight() > kCombinatorialWeightCap)
    throw std::invalid_argument("partition too large for combinatorial evaluation");

  std::vector<int> shape;  // nonzero rows only
  for (int part : p.parts())
    if (part > 0) shape.push_back(part);

  if (shape.empty()) return {1.0, SchurMethod::combinatorial, false};
  if (static_cast<int>(shape.size()) > k) return {0.0, SchurMethod::combinatorial, false};

  const int rows = static_cast<int>(shape.size());
  std::vector<std::vector<int>> tableau(rows);
  for (int r = 0; r < rows; ++r) tableau[r].assign(shape[r], 0);

  long double sum = 0.0L;
  // DFS over cells in row-major order: weakly increasing along rows,
  // strictly increasing down columns, entries in 1..k.
  auto fill = [&](auto&& self, int r, int c, long double prod) -> void {
    if (r == rows) {
      sum += prod;
      return;
    }
    const int nr = (c + 1 < shape[r]) ? r : r + 1;
    const int nc = (c + 1 < shape[r]) ? c + 1 : 0;
    int lo = 1;
    if (c > 0) lo = std::max(lo, tableau[r][c - 1]);
    if (r > 0 && c < shape[r - 1]) lo = std::max(lo, tableau[r - 1][c] + 1);
    for (int e = lo; e <= k; ++e) {
      tableau[r][c] = e;
      self(self, nr, nc, prod * static_cast<long double>(points[e - 1]));
    }
  };
  fill(fill, 0, 0, 1.0L);

  return {static_cast<double>(sum), SchurMethod::combinatorial, false};
}

SchurValue schur_bialternant(const Partition& p, const std::vector<double>& points) {
  const int k = static_cast<int>(points.size());
  if (k != p.size()) throw std::invalid_argument("point count must equal partition size");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (points[i] == points[j]) throw std::invalid_argument("coincident evaluation points");

  const ExponentSet exps = exponents_from_partition(p);
  const Eigen::MatrixXd g = generalized_vandermonde(exps, points);
  const double det_g = det(g);
  const double det_v = vandermonde_det(points);

  const long double scale = std::max(1.0L, hadamard_bound(g));
  if (fabsl(static_cast<long double>(det_v)) < kDenomTol * scale) {
    SchurValue fallback = schur_combinatorial(p, points);
    fallback.condition_flag = true;
    return fallback;
  }
  return {det_g / det_v, SchurMethod::bialternant, false};
}

namespace {

double subset_scale(const Partition& p, const std::vector<double>& pts) {
  double max_abs = 0.0;
  for (double t : pts) max_abs = std::max(max_abs, std::fabs(t));
  return std::max(1.0, pow_int(max_abs, p.weight()));
}

double eval_schur(const Partition& p, const std::vector<double>& pts, bool all_positive) {
  // On all-positive points the tableau sum has no cancellation, so prefer
  // it whenever the enumeration cap allows.
  if (all_positive && p.weight() <= kCombinatorialWeightCap)
    return schur_combinatorial(p, pts).value;
  return schur_bialternant(p, pts).value;
}

bool svd_full_rank(const ExponentSet& basis, const TimeGrid& grid, double tol) {
  const Eigen::MatrixXd b0 = design_matrix(basis, grid).values;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b0);
  const auto& sigma = svd.singularValues();
  const double cutoff = tol * sigma(0);
  return sigma(sigma.size() - 1) > cutoff;
}

}  // namespace

InvertibilityReport is_gram_invertible(const ExponentSet& basis, const TimeGrid& grid,
                                       double tol, std::size_t subset_cap) {
  const int k = basis.size();
  const int n = grid.size();
  if (n < k) throw std::invalid_argument("underdetermined basis");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  const Partition lambda = partition_from_exponents(basis);

  auto accept = [&](const std::vector<int>& subset) -> std::optional<InvertibilityReport> {
    std::vector<double> pts(k);
    bool all_positive = true;
    for (int i = 0; i < k; ++i) {
      pts[i] = grid[subset[i]];
      all_positive = all_positive && pts[i] > 0.0;
    }
    const double value = eval_schur(lambda, pts, all_positive);
    if (std::fabs(value) > tol * subset_scale(lambda, pts))
      return InvertibilityReport{true, subset, value};
    return std::nullopt;
  };

  // Positivity shortcut: on strictly positive points the Schur value is a
  // sum of positive monomials, so the first k positive grid points almost
  // always certify invertibility outright.
  std::vector<int> positive;
  for (int i = 0; i < n; ++i)
    if (grid[i] > 0.0) positive.push_back(i);
  if (static_cast<int>(positive.size()) >= k) {
    positive.resize(k);
    if (auto hit = accept(positive)) return *hit;
  }

  // Lexicographic k-subsets of the grid, capped.
  std::vector<int> subset(k);
  std::iota(subset.begin(), subset.end(), 0);
  std::size_t visited = 0;
  while (true) {
    if (++visited > subset_cap) break;
    if (auto hit = accept(subset)) return *hit;
    int i = k - 1;
    while (i >= 0 && subset[i] == n - k + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }

  // Final arbiter: numerical rank of the design matrix.
  return InvertibilityReport{svd_full_rank(basis, grid, tol), std::nullopt, std::nullopt};
}

}  // namespace protofit
