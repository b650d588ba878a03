#pragma once

#include "protofit/basis.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace protofit {

// Weakly decreasing nonnegative parts. Trailing zeros are significant:
// the part count fixes the number of evaluation variables.
class Partition {
 public:
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int size() const { return static_cast<int>(parts_.size()); }
  int operator[](int i) const { return parts_[i]; }
  int weight() const;  // |lambda|

  bool operator==(const Partition& other) const { return parts_ == other.parts_; }

 private:
  std::vector<int> parts_;
};

enum class SchurMethod { bialternant, combinatorial };

struct SchurValue {
  double value = 0.0;
  SchurMethod method = SchurMethod::bialternant;
  // Set when the bialternant denominator was too small relative to the
  // numerator scale; the value then comes from the combinatorial route.
  bool condition_flag = false;
};

struct InvertibilityReport {
  bool invertible = false;
  // Grid indices of one k-subset with Schur value above the tolerance.
  // Absent when the verdict came from the SVD arbiter.
  std::optional<std::vector<int>> certificate;
  std::optional<double> schur_value;
};

// lambda_i = m_i - (k - i) for i = 1..k; strict decrease of the exponents
// guarantees a valid weakly decreasing result.
Partition partition_from_exponents(const ExponentSet& basis);

// m_i = lambda_i + (k - i); exact inverse of partition_from_exponents.
ExponentSet exponents_from_partition(const Partition& p);

// det(G)/det(V) at the given points, G the generalized Vandermonde matrix
// for the exponents of p. Exactly coincident points are an error; nearly
// coincident points fall back to the combinatorial evaluator (flagged).
SchurValue schur_bialternant(const Partition& p, const std::vector<double>& points);

// Sum over semistandard Young tableaux of shape p with entries in {1..k}
// of the corresponding point monomials. Determinant-free and defined at
// coincident points; |p| is capped at 20 to bound the enumeration.
SchurValue schur_combinatorial(const Partition& p, const std::vector<double>& points);

inline constexpr int kCombinatorialWeightCap = 20;
inline constexpr std::size_t kDefaultSubsetCap = 10000;

// Decides whether the Gram matrix B0^T B0 of (basis, grid) is invertible.
// rank(B0) = k iff some k-subset of grid points has nonzero Schur value,
// since every k x k minor of B0 factors as s_lambda(subset) * det(V(subset)).
// Search order: a subset of strictly positive points first (where the Schur
// value is a sum of positive monomials), then lexicographic subsets up to
// `subset_cap`, with an SVD rank check as the final arbiter when no
// certificate is found.
InvertibilityReport is_gram_invertible(const ExponentSet& basis, const TimeGrid& grid,
                                       double tol,
                                       std::size_t subset_cap = kDefaultSubsetCap);

}  // namespace protofit
