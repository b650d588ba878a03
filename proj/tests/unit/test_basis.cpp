#include "protofit/basis.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace protofit;

TEST_CASE("make_exponent_set canonicalizes and validates") {
  CHECK(make_exponent_set({0, 1, 2}).exponents() == std::vector<int>{2, 1, 0});
  CHECK(make_exponent_set({0, 2}).exponents() == std::vector<int>{2, 0});
  CHECK_THROWS_WITH_AS(make_exponent_set({0, 0}), "duplicate exponent", std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_exponent_set({}), "empty basis", std::invalid_argument);
  CHECK_THROWS_AS(make_exponent_set({-1, 0}), std::invalid_argument);
}

TEST_CASE("time grid rejects duplicates and empties") {
  CHECK_THROWS_AS(TimeGrid({}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({1.0, 2.0, 1.0}), std::invalid_argument);
  CHECK(TimeGrid({3.0, 1.0, 2.0}).size() == 3);  // order preserved, no sorting
}

TEST_CASE("design matrix entries are t_i^(m_j) in decreasing exponent order") {
  const TimeGrid grid({0.5, 2.0, -1.5});
  const auto d = design_matrix(make_exponent_set({0, 1, 2}), grid);
  for (int i = 0; i < 3; ++i) {
    CHECK(d.values(i, 0) == grid[i] * grid[i]);
    CHECK(d.values(i, 1) == grid[i]);
    CHECK(d.values(i, 2) == 1.0);
  }

  const auto even = design_matrix(make_exponent_set({0, 2}), TimeGrid({1.0, -1.0}));
  CHECK(even.values == Eigen::MatrixXd::Ones(2, 2));

  const auto constant = design_matrix(make_exponent_set({0}), TimeGrid({0.0, 7.0, -3.0}));
  CHECK(constant.values == Eigen::MatrixXd::Ones(3, 1));
  CHECK(constant.values(0, 0) == 1.0);  // 0^0 == 1
}

TEST_CASE("generalized Vandermonde layout and error paths") {
  const auto g = generalized_vandermonde(make_exponent_set({0, 1}), {3.0, 5.0});
  CHECK(g(0, 0) == 3.0);
  CHECK(g(0, 1) == 5.0);
  CHECK(g(1, 0) == 1.0);
  CHECK(g(1, 1) == 1.0);

  const auto even = generalized_vandermonde(make_exponent_set({0, 2}), {1.0, -1.0});
  CHECK(even == Eigen::MatrixXd::Ones(2, 2));
  CHECK(det(even) == 0.0);

  const auto regular = generalized_vandermonde(make_exponent_set({0, 2}), {1.0, 2.0});
  CHECK(regular(0, 0) == 1.0);
  CHECK(regular(0, 1) == 4.0);
  CHECK(det(regular) == doctest::Approx(-3.0).epsilon(1e-14));

  CHECK_THROWS_AS(generalized_vandermonde(make_exponent_set({0, 1}), {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generalized_vandermonde(make_exponent_set({0, 1}), {2.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("vandermonde_det matches the product formula and the oracle") {
  CHECK(vandermonde_det({4.0, 1.5}) == 4.0 - 1.5);
  CHECK(vandermonde_det({2.0, 2.0}) == 0.0);

  // Direct expansion of the 3x3 determinant for points (1,2,3):
  // (1-2)(1-3)(2-3) = -2.
  const auto v3 = generalized_vandermonde(make_exponent_set({2, 1, 0}), {1.0, 2.0, 3.0});
  CHECK(testutil::laplace_det(v3) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(vandermonde_det({1.0, 2.0, 3.0}) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("full-basis generalized Vandermonde determinant equals the product formula") {
  std::mt19937_64 rng(2024);
  for (int k = 1; k <= 6; ++k) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto pts = testutil::random_points(rng, k, -2.0, 2.0, 0.05);
      std::vector<int> full(k);
      for (int i = 0; i < k; ++i) full[i] = k - 1 - i;
      const double lhs = det(generalized_vandermonde(ExponentSet(full), pts));
      const double rhs = vandermonde_det(pts);
      CHECK(testutil::close_rel(lhs, rhs, 1e-12));
    }
  }
}

TEST_CASE("design matrix rows slice to generalized Vandermonde columns exactly") {
  std::mt19937_64 rng(99);
  const auto basis = make_exponent_set({5, 2, 0});
  const auto grid_pts = testutil::random_points(rng, 7, -3.0, 3.0, 0.01);
  const TimeGrid grid(grid_pts);
  const auto d = design_matrix(basis, grid);

  const std::vector<int> rows{1, 4, 6};
  std::vector<double> sub_pts;
  for (int r : rows) sub_pts.push_back(grid[r]);
  const auto g = generalized_vandermonde(basis, sub_pts);
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j < 3; ++j) CHECK(d.values(rows[a], j) == g(j, a));
}

TEST_CASE("permuting grid points permutes design matrix rows exactly") {
  const std::vector<double> pts{0.3, -1.2, 2.5, 0.9};
  const std::vector<int> perm{2, 0, 3, 1};
  const auto basis = make_exponent_set({3, 1, 0});

  std::vector<double> permuted(pts.size());
  for (std::size_t i = 0; i < perm.size(); ++i) permuted[i] = pts[perm[i]];

  const auto d0 = design_matrix(basis, TimeGrid(pts));
  const auto d1 = design_matrix(basis, TimeGrid(permuted));
  for (std::size_t i = 0; i < perm.size(); ++i)
    CHECK(d1.values.row(static_cast<int>(i)) == d0.values.row(perm[i]));
}

TEST_CASE("determinant helper agrees with the Laplace oracle past the cofactor cutoff") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n = 5; n <= 7; ++n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
    CHECK(testutil::close_rel(det(m), testutil::laplace_det(m), 1e-10));
  }
}
