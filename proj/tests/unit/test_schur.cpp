#include "protofit/schur.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace protofit;

namespace {

// All partitions with exactly `k` parts (trailing zeros allowed) and
// weight at most `max_weight`, built by descending first parts.
void collect_partitions(int k, int max_weight, int max_part, std::vector<int>& stack,
                        std::vector<Partition>& out) {
  if (static_cast<int>(stack.size()) == k) {
    out.emplace_back(stack);
    return;
  }
  int remaining = max_weight;
  for (int p : stack) remaining -= p;
  for (int part = std::min(max_part, remaining); part >= 0; --part) {
    stack.push_back(part);
    collect_partitions(k, max_weight, part, stack, out);
    stack.pop_back();
  }
}

std::vector<Partition> partitions_up_to(int k, int max_weight) {
  std::vector<Partition> out;
  std::vector<int> stack;
  collect_partitions(k, max_weight, max_weight, stack, out);
  return out;
}

}  // namespace

TEST_CASE("partition <-> exponent correspondence") {
  CHECK(partition_from_exponents(make_exponent_set({2, 1, 0})).parts() ==
        std::vector<int>{0, 0, 0});
  CHECK(partition_from_exponents(make_exponent_set({2, 0})).parts() == std::vector<int>{1, 0});
  CHECK(partition_from_exponents(make_exponent_set({5, 3, 0})).parts() ==
        std::vector<int>{3, 2, 0});

  CHECK(exponents_from_partition(Partition({0, 0, 0})).exponents() == std::vector<int>{2, 1, 0});
  CHECK(exponents_from_partition(Partition({1, 0})).exponents() == std::vector<int>{2, 0});
  CHECK(exponents_from_partition(Partition({3, 2, 0})).exponents() == std::vector<int>{5, 3, 0});

  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 1 + static_cast<int>(rng() % 6);
    const ExponentSet basis(testutil::random_exponents(rng, k, 12));
    CHECK(exponents_from_partition(partition_from_exponents(basis)) == basis);
  }
}

TEST_CASE("bialternant evaluation") {
  CHECK(schur_bialternant(Partition({0, 0, 0}), {0.4, -1.0, 2.2}).value ==
        doctest::Approx(1.0).epsilon(1e-13));

  // s_(1,0)(t1,t2) = (t1^2 - t2^2)/(t1 - t2) = t1 + t2.
  const auto sum = schur_bialternant(Partition({1, 0}), {0.5, 2.0});
  CHECK(sum.value == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(sum.method == SchurMethod::bialternant);
  CHECK_FALSE(sum.condition_flag);

  CHECK(schur_bialternant(Partition({1, 0}), {1.0, -1.0}).value == 0.0);

  CHECK_THROWS_WITH_AS(schur_bialternant(Partition({1, 0}), {2.0, 2.0}),
                       "coincident evaluation points", std::invalid_argument);
}

TEST_CASE("combinatorial evaluation enumerates tableaux") {
  const double x = 1.7, y = -0.6;
  CHECK(schur_combinatorial(Partition({1, 0}), {x, y}).value ==
        doctest::Approx(x + y).epsilon(1e-14));
  CHECK(schur_combinatorial(Partition({1, 1}), {x, y}).value ==
        doctest::Approx(x * y).epsilon(1e-14));
  CHECK(schur_combinatorial(Partition({2, 0}), {x, y}).value ==
        doctest::Approx(x * x + x * y + y * y).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(schur_combinatorial(Partition({21, 0}), {1.0, 2.0}),
                       "partition too large for combinatorial evaluation",
                       std::invalid_argument);
}

TEST_CASE("near-coincident points fall back to the combinatorial route") {
  const auto v = schur_bialternant(Partition({2, 1}), {1.0, 1.0 + 1e-13});
  CHECK(v.condition_flag);
  CHECK(v.method == SchurMethod::combinatorial);
  const auto direct = schur_combinatorial(Partition({2, 1}), {1.0, 1.0 + 1e-13});
  CHECK(v.value == direct.value);
}

TEST_CASE("bialternant and combinatorial evaluators agree") {
  std::mt19937_64 rng(31337);
  for (int k = 1; k <= 4; ++k) {
    const auto partitions = partitions_up_to(k, 8);
    for (const Partition& p : partitions) {
      for (int rep = 0; rep < 20; ++rep) {
        const auto pts = testutil::random_points(rng, k, -2.0, 2.0, 0.05);
        const double a = schur_bialternant(p, pts).value;
        const double b = schur_combinatorial(p, pts).value;
        CHECK(testutil::close_rel(a, b, 1e-9));
      }
    }
  }
}

TEST_CASE("schur values are symmetric in the points") {
  std::mt19937_64 rng(5);
  const Partition p({3, 1, 0});
  for (int rep = 0; rep < 25; ++rep) {
    auto pts = testutil::random_points(rng, 3, -2.0, 2.0, 0.05);
    const double a0 = schur_bialternant(p, pts).value;
    const double c0 = schur_combinatorial(p, pts).value;
    std::shuffle(pts.begin(), pts.end(), rng);
    CHECK(testutil::close_rel(schur_bialternant(p, pts).value, a0, 1e-12));
    CHECK(testutil::close_rel(schur_combinatorial(p, pts).value, c0, 1e-12));
  }
}

TEST_CASE("positive points give positive combinatorial values") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(0.05, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<int> parts(k);
    int budget = 10;
    for (int i = 0; i < k; ++i) {
      parts[i] = static_cast<int>(rng() % (budget + 1));
      if (i > 0) parts[i] = std::min(parts[i], parts[i - 1]);
      budget -= parts[i];
    }
    std::vector<double> pts(k);
    for (double& t : pts) t = dist(rng);
    CHECK(schur_combinatorial(Partition(parts), pts).value > 0.0);
  }
}

TEST_CASE("schur values are homogeneous of degree |p|") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> scale_dist(0.3, 1.8);
  const Partition p({2, 2, 1});
  for (int rep = 0; rep < 25; ++rep) {
    const auto pts = testutil::random_points(rng, 3, -2.0, 2.0, 0.05);
    const double c = scale_dist(rng) * (rep % 2 == 0 ? 1.0 : -1.0);
    std::vector<double> scaled(pts);
    for (double& t : scaled) t *= c;
    const double expected = pow_int(c, p.weight()) * schur_combinatorial(p, pts).value;
    CHECK(testutil::close_rel(schur_combinatorial(p, scaled).value, expected, 1e-10));
  }
}

TEST_CASE("gram invertibility on the missing-monomial example") {
  const auto basis = make_exponent_set({0, 2});

  const auto singular = is_gram_invertible(basis, TimeGrid({1.0, -1.0}), 1e-10);
  CHECK_FALSE(singular.invertible);
  CHECK_FALSE(singular.certificate.has_value());

  const auto regular = is_gram_invertible(basis, TimeGrid({1.0, 2.0}), 1e-10);
  CHECK(regular.invertible);
  REQUIRE(regular.certificate.has_value());
  CHECK(*regular.certificate == std::vector<int>{0, 1});
  REQUIRE(regular.schur_value.has_value());
  CHECK(*regular.schur_value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("full monomial bases are always invertible") {
  std::mt19937_64 rng(4242);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 5);
    const auto pts = testutil::random_points(rng, n, -2.0, 2.0, 0.02);
    const auto report = is_gram_invertible(make_exponent_set({0, 1, 2}), TimeGrid(pts), 1e-10);
    CHECK(report.invertible);
  }
}

TEST_CASE("is_gram_invertible validates its preconditions") {
  CHECK_THROWS_WITH_AS(is_gram_invertible(make_exponent_set({0, 1, 2}), TimeGrid({1.0, 2.0}), 1e-10),
                       "underdetermined basis", std::invalid_argument);
  CHECK_THROWS_AS(is_gram_invertible(make_exponent_set({0}), TimeGrid({1.0}), 0.0),
                  std::invalid_argument);
}

TEST_CASE("invertibility verdict matches an SVD rank oracle") {
  std::mt19937_64 rng(2718);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const int k = 1 + static_cast<int>(rng() % 4);
    const int n = k + static_cast<int>(rng() % (9 - k));
    const ExponentSet basis(testutil::random_exponents(rng, k, 6));

    std::vector<double> pts;
    if (rep % 3 == 0) {
      // Symmetric grids stress the missing-monomial degeneracy.
      const auto half = testutil::random_points(rng, (n + 1) / 2, 0.2, 2.0, 0.05);
      for (double t : half) {
        pts.push_back(t);
        if (static_cast<int>(pts.size()) < n) pts.push_back(-t);
      }
    } else {
      pts = testutil::random_points(rng, n, -2.0, 2.0, 0.05);
    }

    const TimeGrid grid(pts);
    const auto report = is_gram_invertible(basis, grid, 1e-10);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design_matrix(basis, grid).values);
    const auto& sigma = svd.singularValues();
    const bool full_rank = sigma(sigma.size() - 1) > 1e-10 * sigma(0);
    CHECK(report.invertible == full_rank);
    ++checked;
  }
  CHECK(checked == 60);
}
