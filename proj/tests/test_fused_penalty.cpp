#include <cmath>
#include <random>

#include "doctest.h"
#include "fgl/fused_penalty.hpp"
#include "helpers.hpp"
#include "prox_oracle.hpp"

using namespace fgl;
using fgl::testing::prox_grid_oracle;
using fgl::testing::prox_objective;
using fgl::testing::prox_oracle;

namespace {

double max_dev(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("fused_penalty") {

TEST_CASE("diagonal entries pass through") {
  const std::vector<double> a{1.5, -2.0, 0.25};
  CHECK(prox_fused_lasso({a, 1.0, 3.0, 2.0, true}) == a);
}

TEST_CASE("zero penalty is the identity") {
  const std::vector<double> a{0.7, -0.1, 4.0};
  CHECK(prox_fused_lasso({a, 2.0, 0.0, 0.0, false}) == a);
}

TEST_CASE("single group soft threshold") {
  CHECK(prox_fused_lasso({{0.3}, 1.0, 0.5, 0.0, false})[0] == 0.0);
  CHECK(prox_fused_lasso({{-2.0}, 2.0, 1.0, 0.0, false})[0] == doctest::Approx(-1.5));
}

TEST_CASE("K=2 fusion dominates against the dense grid oracle") {
  const auto z = prox_fused_lasso({{3.0, 1.0}, 1.0, 0.0, 2.0, false});
  CHECK(z[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(z[1] == doctest::Approx(2.0).epsilon(1e-12));
  const auto oracle = prox_grid_oracle({3.0, 1.0}, 1.0, 0.0, 2.0, -5.0, 5.0, 1e-3);
  CHECK(max_dev(z, oracle) < 1e-6);
}

TEST_CASE("K=2 fused then soft-thresholded against the dense grid oracle") {
  const std::vector<double> a{3.0, -3.0};
  const auto z = prox_fused_lasso({a, 1.0, 1.0, 0.5, false});
  const auto oracle = prox_grid_oracle(a, 1.0, 1.0, 0.5, -5.0, 5.0, 1e-3);
  CHECK(max_dev(z, oracle) < 1e-6);
  // shift by rho/eta, then soft threshold by lambda/eta
  CHECK(z[0] == doctest::Approx(1.5));
  CHECK(z[1] == doctest::Approx(-1.5));
}

TEST_CASE("identical inputs give identical outputs") {
  for (int k = 2; k <= 4; ++k) {
    const std::vector<double> a(static_cast<std::size_t>(k), 0.8);
    const auto z = prox_fused_lasso({a, 1.0, 0.3, 0.7, false});
    for (double v : z) CHECK(v == doctest::Approx(0.5));
  }
}

TEST_CASE("K=3 random entries match the grid oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pen(0.0, 0.8);
  for (int rep = 0; rep < 16; ++rep) {
    const std::vector<double> a{u(rng), u(rng), u(rng)};
    const double eta = 0.5 + pen(rng);
    const double lambda = pen(rng);
    const double rho = pen(rng);
    const auto z = prox_fused_lasso({a, eta, lambda, rho, false});
    const auto oracle = prox_oracle(a, eta, lambda, rho, 0.02);
    CHECK(max_dev(z, oracle) < 1e-6);
  }
}

TEST_CASE("K=3 prox_matrix over a 4x4 triple matches the entrywise oracle") {
  std::vector<SymMatrix> a{fgl::testing::random_symmetric(4, 1), fgl::testing::random_symmetric(4, 2),
                           fgl::testing::random_symmetric(4, 3)};
  const PenaltyParams params{0.4, 0.3, false};
  const auto z = prox_matrix(a, 1.3, params);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) {
      const std::vector<double> t{a[0](i, j), a[1](i, j), a[2](i, j)};
      const std::vector<double> got{z[0](i, j), z[1](i, j), z[2](i, j)};
      if (i == j) {
        CHECK(got == t);
      } else {
        CHECK(max_dev(got, prox_oracle(t, 1.3, 0.4, 0.3, 0.02)) < 1e-6);
      }
    }
  }
}

TEST_CASE("prox output is optimal: objective no worse than any perturbation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 2 + static_cast<std::size_t>(rep % 4);
    std::vector<double> a(k);
    for (auto& v : a) v = nd(rng);
    const auto z = prox_fused_lasso({a, 1.0, 0.3, 0.2, false});
    const double f0 = prox_objective(z, a, 1.0, 0.3, 0.2);
    for (int t = 0; t < 20; ++t) {
      auto y = z;
      for (auto& v : y) v += 1e-3 * nd(rng);
      CHECK(prox_objective(y, a, 1.0, 0.3, 0.2) >= f0 - 1e-12);
    }
  }
}

TEST_CASE("prox is permutation equivariant and monotone in each target") {
  const std::vector<double> a{1.2, -0.4, 0.9, 0.1};
  const auto z = prox_fused_lasso({a, 1.0, 0.2, 0.3, false});
  const std::vector<double> b{a[2], a[0], a[3], a[1]};
  const auto zb = prox_fused_lasso({b, 1.0, 0.2, 0.3, false});
  CHECK(zb[0] == doctest::Approx(z[2]));
  CHECK(zb[1] == doctest::Approx(z[0]));
  CHECK(zb[2] == doctest::Approx(z[3]));
  CHECK(zb[3] == doctest::Approx(z[1]));

  auto bumped = a;
  bumped[1] += 0.5;
  const auto zu = prox_fused_lasso({bumped, 1.0, 0.2, 0.3, false});
  CHECK(zu[1] >= z[1] - 1e-15);
}

TEST_CASE("large fusion weight collapses to the soft-thresholded mean") {
  const std::vector<double> a{2.0, 1.0, 0.0};
  const auto z = prox_fused_lasso({a, 1.0, 0.25, 100.0, false});
  for (double v : z) CHECK(v == doctest::Approx(0.75));
}

TEST_CASE("subgradient residual vanishes at the prox solution") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t k = 1 + static_cast<std::size_t>(rep % 4);
    std::vector<double> a(k);
    for (auto& v : a) v = nd(rng);
    const double eta = 1.7;
    const auto z = prox_fused_lasso({a, eta, 0.3, 0.25, false});
    std::vector<double> grad(k);
    for (std::size_t i = 0; i < k; ++i) grad[i] = eta * (z[i] - a[i]);
    CHECK(fused_subgradient_residual(z, grad, 0.3, 0.25, 1e-12) < 1e-10);
    // a shifted point is not stationary
    auto off = z;
    off[0] += 0.5;
    for (std::size_t i = 0; i < k; ++i) grad[i] = eta * (off[i] - a[i]);
    CHECK(fused_subgradient_residual(off, grad, 0.3, 0.25, 1e-12) > 0.1);
  }
}

TEST_CASE("subgradient residual hand case") {
  // zero group needs |g| <= lambda; here g = 0.5 with lambda 0.2 -> residual 0.3
  CHECK(fused_subgradient_residual(std::vector<double>{0.0}, std::vector<double>{0.5}, 0.2, 0.0) ==
        doctest::Approx(0.3));
  // fused pair, gradients (1, -1), rho 0.4: flow can cancel 0.4 of the imbalance
  CHECK(fused_subgradient_residual(std::vector<double>{1.0, 1.0}, std::vector<double>{0.5, -1.5},
                                   0.5, 0.4) == doctest::Approx(0.6));
}

TEST_CASE("penalty value") {
  std::vector<SymMatrix> t{SymMatrix(Eigen::Matrix2d{{1.0, 0.5}, {0.5, 1.0}}),
                           SymMatrix(Eigen::Matrix2d{{2.0, -0.5}, {-0.5, 1.0}})};
  // both triangles count: lambda * 2 * (0.5 + 0.5) + rho * 2 * 1.0
  CHECK(fused_penalty_value(t, {0.1, 0.2, false}) == doctest::Approx(0.2 + 0.4));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PenaltyParams({-0.1, 0.0, false}).validate(), InvalidInput);
  CHECK_THROWS_AS(prox_fused_lasso({{1.0}, 0.0, 0.1, 0.1, false}), InvalidInput);
}

}
