#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "evotherm/operator_calculus.hpp"

using namespace evotherm;

namespace {

Grid grid_1d(std::size_t n) { return Grid{1, {n}, {1.0}}; }

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix m(r, c);
  for (double& x : m.data()) x = dist(rng);
  return m;
}

DenseMatrix random_spd(std::size_t n, std::mt19937& rng) {
  const DenseMatrix b = random_matrix(n, n, rng);
  DenseMatrix m = matmul(b, transpose(b));
  for (std::size_t i = 0; i < n; ++i) m(i, i) += 0.5;
  return m;
}

}  // namespace

TEST_CASE("modulus of a diagonal operator is the absolute value") {
  const WeightedOperator a =
      WeightedOperator::plain(DenseMatrix::diagonal({3.0, -2.0, 0.5}));
  const ModulusResult r = modulus(a);
  CHECK(r.modulus(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.modulus(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.modulus(2, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.partial_isometry_check < 1e-10);
}

TEST_CASE("modulus squares to A*A in the weighted inner product") {
  const DiscreteOperator grad = build_grad(grid_1d(9));
  const WeightedOperator a = WeightedOperator::from(grad);
  const ModulusResult r = modulus(a);
  const DenseMatrix m2 = matmul(r.modulus, r.modulus);
  const DenseMatrix gram = matmul(a.adjoint(), a.matrix);
  CHECK(max_abs(sub(m2, gram)) < 1e-10 * (1.0 + max_abs(gram)));
  CHECK(r.partial_isometry_check < 1e-10);
}

TEST_CASE("commuted square roots agree and contract on grad operators") {
  for (std::size_t n : {8, 16, 32}) {
    WeightedOperator a = WeightedOperator::from(build_grad(grid_1d(n)));
    a.matrix = scale(a.matrix, std::sqrt(0.7));  // some kappa_alpha
    const CommutedSqrtPair pair = commuted_sqrt(a);
    const double res = frobenius_norm(sub(pair.left, pair.right));
    CHECK(res <= 1e-10 * (1.0 + frobenius_norm(a.matrix)));
    CHECK(weighted_op_norm(pair.right, a.w_dom, a.w_cod) <= 1.0 + 1e-10);
  }
}

TEST_CASE("commuted square roots agree on random rectangular operators") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> wdist(0.5, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    WeightedOperator a{random_matrix(7, 4, rng), Vector(4), Vector(7)};
    for (double& w : a.w_dom) w = wdist(rng);
    for (double& w : a.w_cod) w = wdist(rng);
    const CommutedSqrtPair pair = commuted_sqrt(a);
    CHECK(frobenius_norm(sub(pair.left, pair.right)) < 1e-12);
    CHECK(weighted_op_norm(pair.right, a.w_dom, a.w_cod) <= 1.0 + 1e-12);
  }
}

TEST_CASE("resolvent_inverse_sqrt matches the diagonal oracle") {
  const Vector w(3, 0.4);
  const DenseMatrix a = DenseMatrix::diagonal({0.0, 1.0, 8.0});
  const DenseMatrix r = resolvent_inverse_sqrt(a, w);
  CHECK(r(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r(1, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r(2, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(r(0, 1)) < 1e-13);

  const DenseMatrix id = resolvent_inverse_sqrt(DenseMatrix(3, 3), w);
  CHECK(max_abs(sub(id, DenseMatrix::identity(3))) < 1e-13);

  CHECK_THROWS_AS(
      resolvent_inverse_sqrt(DenseMatrix::diagonal({-0.5, 1.0}), Vector(2, 1.0)),
      NotPsdError);
}

TEST_CASE("one_plus_sqrt matches the diagonal oracle") {
  const Vector w(2, 1.0);
  const DenseMatrix r = one_plus_sqrt(DenseMatrix::diagonal({0.0, 3.0}), w);
  CHECK(r(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("grid-operator square-root calls are counted") {
  const long before = resolvent_sqrt_call_count();
  resolvent_inverse_sqrt(DenseMatrix(2, 2), Vector(2, 1.0));
  one_plus_sqrt(DenseMatrix(2, 2), Vector(2, 1.0));
  CHECK(resolvent_sqrt_call_count() == before + 2);
}

TEST_CASE("product adjoint identity holds for selfadjoint invertible kappa") {
  const DiscreteOperator grad = build_grad(grid_1d(8));
  const WeightedOperator a = WeightedOperator::from(grad);
  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    // Uniform weights on the codomain: any symmetric matrix is selfadjoint.
    const DenseMatrix kappa = random_spd(8, rng);
    CHECK(product_adjoint_check(kappa, a) < 1e-12);
  }
  const DenseMatrix scaled = scale(DenseMatrix::identity(8), 2.5);
  CHECK(product_adjoint_check(scaled, a) < 1e-14);
}

TEST_CASE("product adjoint check rejects singular kappa") {
  const WeightedOperator a = WeightedOperator::from(build_grad(grid_1d(8)));
  DenseMatrix kappa(8, 8);  // zero matrix
  CHECK_THROWS_AS(product_adjoint_check(kappa, a), SingularKappaError);
}

TEST_CASE("yosida_apply matches the scalar resolvent and converges") {
  const DenseMatrix a = DenseMatrix::diagonal({1.0, 4.0, 10.0});
  const DenseMatrix y = yosida_apply(a, 0.5);
  CHECK(y(0, 0) == doctest::Approx(1.0 / 1.5).epsilon(1e-12));
  CHECK(y(1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(y(2, 2) == doctest::Approx(10.0 / 6.0).epsilon(1e-12));

  // Strong convergence on a fixed vector as eps -> 0.
  std::mt19937 rng(41);
  const DenseMatrix m = random_spd(5, rng);
  const Vector x{1.0, -0.5, 0.25, 0.0, 2.0};
  const Vector mx = matvec(m, x);
  double prev = 1e300;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const Vector yx = matvec(yosida_apply(m, eps), x);
    double diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      diff = std::max(diff, std::abs(yx[i] - mx[i]));
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 1e-2);

  CHECK_THROWS_AS(yosida_apply(DenseMatrix(2, 3), 0.1), NotSquareError);
}

TEST_CASE("weighted Frobenius norm reduces to the plain one for unit weights") {
  std::mt19937 rng(2);
  const DenseMatrix m = random_matrix(3, 5, rng);
  CHECK(weighted_frobenius(m, Vector(5, 1.0), Vector(3, 1.0)) ==
        doctest::Approx(frobenius_norm(m)).epsilon(1e-14));
  // Scaling both weights by c leaves the induced operator norm alone but
  // scales the HS norm by 1: dom and cod factors cancel.
  CHECK(weighted_frobenius(m, Vector(5, 4.0), Vector(3, 4.0)) ==
        doctest::Approx(frobenius_norm(m)).epsilon(1e-14));
}
