#pragma once

#include "evotherm/grid.hpp"

namespace evotherm {

/// A dense operator between weighted spaces; the weights define the inner
/// products in which adjoints and functions of the operator are taken.
struct WeightedOperator {
  DenseMatrix matrix;
  Vector w_dom;
  Vector w_cod;

  static WeightedOperator from(const DiscreteOperator& op) {
    return {op.dense(), op.domain.weights, op.codomain.weights};
  }
  static WeightedOperator plain(const DenseMatrix& m) {
    return {m, Vector(m.cols(), 1.0), Vector(m.rows(), 1.0)};
  }

  DenseMatrix adjoint() const { return weighted_adjoint(matrix, w_dom, w_cod); }
};

struct ModulusResult {
  DenseMatrix modulus;            // |A| = sqrt(A*A), SPD on the domain space
  double partial_isometry_check;  // ||A - U|A|||_F with U = A pinv(|A|)
};

struct CommutedSqrtPair {
  DenseMatrix left;   // (1+|A*|^2)^{-1/2} A
  DenseMatrix right;  // A (1+|A|^2)^{-1/2}
  double alpha_scale = 1.0;
};

ModulusResult modulus(const WeightedOperator& a);

/// Both sides of the commuted-square-root identity, computed from two
/// independent eigendecompositions (of AA* and A*A).
CommutedSqrtPair commuted_sqrt(const WeightedOperator& a,
                               double alpha_scale = 1.0);

/// (1 + A)^{-1/2} for A symmetric PSD in the weighted inner product.
DenseMatrix resolvent_inverse_sqrt(const DenseMatrix& a, const Vector& w);

/// Counts resolvent_inverse_sqrt calls; the Yosida assembly path asserts
/// this stays at zero.
long resolvent_sqrt_call_count();

/// Frobenius residual of (kappa A)* against A* kappa*, weighted.
double product_adjoint_check(const DenseMatrix& kappa,
                             const WeightedOperator& a);

/// Yosida approximation A (1 + eps A)^{-1}.
DenseMatrix yosida_apply(const DenseMatrix& a, double eps);

/// sqrt(1 + A) for A symmetric PSD in the weighted inner product.
DenseMatrix one_plus_sqrt(const DenseMatrix& a, const Vector& w);

/// Weighted Frobenius norm (Hilbert-Schmidt norm with respect to the
/// weighted inner products).
double weighted_frobenius(const DenseMatrix& m, const Vector& w_dom,
                          const Vector& w_cod);

}  // namespace evotherm
