#pragma once

#include <string>

#include "evotherm/linalg.hpp"

namespace evotherm {

/// Uniform tensor-product grid on an interval (1D) or rectangle (2D) with
/// homogeneous Dirichlet boundary encoded in the operator domains.
struct Grid {
  int dimension = 1;
  std::vector<std::size_t> cells;   // per axis
  std::vector<double> lengths;      // per axis

  double spacing(int axis) const { return lengths[axis] / double(cells[axis]); }
  void validate() const;
};

enum class FieldKind { ScalarNode, VectorFace, VectorNode, SymTensorCell };

/// A discrete L^2 space: dof count plus strictly positive quadrature
/// weights defining the inner product.
struct FieldSpace {
  FieldKind kind;
  Grid grid;
  std::size_t dof_count = 0;
  Vector weights;  // one per dof
};

FieldSpace make_space(FieldKind kind, const Grid& grid);

/// Sparse matrix tagged with its weighted domain and codomain.
struct DiscreteOperator {
  SparseMatrix matrix;
  FieldSpace domain;
  FieldSpace codomain;
  std::string label;

  DenseMatrix dense() const { return matrix.to_dense(); }
};

// grad deg : scalar-node -> vector-face, zero Dirichlet on the argument.
DiscreteOperator build_grad(const Grid& grid);
// div = -W_node^{-1} grad^T W_face : vector-face -> scalar-node.
DiscreteOperator build_div(const Grid& grid);
// Symmetric gradient: vector-node -> symtensor-cell (coincides with grad in 1D).
DiscreteOperator build_Grad(const Grid& grid);
// Div = -W_vec^{-1} Grad^T W_tens : symtensor-cell -> vector-node.
DiscreteOperator build_Div(const Grid& grid);

DenseMatrix sym_part(const DenseMatrix& m);
DenseMatrix skew_part(const DenseMatrix& m);

/// Weighted adjoint of a matrix between weighted spaces:
/// A* = W_dom^{-1} A^T W_cod.
DenseMatrix weighted_adjoint(const DenseMatrix& m, const Vector& w_dom,
                             const Vector& w_cod);
DenseMatrix weighted_adjoint(const DiscreteOperator& op);

/// Conjugation to orthonormal coordinates: W_cod^{1/2} A W_dom^{-1/2}.
DenseMatrix to_orthonormal(const DenseMatrix& m, const Vector& w_dom,
                           const Vector& w_cod);
DenseMatrix from_orthonormal(const DenseMatrix& m, const Vector& w_dom,
                             const Vector& w_cod);

/// Operator norm between weighted spaces.
double weighted_op_norm(const DenseMatrix& m, const Vector& w_dom,
                        const Vector& w_cod);

double weighted_norm(const Vector& v, const Vector& w);

}  // namespace evotherm
