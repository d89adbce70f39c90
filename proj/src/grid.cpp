#include "evotherm/grid.hpp"

#include <cmath>

namespace evotherm {

void Grid::validate() const {
  if (dimension != 1 && dimension != 2)
    throw ValidationError("grid dimension must be 1 or 2");
  if (cells.size() != std::size_t(dimension) ||
      lengths.size() != std::size_t(dimension))
    throw ValidationError("grid cells/lengths must match dimension");
  for (int ax = 0; ax < dimension; ++ax) {
    if (cells[ax] < 2) throw ValidationError("grid needs at least 2 cells per axis");
    if (!(lengths[ax] > 0.0)) throw ValidationError("grid lengths must be positive");
  }
}

namespace {

double cell_volume(const Grid& g) {
  double v = 1.0;
  for (int ax = 0; ax < g.dimension; ++ax) v *= g.spacing(ax);
  return v;
}

std::size_t dof_count_for(FieldKind kind, const Grid& g) {
  if (g.dimension == 1) {
    const std::size_t n = g.cells[0];
    switch (kind) {
      case FieldKind::ScalarNode:
      case FieldKind::VectorNode:
        return n - 1;
      case FieldKind::VectorFace:
      case FieldKind::SymTensorCell:
        return n;
    }
  }
  const std::size_t nx = g.cells[0], ny = g.cells[1];
  switch (kind) {
    case FieldKind::ScalarNode:
      return (nx - 1) * (ny - 1);
    case FieldKind::VectorNode:
      return 2 * (nx - 1) * (ny - 1);
    case FieldKind::VectorFace:
      return nx * (ny - 1) + (nx - 1) * ny;
    case FieldKind::SymTensorCell:
      return 3 * nx * ny;
  }
  return 0;
}

}  // namespace

FieldSpace make_space(FieldKind kind, const Grid& grid) {
  grid.validate();
  FieldSpace s;
  s.kind = kind;
  s.grid = grid;
  s.dof_count = dof_count_for(kind, grid);
  s.weights.assign(s.dof_count, cell_volume(grid));
  return s;
}

namespace {

using Triplet = SparseMatrix::Triplet;

// Interior node index maps. Boundary nodes carry the Dirichlet zero and
// have no dof.
std::size_t node_idx_2d(const Grid& g, std::size_t i, std::size_t j) {
  return (j - 1) * (g.cells[0] - 1) + (i - 1);
}

bool interior_2d(const Grid& g, std::size_t i, std::size_t j) {
  return i >= 1 && i <= g.cells[0] - 1 && j >= 1 && j <= g.cells[1] - 1;
}

SparseMatrix grad_matrix(const Grid& g) {
  std::vector<Triplet> t;
  if (g.dimension == 1) {
    const std::size_t n = g.cells[0];
    const double inv_h = 1.0 / g.spacing(0);
    for (std::size_t c = 0; c < n; ++c) {
      if (c + 1 <= n - 1) t.push_back({c, c, inv_h});      // +u_{c+1}
      if (c >= 1) t.push_back({c, c - 1, -inv_h});         // -u_c
    }
    return SparseMatrix(n, n - 1, std::move(t));
  }
  const std::size_t nx = g.cells[0], ny = g.cells[1];
  const double ihx = 1.0 / g.spacing(0), ihy = 1.0 / g.spacing(1);
  const std::size_t n_xf = nx * (ny - 1);
  // x-differences along node rows j = 1..ny-1
  for (std::size_t j = 1; j <= ny - 1; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t row = (j - 1) * nx + i;
      if (interior_2d(g, i + 1, j)) t.push_back({row, node_idx_2d(g, i + 1, j), ihx});
      if (interior_2d(g, i, j)) t.push_back({row, node_idx_2d(g, i, j), -ihx});
    }
  }
  // y-differences along node columns i = 1..nx-1
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 1; i <= nx - 1; ++i) {
      const std::size_t row = n_xf + j * (nx - 1) + (i - 1);
      if (interior_2d(g, i, j + 1)) t.push_back({row, node_idx_2d(g, i, j + 1), ihy});
      if (interior_2d(g, i, j)) t.push_back({row, node_idx_2d(g, i, j), -ihy});
    }
  }
  return SparseMatrix(nx * (ny - 1) + (nx - 1) * ny, (nx - 1) * (ny - 1),
                      std::move(t));
}

SparseMatrix Grad_matrix(const Grid& g) {
  if (g.dimension == 1) return grad_matrix(g);
  const std::size_t nx = g.cells[0], ny = g.cells[1];
  const double ihx = 1.0 / g.spacing(0), ihy = 1.0 / g.spacing(1);
  const std::size_t n_node = (nx - 1) * (ny - 1);
  const double s2 = std::sqrt(2.0);
  std::vector<Triplet> t;
  // Per cell (i,j): mean gradient over the four corner nodes; components
  // (e11, e22, sqrt(2) e12) so the component inner product matches the
  // Frobenius one.
  auto add_corner = [&](std::size_t row, std::size_t i, std::size_t j,
                        int comp, double coeff) {
    if (!interior_2d(g, i, j)) return;  // Dirichlet zero
    t.push_back({row, std::size_t(comp) * n_node + node_idx_2d(g, i, j), coeff});
  };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t base = 3 * (j * nx + i);
      // e11 = du/dx
      add_corner(base + 0, i + 1, j, 0, 0.5 * ihx);
      add_corner(base + 0, i + 1, j + 1, 0, 0.5 * ihx);
      add_corner(base + 0, i, j, 0, -0.5 * ihx);
      add_corner(base + 0, i, j + 1, 0, -0.5 * ihx);
      // e22 = dv/dy
      add_corner(base + 1, i, j + 1, 1, 0.5 * ihy);
      add_corner(base + 1, i + 1, j + 1, 1, 0.5 * ihy);
      add_corner(base + 1, i, j, 1, -0.5 * ihy);
      add_corner(base + 1, i + 1, j, 1, -0.5 * ihy);
      // sqrt(2) e12 = sqrt(2)/2 (du/dy + dv/dx)
      add_corner(base + 2, i, j + 1, 0, s2 * 0.25 * ihy);
      add_corner(base + 2, i + 1, j + 1, 0, s2 * 0.25 * ihy);
      add_corner(base + 2, i, j, 0, -s2 * 0.25 * ihy);
      add_corner(base + 2, i + 1, j, 0, -s2 * 0.25 * ihy);
      add_corner(base + 2, i + 1, j, 1, s2 * 0.25 * ihx);
      add_corner(base + 2, i + 1, j + 1, 1, s2 * 0.25 * ihx);
      add_corner(base + 2, i, j, 1, -s2 * 0.25 * ihx);
      add_corner(base + 2, i, j + 1, 1, -s2 * 0.25 * ihx);
    }
  }
  return SparseMatrix(3 * nx * ny, 2 * n_node, std::move(t));
}

// Negative weighted transpose, entry by entry, so the adjoint pairing is
// exact at assembly.
SparseMatrix neg_weighted_transpose(const SparseMatrix& m, const Vector& w_dom,
                                    const Vector& w_cod) {
  std::vector<Triplet> t;
  t.reserve(m.triplets().size());
  for (const auto& e : m.triplets()) {
    t.push_back({e.col, e.row, -e.value * (w_cod[e.row] / w_dom[e.col])});
  }
  return SparseMatrix(m.cols(), m.rows(), std::move(t));
}

}  // namespace

DiscreteOperator build_grad(const Grid& grid) {
  grid.validate();
  return DiscreteOperator{grad_matrix(grid), make_space(FieldKind::ScalarNode, grid),
                          make_space(FieldKind::VectorFace, grid), "grad0"};
}

DiscreteOperator build_div(const Grid& grid) {
  DiscreteOperator g = build_grad(grid);
  SparseMatrix d =
      neg_weighted_transpose(g.matrix, g.domain.weights, g.codomain.weights);
  return DiscreteOperator{std::move(d), g.codomain, g.domain, "div"};
}

DiscreteOperator build_Grad(const Grid& grid) {
  grid.validate();
  if (grid.dimension == 1) {
    DiscreteOperator g = build_grad(grid);
    g.domain.kind = FieldKind::VectorNode;
    g.codomain.kind = FieldKind::SymTensorCell;
    g.label = "Grad0";
    return g;
  }
  return DiscreteOperator{Grad_matrix(grid), make_space(FieldKind::VectorNode, grid),
                          make_space(FieldKind::SymTensorCell, grid), "Grad0"};
}

DiscreteOperator build_Div(const Grid& grid) {
  DiscreteOperator g = build_Grad(grid);
  SparseMatrix d =
      neg_weighted_transpose(g.matrix, g.domain.weights, g.codomain.weights);
  return DiscreteOperator{std::move(d), g.codomain, g.domain, "Div"};
}

DenseMatrix sym_part(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw NotSquareError("sym_part: matrix not square");
  DenseMatrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

DenseMatrix skew_part(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw NotSquareError("skew_part: matrix not square");
  DenseMatrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      s(i, j) = 0.5 * (m(i, j) - m(j, i));
  return s;
}

DenseMatrix weighted_adjoint(const DenseMatrix& m, const Vector& w_dom,
                             const Vector& w_cod) {
  DenseMatrix a(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      a(j, i) = m(i, j) * (w_cod[i] / w_dom[j]);
  return a;
}

DenseMatrix weighted_adjoint(const DiscreteOperator& op) {
  return weighted_adjoint(op.dense(), op.domain.weights, op.codomain.weights);
}

DenseMatrix to_orthonormal(const DenseMatrix& m, const Vector& w_dom,
                           const Vector& w_cod) {
  DenseMatrix r = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      r(i, j) *= std::sqrt(w_cod[i]) / std::sqrt(w_dom[j]);
  return r;
}

DenseMatrix from_orthonormal(const DenseMatrix& m, const Vector& w_dom,
                             const Vector& w_cod) {
  DenseMatrix r = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      r(i, j) *= std::sqrt(w_dom[j]) / std::sqrt(w_cod[i]);
  return r;
}

double weighted_op_norm(const DenseMatrix& m, const Vector& w_dom,
                        const Vector& w_cod) {
  return op_norm(to_orthonormal(m, w_dom, w_cod));
}

double weighted_norm(const Vector& v, const Vector& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
  return std::sqrt(s);
}

}  // namespace evotherm
