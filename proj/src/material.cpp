#include "evotherm/material.hpp"

#include <cmath>

namespace evotherm {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::TwoTemperature: return "two_temperature";
    case Variant::TwoStrain: return "two_strain";
    case Variant::Yosida: return "yosida";
    case Variant::ClassicalLimit: return "classical_limit";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "two_temperature") return Variant::TwoTemperature;
  if (name == "two_strain") return Variant::TwoStrain;
  if (name == "yosida") return Variant::Yosida;
  if (name == "classical_limit") return Variant::ClassicalLimit;
  throw ValidationError("unknown variant: " + name);
}

void MaterialData::validate(Variant variant) const {
  if (!(rho0 > 0.0)) throw ValidationError("rho0 must be positive");
  for (double r : rho0_nodes)
    if (!(r > 0.0)) throw ValidationError("rho0 must be positive pointwise");
  // c_elast is deliberately not checked here: an indefinite C is caught by
  // the well-posedness certificate, which is the diagnosable failure mode.
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  if (!(T0 > 0.0)) throw ValidationError("T0 must be positive");
  if (variant == Variant::TwoStrain) {
    if (!beta) throw ValidationError("beta required for two_strain");
    if (!(*beta > 0.0)) throw ValidationError("beta must be positive");
  }
  if (variant == Variant::Yosida) {
    if (!eps) throw ValidationError("eps required for yosida");
    if (!(*eps > 0.0)) throw ValidationError("eps must be positive");
  }
  if (alpha_matrix && variant != Variant::TwoTemperature)
    throw ValidationError("operator-valued alpha only supported for two_temperature");
  // SPD certificates for matrix coefficients.
  auto check_spd = [](const DenseMatrix& m, const char* name) {
    EigenDecomposition d = sym_eig(m);
    if (!(d.eigenvalues.front() > 0.0))
      throw ValidationError(std::string(name) + " must be SPD");
  };
  if (kappa_matrix) check_spd(*kappa_matrix, "kappa");
  if (alpha_matrix) check_spd(*alpha_matrix, "alpha");
}

Vector MaterialData::rho0_on(const FieldSpace& space) const {
  const std::size_t n = space.dof_count;
  if (space.kind == FieldKind::ScalarNode) {
    if (!rho0_nodes.empty()) {
      if (rho0_nodes.size() != n)
        throw ValidationError("rho0_nodes length mismatch");
      return rho0_nodes;
    }
    return Vector(n, rho0);
  }
  if (space.kind == FieldKind::VectorNode) {
    const std::size_t per_comp =
        (space.grid.dimension == 1) ? n : n / 2;
    Vector scalar =
        rho0_nodes.empty() ? Vector(per_comp, rho0) : rho0_nodes;
    if (scalar.size() != per_comp)
      throw ValidationError("rho0_nodes length mismatch");
    Vector out;
    out.reserve(n);
    const int comps = (space.grid.dimension == 1) ? 1 : 2;
    for (int c = 0; c < comps; ++c)
      out.insert(out.end(), scalar.begin(), scalar.end());
    return out;
  }
  throw ValidationError("rho0_on: expected a nodal space");
}

DenseMatrix MaterialData::C_on(const FieldSpace& symtensor) const {
  if (C_matrix) {
    if (C_matrix->rows() != symtensor.dof_count)
      throw ValidationError("C matrix dimension mismatch");
    return *C_matrix;
  }
  return scale(DenseMatrix::identity(symtensor.dof_count), c_elast);
}

DenseMatrix MaterialData::kappa_on(const FieldSpace& face) const {
  if (kappa_matrix) {
    if (kappa_matrix->rows() != face.dof_count)
      throw ValidationError("kappa matrix dimension mismatch");
    return *kappa_matrix;
  }
  return scale(DenseMatrix::identity(face.dof_count), kappa);
}

DenseMatrix MaterialData::gamma_on(const Grid& grid) const {
  const FieldSpace ss = make_space(FieldKind::ScalarNode, grid);
  const FieldSpace st = make_space(FieldKind::SymTensorCell, grid);
  DenseMatrix g(st.dof_count, ss.dof_count);
  if (gamma == 0.0) return g;
  if (grid.dimension == 1) {
    const std::size_t n = grid.cells[0];
    for (std::size_t c = 0; c < n; ++c) {
      // cell c spans nodes c and c+1; boundary nodes are zero
      if (c >= 1) g(c, c - 1) += 0.5 * gamma;
      if (c + 1 <= n - 1) g(c, c) += 0.5 * gamma;
    }
    return g;
  }
  const std::size_t nx = grid.cells[0], ny = grid.cells[1];
  auto node_col = [&](std::size_t i, std::size_t j) -> long {
    if (i < 1 || i > nx - 1 || j < 1 || j > ny - 1) return -1;
    return long((j - 1) * (nx - 1) + (i - 1));
  };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t base = 3 * (j * nx + i);
      for (std::size_t dj = 0; dj <= 1; ++dj) {
        for (std::size_t di = 0; di <= 1; ++di) {
          const long col = node_col(i + di, j + dj);
          if (col < 0) continue;
          // trace embedding: theta -> theta * I, components (e11, e22, 0)
          g(base + 0, std::size_t(col)) += 0.25 * gamma;
          g(base + 1, std::size_t(col)) += 0.25 * gamma;
        }
      }
    }
  }
  return g;
}

MaterialData default_material() {
  MaterialData m;
  m.rho0 = 1.0;
  m.c_elast = 1.0;
  m.kappa = 1.0;
  m.gamma = 0.1;
  m.lambda = 1.0;
  m.alpha = 1.0;
  m.beta = 1.0;
  m.eps = 0.1;
  m.T0 = 1.0;
  return m;
}

}  // namespace evotherm
