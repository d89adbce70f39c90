#pragma once

#include <optional>

#include "evotherm/grid.hpp"

namespace evotherm {

enum class Variant { TwoTemperature, TwoStrain, Yosida, ClassicalLimit };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Material coefficients. Scalars by default; C, kappa and alpha accept
/// full matrix overrides on their respective spaces.
struct MaterialData {
  double rho0 = 1.0;
  Vector rho0_nodes;  // optional per-node samples (scalar-node space)

  double c_elast = 1.0;
  std::optional<DenseMatrix> C_matrix;  // symtensor-cell space

  double kappa = 1.0;
  std::optional<DenseMatrix> kappa_matrix;  // vector-face space

  double gamma = 0.0;  // isotropic thermoelastic coupling strength
  double lambda = 1.0;
  double alpha = 1.0;
  std::optional<DenseMatrix> alpha_matrix;  // operator-valued alpha, 2T only
  std::optional<double> beta;               // two-strain parameter
  std::optional<double> eps;                // alternative parameter
  double T0 = 1.0;

  void validate(Variant variant) const;

  // Realizations on a concrete grid.
  Vector rho0_on(const FieldSpace& space) const;  // scalar- or vector-node
  DenseMatrix C_on(const FieldSpace& symtensor) const;
  DenseMatrix kappa_on(const FieldSpace& face) const;
  /// gamma = g * (trace embedding of node-to-cell averages):
  /// scalar-node -> symtensor-cell.
  DenseMatrix gamma_on(const Grid& grid) const;
};

MaterialData default_material();

}  // namespace evotherm
