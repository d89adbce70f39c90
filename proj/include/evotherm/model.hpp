#pragma once

#include "evotherm/material.hpp"
#include "evotherm/operator_calculus.hpp"

namespace evotherm {

/// The triple (M0, M1, A) of an evolutionary system, with the state layout
/// mapping block indices to fields and spaces.
struct BlockSystem {
  Variant variant;
  Grid grid;
  MaterialData material;
  std::vector<std::pair<std::string, FieldSpace>> layout;
  std::vector<std::size_t> offsets;  // layout.size()+1 entries
  Vector weights;                    // concatenated space weights
  DenseMatrix M0;
  DenseMatrix M1;
  DenseMatrix A;

  std::size_t size() const { return offsets.back(); }
  std::size_t block_index(const std::string& field) const;
  DenseMatrix block(const DenseMatrix& m, std::size_t bi, std::size_t bj) const;
};

struct WellPosednessCertificate {
  double c_range = 0.0;       // positivity of M0 on its range
  double c_kernel = 0.0;      // positivity of sym M1 on N(M0)
  double skew_residual = 0.0; // ||A + A*||
  double nu0_estimate = 0.0;

  bool valid() const {
    return c_range > 0.0 && c_kernel > 0.0 && skew_residual < 1e-12;
  }
};

BlockSystem assemble_two_temperature(const Grid& grid,
                                     const MaterialData& material);
BlockSystem assemble_two_strain(const Grid& grid, const MaterialData& material);
BlockSystem assemble_yosida(const Grid& grid, const MaterialData& material);
BlockSystem assemble_classical_limit(const Grid& grid,
                                     const MaterialData& material);
BlockSystem assemble(Variant variant, const Grid& grid,
                     const MaterialData& material);

/// Off-diagonal coupling block M1,32 (theta -> flux-state), exposed for the
/// norm-bound and commutation checks.
DenseMatrix coupling_block_m132(const Grid& grid, const MaterialData& material);
/// The same block assembled from the codomain-side square root.
DenseMatrix coupling_block_m132_left(const Grid& grid,
                                     const MaterialData& material);
/// Elastic coupling block M1,10 of the two-strain model.
DenseMatrix coupling_block_m110(const Grid& grid, const MaterialData& material);

struct GaussTransform {
  DenseMatrix S;        // unit diagonal, gamma in the (sigma, theta) block
  DenseMatrix reduced;  // (S^{-1})* M0 S^{-1}
};

GaussTransform gauss_transform(const BlockSystem& system);

WellPosednessCertificate check_wellposedness(const BlockSystem& system);

}  // namespace evotherm
