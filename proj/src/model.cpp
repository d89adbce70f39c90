#include "evotherm/model.hpp"

#include <cmath>
#include <limits>

namespace evotherm {

std::size_t BlockSystem::block_index(const std::string& field) const {
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i].first == field) return i;
  throw ValidationError("no such field in layout: " + field);
}

DenseMatrix BlockSystem::block(const DenseMatrix& m, std::size_t bi,
                               std::size_t bj) const {
  const std::size_t r0 = offsets[bi], r1 = offsets[bi + 1];
  const std::size_t c0 = offsets[bj], c1 = offsets[bj + 1];
  DenseMatrix b(r1 - r0, c1 - c0);
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t j = c0; j < c1; ++j) b(i - r0, j - c0) = m(i, j);
  return b;
}

namespace {

struct Pieces {
  FieldSpace sv, st, ss, sf;
  Vector rho_v, rho_s;
  DenseMatrix C, Cinv, kappa, kappa_sqrt, gamma, gamma_adj;
  DenseMatrix grad, div, Grad, Div;
};

Pieces make_pieces(const Grid& grid, const MaterialData& mat) {
  Pieces p;
  p.sv = make_space(FieldKind::VectorNode, grid);
  p.st = make_space(FieldKind::SymTensorCell, grid);
  p.ss = make_space(FieldKind::ScalarNode, grid);
  p.sf = make_space(FieldKind::VectorFace, grid);
  p.rho_v = mat.rho0_on(p.sv);
  p.rho_s = mat.rho0_on(p.ss);
  p.C = mat.C_on(p.st);
  p.Cinv = inverse(p.C);
  p.kappa = mat.kappa_on(p.sf);
  p.kappa_sqrt = spd_sqrt(to_orthonormal(p.kappa, p.sf.weights, p.sf.weights));
  p.kappa_sqrt = from_orthonormal(p.kappa_sqrt, p.sf.weights, p.sf.weights);
  p.gamma = mat.gamma_on(grid);
  p.gamma_adj = weighted_adjoint(p.gamma, p.ss.weights, p.st.weights);
  p.grad = build_grad(grid).dense();
  p.div = build_div(grid).dense();
  p.Grad = build_Grad(grid).dense();
  p.Div = build_Div(grid).dense();
  return p;
}

/// kappa_alpha = sqrt(alpha) kappa sqrt(alpha) on the face space.
DenseMatrix kappa_alpha_of(const Pieces& p, const MaterialData& mat) {
  if (mat.alpha_matrix) {
    DenseMatrix sa =
        spd_sqrt(to_orthonormal(*mat.alpha_matrix, p.sf.weights, p.sf.weights));
    sa = from_orthonormal(sa, p.sf.weights, p.sf.weights);
    return matmul(sa, matmul(p.kappa, sa));
  }
  return scale(p.kappa, mat.alpha);
}

void set_block(DenseMatrix& m, const std::vector<std::size_t>& off,
               std::size_t bi, std::size_t bj, const DenseMatrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      m(off[bi] + i, off[bj] + j) = b(i, j);
}

void set_diag_block(DenseMatrix& m, const std::vector<std::size_t>& off,
                    std::size_t bi, const Vector& d) {
  for (std::size_t i = 0; i < d.size(); ++i) m(off[bi] + i, off[bi] + i) = d[i];
}

BlockSystem init_system(Variant variant, const Grid& grid,
                        const MaterialData& mat, const Pieces& p,
                        const std::string& fourth_field) {
  BlockSystem s;
  s.variant = variant;
  s.grid = grid;
  s.material = mat;
  s.layout = {{"v", p.sv},
              {variant == Variant::TwoStrain ? "s" : "sigma", p.st},
              {"theta", p.ss},
              {fourth_field, p.sf}};
  s.offsets = {0};
  for (const auto& [name, sp] : s.layout)
    s.offsets.push_back(s.offsets.back() + sp.dof_count);
  s.weights.clear();
  for (const auto& [name, sp] : s.layout)
    s.weights.insert(s.weights.end(), sp.weights.begin(), sp.weights.end());
  const std::size_t n = s.offsets.back();
  s.M0 = DenseMatrix(n, n);
  s.M1 = DenseMatrix(n, n);
  s.A = DenseMatrix(n, n);
  return s;
}

// Thm-3.3 style M0 with C^{-1} in the stress block.
void fill_m0_standard(BlockSystem& s, const Pieces& p,
                      const MaterialData& mat) {
  set_diag_block(s.M0, s.offsets, 0, p.rho_v);
  set_block(s.M0, s.offsets, 1, 1, p.Cinv);
  const DenseMatrix cig = matmul(p.Cinv, p.gamma);
  set_block(s.M0, s.offsets, 1, 2, cig);
  set_block(s.M0, s.offsets, 2, 1, matmul(p.gamma_adj, p.Cinv));
  DenseMatrix th = matmul(p.gamma_adj, cig);
  for (std::size_t i = 0; i < th.rows(); ++i)
    th(i, i) += p.rho_s[i] * mat.lambda / mat.T0;
  set_block(s.M0, s.offsets, 2, 2, th);
}

void fill_elastic_A(BlockSystem& s, const Pieces& p) {
  set_block(s.A, s.offsets, 0, 1, scale(p.Div, -1.0));
  set_block(s.A, s.offsets, 1, 0, scale(p.Grad, -1.0));
}

DenseMatrix m132_right(const Pieces& p, const MaterialData& mat) {
  const DenseMatrix ka = kappa_alpha_of(p, mat);
  // L = -div kappa_alpha grad, PSD on the scalar-node space
  const DenseMatrix l = scale(matmul(p.div, matmul(ka, p.grad)), -1.0);
  const DenseMatrix r = resolvent_inverse_sqrt(l, p.ss.weights);
  return matmul(p.kappa_sqrt, matmul(p.grad, r));
}

DenseMatrix m132_left(const Pieces& p, const MaterialData& mat) {
  const DenseMatrix ka = kappa_alpha_of(p, mat);
  DenseMatrix ka_sqrt = spd_sqrt(to_orthonormal(ka, p.sf.weights, p.sf.weights));
  ka_sqrt = from_orthonormal(ka_sqrt, p.sf.weights, p.sf.weights);
  // 1 + AA* with A = sqrt(kappa_alpha) grad
  const DenseMatrix f =
      scale(matmul(ka_sqrt, matmul(p.grad, matmul(p.div, ka_sqrt))), -1.0);
  const DenseMatrix r = resolvent_inverse_sqrt(f, p.sf.weights);
  return matmul(r, matmul(p.kappa_sqrt, p.grad));
}

void fill_thermal_m1(BlockSystem& s, const Pieces& p, const DenseMatrix& m132,
                     double t0) {
  const DenseMatrix m132_adj =
      weighted_adjoint(m132, p.ss.weights, p.sf.weights);
  set_block(s.M1, s.offsets, 2, 3, scale(m132_adj, -1.0));
  set_block(s.M1, s.offsets, 3, 2, m132);
  set_block(s.M1, s.offsets, 3, 3,
            scale(DenseMatrix::identity(p.sf.dof_count), t0));
}

}  // namespace

DenseMatrix coupling_block_m132(const Grid& grid, const MaterialData& mat) {
  return m132_right(make_pieces(grid, mat), mat);
}

DenseMatrix coupling_block_m132_left(const Grid& grid,
                                     const MaterialData& mat) {
  return m132_left(make_pieces(grid, mat), mat);
}

DenseMatrix coupling_block_m110(const Grid& grid, const MaterialData& mat) {
  const Pieces p = make_pieces(grid, mat);
  const DenseMatrix cb = scale(p.C, *mat.beta);
  // Lv = -Div C_beta Grad, PSD on the vector-node space
  const DenseMatrix lv = scale(matmul(p.Div, matmul(cb, p.Grad)), -1.0);
  const DenseMatrix r = resolvent_inverse_sqrt(lv, p.sv.weights);
  DenseMatrix c_sqrt = spd_sqrt(to_orthonormal(p.C, p.st.weights, p.st.weights));
  c_sqrt = from_orthonormal(c_sqrt, p.st.weights, p.st.weights);
  return scale(matmul(c_sqrt, matmul(p.Grad, r)), -1.0);
}

BlockSystem assemble_two_temperature(const Grid& grid,
                                     const MaterialData& mat) {
  mat.validate(Variant::TwoTemperature);
  const Pieces p = make_pieces(grid, mat);
  BlockSystem s = init_system(Variant::TwoTemperature, grid, mat, p, "w");
  fill_m0_standard(s, p, mat);
  fill_elastic_A(s, p);
  fill_thermal_m1(s, p, m132_right(p, mat), mat.T0);
  return s;
}

BlockSystem assemble_two_strain(const Grid& grid, const MaterialData& mat) {
  mat.validate(Variant::TwoStrain);
  const Pieces p = make_pieces(grid, mat);
  BlockSystem s = init_system(Variant::TwoStrain, grid, mat, p, "w");

  DenseMatrix c_sqrt = spd_sqrt(to_orthonormal(p.C, p.st.weights, p.st.weights));
  c_sqrt = from_orthonormal(c_sqrt, p.st.weights, p.st.weights);
  const DenseMatrix cinv_sqrt = inverse(c_sqrt);

  // M0 with the unitarily congruent stress block.
  set_diag_block(s.M0, s.offsets, 0, p.rho_v);
  set_block(s.M0, s.offsets, 1, 1, DenseMatrix::identity(p.st.dof_count));
  const DenseMatrix cg = matmul(cinv_sqrt, p.gamma);
  set_block(s.M0, s.offsets, 1, 2, cg);
  set_block(s.M0, s.offsets, 2, 1,
            weighted_adjoint(cg, p.ss.weights, p.st.weights));
  DenseMatrix th = matmul(p.gamma_adj, matmul(p.Cinv, p.gamma));
  for (std::size_t i = 0; i < th.rows(); ++i)
    th(i, i) += p.rho_s[i] * mat.lambda / mat.T0;
  set_block(s.M0, s.offsets, 2, 2, th);

  // A vanishes; the elastic coupling moves into M1.
  const DenseMatrix m110 = coupling_block_m110(grid, mat);
  set_block(s.M1, s.offsets, 1, 0, m110);
  set_block(s.M1, s.offsets, 0, 1,
            scale(weighted_adjoint(m110, p.sv.weights, p.st.weights), -1.0));
  fill_thermal_m1(s, p, m132_right(p, mat), mat.T0);
  return s;
}

BlockSystem assemble_yosida(const Grid& grid, const MaterialData& mat) {
  mat.validate(Variant::Yosida);
  const Pieces p = make_pieces(grid, mat);
  BlockSystem s = init_system(Variant::Yosida, grid, mat, p, "z");
  fill_m0_standard(s, p, mat);
  fill_elastic_A(s, p);

  const double eps = *mat.eps;
  const DenseMatrix d = matmul(p.kappa_sqrt, p.grad);
  const DenseMatrix d_adj = weighted_adjoint(d, p.ss.weights, p.sf.weights);
  const DenseMatrix dtd = matmul(d_adj, d);
  const DenseMatrix ddt = matmul(d, d_adj);
  DenseMatrix rn = scale(dtd, eps * eps);
  for (std::size_t i = 0; i < rn.rows(); ++i) rn(i, i) += 1.0;
  DenseMatrix rf = scale(ddt, eps * eps);
  for (std::size_t i = 0; i < rf.rows(); ++i) rf(i, i) += 1.0;
  const DenseMatrix inv_n = inverse(rn);
  const DenseMatrix inv_f = inverse(rf);

  set_block(s.M1, s.offsets, 2, 2, scale(matmul(dtd, inv_n), eps));
  set_block(s.M1, s.offsets, 2, 3, scale(matmul(d_adj, inv_f), -1.0));
  set_block(s.M1, s.offsets, 3, 2, matmul(d, inv_n));
  DenseMatrix lr = scale(matmul(ddt, inv_f), eps);
  for (std::size_t i = 0; i < lr.rows(); ++i) lr(i, i) += mat.T0;
  set_block(s.M1, s.offsets, 3, 3, lr);
  return s;
}

BlockSystem assemble_classical_limit(const Grid& grid,
                                     const MaterialData& mat) {
  mat.validate(Variant::ClassicalLimit);
  const Pieces p = make_pieces(grid, mat);
  BlockSystem s = init_system(Variant::ClassicalLimit, grid, mat, p, "r");
  fill_m0_standard(s, p, mat);
  fill_elastic_A(s, p);

  // The thermal coupling sits inside A for alpha = 0.
  const DenseMatrix d = matmul(p.kappa_sqrt, p.grad);
  const DenseMatrix d_adj = weighted_adjoint(d, p.ss.weights, p.sf.weights);
  set_block(s.A, s.offsets, 3, 2, d);
  set_block(s.A, s.offsets, 2, 3, scale(d_adj, -1.0));

  set_block(s.M1, s.offsets, 3, 3,
            scale(DenseMatrix::identity(p.sf.dof_count), mat.T0));
  return s;
}

BlockSystem assemble(Variant variant, const Grid& grid,
                     const MaterialData& material) {
  switch (variant) {
    case Variant::TwoTemperature: return assemble_two_temperature(grid, material);
    case Variant::TwoStrain: return assemble_two_strain(grid, material);
    case Variant::Yosida: return assemble_yosida(grid, material);
    case Variant::ClassicalLimit: return assemble_classical_limit(grid, material);
  }
  throw ValidationError("unknown variant");
}

GaussTransform gauss_transform(const BlockSystem& system) {
  if (system.variant == Variant::TwoStrain)
    throw VariantMismatchError(
        "gauss_transform requires the standard M0 (not two_strain)");
  const std::size_t n = system.size();
  DenseMatrix s_mat = DenseMatrix::identity(n);
  DenseMatrix s_inv = DenseMatrix::identity(n);
  const DenseMatrix gamma = system.material.gamma_on(system.grid);
  const std::size_t r0 = system.offsets[1], c0 = system.offsets[2];
  for (std::size_t i = 0; i < gamma.rows(); ++i)
    for (std::size_t j = 0; j < gamma.cols(); ++j) {
      s_mat(r0 + i, c0 + j) = gamma(i, j);
      s_inv(r0 + i, c0 + j) = -gamma(i, j);
    }
  const DenseMatrix s_inv_adj =
      weighted_adjoint(s_inv, system.weights, system.weights);
  DenseMatrix reduced = matmul(s_inv_adj, matmul(system.M0, s_inv));
  return {std::move(s_mat), std::move(reduced)};
}

WellPosednessCertificate check_wellposedness(const BlockSystem& system) {
  WellPosednessCertificate cert;
  const Vector& w = system.weights;
  const DenseMatrix m0t = to_orthonormal(system.M0, w, w);
  const DenseMatrix at = to_orthonormal(system.A, w, w);
  const DenseMatrix m1t = to_orthonormal(system.M1, w, w);

  cert.skew_residual = op_norm(add(at, transpose(at)));

  EigenDecomposition d = sym_eig(sym_part(m0t));
  double lam_max = 0.0;
  for (double l : d.eigenvalues) lam_max = std::max(lam_max, std::abs(l));
  const double tol = 1e-12 * (lam_max > 0.0 ? lam_max : 1.0);

  const std::size_t n = system.size();
  std::vector<std::size_t> range_idx, kernel_idx;
  for (std::size_t i = 0; i < n; ++i) {
    (std::abs(d.eigenvalues[i]) > tol ? range_idx : kernel_idx).push_back(i);
  }

  cert.c_range = 0.0;
  for (std::size_t k = 0; k < range_idx.size(); ++k) {
    const double l = d.eigenvalues[range_idx[k]];
    cert.c_range = (k == 0) ? l : std::min(cert.c_range, l);
  }

  // sym M1 restricted to the kernel of M0.
  if (!kernel_idx.empty()) {
    const DenseMatrix sm1 = sym_part(m1t);
    DenseMatrix basis(n, kernel_idx.size());
    for (std::size_t k = 0; k < kernel_idx.size(); ++k)
      for (std::size_t i = 0; i < n; ++i)
        basis(i, k) = d.eigenvectors(i, kernel_idx[k]);
    const DenseMatrix proj =
        sym_part(matmul(transpose(basis), matmul(sm1, basis)));
    cert.c_kernel = sym_eig(proj).eigenvalues.front();
  } else {
    cert.c_kernel = std::numeric_limits<double>::infinity();
  }

  cert.nu0_estimate = (cert.c_range > 0.0 && cert.c_kernel > 0.0)
                          ? 0.0
                          : std::numeric_limits<double>::infinity();
  return cert;
}

}  // namespace evotherm
