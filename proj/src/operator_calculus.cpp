#include "evotherm/operator_calculus.hpp"

#include <atomic>
#include <cmath>

namespace evotherm {

namespace {

std::atomic<long> g_resolvent_sqrt_calls{0};

// Apply f to the spectrum of a symmetric matrix.
template <typename F>
DenseMatrix spectral_map(const DenseMatrix& sym, F f) {
  EigenDecomposition d = sym_eig(sym);
  const std::size_t n = sym.rows();
  DenseMatrix vs = d.eigenvectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double fl = f(d.eigenvalues[j]);
    for (std::size_t i = 0; i < n; ++i) vs(i, j) *= fl;
  }
  DenseMatrix r = matmul(vs, transpose(d.eigenvectors));
  return sym_part(r);
}

}  // namespace

double weighted_frobenius(const DenseMatrix& m, const Vector& w_dom,
                          const Vector& w_cod) {
  return frobenius_norm(to_orthonormal(m, w_dom, w_cod));
}

ModulusResult modulus(const WeightedOperator& a) {
  if (!a.matrix.all_finite())
    throw ValidationError("modulus: non-finite entries");
  const DenseMatrix at = to_orthonormal(a.matrix, a.w_dom, a.w_cod);
  const DenseMatrix gram = sym_part(matmul(transpose(at), at));
  const DenseMatrix mod_t = spd_sqrt(gram);

  // Partial isometry residual via the pseudoinverse of |A|.
  EigenDecomposition d = sym_eig(mod_t);
  double lam_max = 0.0;
  for (double l : d.eigenvalues) lam_max = std::max(lam_max, std::abs(l));
  const std::size_t n = mod_t.rows();
  DenseMatrix vs = d.eigenvectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double l = d.eigenvalues[j];
    const double inv = (l > 1e-12 * (lam_max + 1.0)) ? 1.0 / l : 0.0;
    for (std::size_t i = 0; i < n; ++i) vs(i, j) *= inv;
  }
  const DenseMatrix pinv = matmul(vs, transpose(d.eigenvectors));
  const DenseMatrix u = matmul(at, pinv);
  const double residual = frobenius_norm(sub(at, matmul(u, mod_t)));

  return {from_orthonormal(mod_t, a.w_dom, a.w_dom), residual};
}

CommutedSqrtPair commuted_sqrt(const WeightedOperator& a, double alpha_scale) {
  const DenseMatrix at = to_orthonormal(a.matrix, a.w_dom, a.w_cod);
  const DenseMatrix att = transpose(at);

  const DenseMatrix gram_dom = sym_part(matmul(att, at));   // A*A
  const DenseMatrix gram_cod = sym_part(matmul(at, att));   // AA*
  auto inv_sqrt_1p = [](double l) {
    return 1.0 / std::sqrt(1.0 + std::max(l, 0.0));
  };
  const DenseMatrix right_t = matmul(at, spectral_map(gram_dom, inv_sqrt_1p));
  const DenseMatrix left_t = matmul(spectral_map(gram_cod, inv_sqrt_1p), at);

  return {from_orthonormal(left_t, a.w_dom, a.w_cod),
          from_orthonormal(right_t, a.w_dom, a.w_cod), alpha_scale};
}

DenseMatrix resolvent_inverse_sqrt(const DenseMatrix& a, const Vector& w) {
  ++g_resolvent_sqrt_calls;
  const DenseMatrix at = to_orthonormal(a, w, w);
  double lam_min_bound = -1e-10 * (op_norm(at) + 1.0);
  EigenDecomposition d = sym_eig(sym_part(at));
  if (d.eigenvalues.front() < lam_min_bound)
    throw NotPsdError("resolvent_inverse_sqrt: operator not PSD");
  const DenseMatrix rt = spectral_map(sym_part(at), [](double l) {
    return 1.0 / std::sqrt(1.0 + std::max(l, 0.0));
  });
  return from_orthonormal(rt, w, w);
}

long resolvent_sqrt_call_count() { return g_resolvent_sqrt_calls.load(); }

DenseMatrix one_plus_sqrt(const DenseMatrix& a, const Vector& w) {
  ++g_resolvent_sqrt_calls;
  const DenseMatrix at = sym_part(to_orthonormal(a, w, w));
  const DenseMatrix rt = spectral_map(
      at, [](double l) { return std::sqrt(1.0 + std::max(l, 0.0)); });
  return from_orthonormal(rt, w, w);
}

double product_adjoint_check(const DenseMatrix& kappa,
                             const WeightedOperator& a) {
  const Vector& w_cod = a.w_cod;
  // kappa acts on the codomain space; require invertibility there.
  const DenseMatrix kt = to_orthonormal(kappa, w_cod, w_cod);
  EigenDecomposition d = sym_eig(sym_part(kt));
  double lam_max = 0.0;
  for (double l : d.eigenvalues) lam_max = std::max(lam_max, std::abs(l));
  double lam_min = lam_max;
  for (double l : d.eigenvalues) lam_min = std::min(lam_min, std::abs(l));
  if (lam_min <= 1e-12 * lam_max)
    throw SingularKappaError("product_adjoint_check: kappa singular");

  const DenseMatrix ka = matmul(kappa, a.matrix);
  const DenseMatrix lhs = weighted_adjoint(ka, a.w_dom, w_cod);
  const DenseMatrix kappa_adj = weighted_adjoint(kappa, w_cod, w_cod);
  const DenseMatrix rhs = matmul(a.adjoint(), kappa_adj);
  return frobenius_norm(sub(lhs, rhs));
}

DenseMatrix yosida_apply(const DenseMatrix& a, double eps) {
  if (a.rows() != a.cols()) throw NotSquareError("yosida_apply: not square");
  DenseMatrix m = scale(a, eps);
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0;
  return matmul(a, inverse(m));
}

}  // namespace evotherm
