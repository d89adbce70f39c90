#include "evotherm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evotherm {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(),
                     [](double x) { return std::isfinite(x); });
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols)
      throw ValidationError("sparse triplet index out of range");
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  for (const auto& t : triplets) {
    if (!triplets_.empty() && triplets_.back().row == t.row &&
        triplets_.back().col == t.col) {
      triplets_.back().value += t.value;
    } else {
      triplets_.push_back(t);
    }
  }
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix m(rows_, cols_);
  for (const auto& t : triplets_) m(t.row, t.col) += t.value;
  return m;
}

Vector SparseMatrix::matvec(const Vector& x) const {
  Vector y(rows_, 0.0);
  for (const auto& t : triplets_) y[t.row] += t.value * x[t.col];
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matmul: shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("add: shape mismatch");
  DenseMatrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("sub: shape mismatch");
  DenseMatrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

DenseMatrix scale(const DenseMatrix& m, double c) {
  DenseMatrix s = m;
  for (double& x : s.data()) x *= c;
  return s;
}

Vector matvec(const DenseMatrix& m, const Vector& x) {
  if (m.cols() != x.size()) throw ValidationError("apply: shape mismatch");
  Vector y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double frobenius_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

double max_abs(const DenseMatrix& m) {
  double s = 0.0;
  for (double x : m.data()) s = std::max(s, std::abs(x));
  return s;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

namespace {

void check_symmetric(const DenseMatrix& m) {
  if (m.rows() != m.cols())
    throw NotSquareError("sym_eig: matrix not square");
  double asym = 0.0, fro = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double d = m(i, j) - m(j, i);
      asym += d * d;
      fro += m(i, j) * m(i, j);
    }
  }
  if (fro == 0.0) return;
  if (std::sqrt(asym) / std::sqrt(fro) >= 1e-12)
    throw NotSymmetricError("sym_eig: matrix not symmetric");
}

void sort_ascending(EigenDecomposition& d) {
  const std::size_t n = d.eigenvalues.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return d.eigenvalues[a] < d.eigenvalues[b];
  });
  Vector ev(n);
  DenseMatrix v(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    ev[k] = d.eigenvalues[idx[k]];
    for (std::size_t i = 0; i < n; ++i) v(i, k) = d.eigenvectors(i, idx[k]);
  }
  d.eigenvalues = std::move(ev);
  d.eigenvectors = std::move(v);
}

// Cyclic Jacobi rotations; deterministic sweep order.
EigenDecomposition jacobi_eig(DenseMatrix a) {
  const std::size_t n = a.rows();
  DenseMatrix v = DenseMatrix::identity(n);
  double fro = frobenius_norm(a);
  if (fro == 0.0) {
    return {Vector(n, 0.0), v};
  }
  const double tol = 1e-15 * fro;
  const int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) < tol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const double aip = a(i, p), aiq = a(i, q);
            a(i, p) = aip - s * (aiq + tau * aip);
            a(p, i) = a(i, p);
            a(i, q) = aiq + s * (aip - tau * aiq);
            a(q, i) = a(i, q);
          }
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }
  if (sweep == max_sweeps)
    throw NoConvergenceError("sym_eig: Jacobi failed to converge", sweep);
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  EigenDecomposition d{std::move(ev), std::move(v)};
  sort_ascending(d);
  return d;
}

// Householder tridiagonalization followed by implicit-shift QL (EISPACK
// tred2/tql2 lineage), used for the large-matrix path.
EigenDecomposition ql_eig(DenseMatrix a) {
  const std::size_t n = a.rows();
  Vector d(n, 0.0), e(n, 0.0);
  DenseMatrix& z = a;

  // tred2
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t l = i - 1;
    double h = 0.0, scale_ = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale_ += std::abs(z(i, k));
      if (scale_ == 0.0) {
        e[i] = z(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z(i, k) /= scale_;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale_ * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            z(j, k) -= (f * e[k] + g * z(i, k));
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
        for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      z(j, i) = 0.0;
      z(i, j) = 0.0;
    }
  }

  // tql2
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (++iter == 50)
          throw NoConvergenceError("sym_eig: QL failed to converge", iter);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && m - l > 1) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  EigenDecomposition dec{std::move(d), std::move(z)};
  sort_ascending(dec);
  return dec;
}

}  // namespace

EigenDecomposition sym_eig(const DenseMatrix& m) {
  check_symmetric(m);
  DenseMatrix s = m;
  // Symmetrize exactly before iterating.
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double v = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  if (s.rows() <= 512) return jacobi_eig(std::move(s));
  return ql_eig(std::move(s));
}

DenseMatrix spd_sqrt(const DenseMatrix& m) {
  EigenDecomposition d = sym_eig(m);
  double lam_max = 0.0;
  for (double l : d.eigenvalues) lam_max = std::max(lam_max, std::abs(l));
  const double clamp = -1e-10 * lam_max;
  const std::size_t n = m.rows();
  Vector s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double l = d.eigenvalues[i];
    if (l < clamp)
      throw NotPsdError("spd_sqrt: matrix has a negative eigenvalue");
    s[i] = std::sqrt(std::max(l, 0.0));
  }
  // V diag(sqrt(lambda)) V^T, symmetrized on output.
  DenseMatrix vs = d.eigenvectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) vs(i, j) *= s[j];
  DenseMatrix r = matmul(vs, transpose(d.eigenvectors));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (r(i, j) + r(j, i));
      r(i, j) = v;
      r(j, i) = v;
    }
  return r;
}

LuFactorization::LuFactorization(const DenseMatrix& m) {
  if (m.rows() != m.cols())
    throw NotSquareError("LU: matrix not square");
  n_ = m.rows();
  lu_ = m;
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), 0);
  const double scale_ = max_abs(m);
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= 1e-14 * scale_)
      throw SingularError("solve_linear: pivot below threshold");
    if (piv != k) {
      for (std::size_t j = 0; j < n_; ++j)
        std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv_pivot = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double f = lu_(i, k) * inv_pivot;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Vector LuFactorization::solve(const Vector& b) const {
  if (b.size() != n_) throw ValidationError("solve: length mismatch");
  Vector x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t j = i + 1; j < n_; ++j) x[i] -= lu_(i, j) * x[j];
    x[i] /= lu_(i, i);
  }
  return x;
}

DenseMatrix LuFactorization::solve(const DenseMatrix& b) const {
  DenseMatrix x(b.rows(), b.cols());
  Vector col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    Vector y = solve(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = y[i];
  }
  return x;
}

Vector solve_linear(const DenseMatrix& m, const Vector& b) {
  return LuFactorization(m).solve(b);
}

DenseMatrix inverse(const DenseMatrix& m) {
  return LuFactorization(m).solve(DenseMatrix::identity(m.rows()));
}

double op_norm(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // Work with the smaller Gram matrix.
  const DenseMatrix mt = transpose(m);
  DenseMatrix g = (m.cols() <= m.rows()) ? matmul(mt, m) : matmul(m, mt);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = i + 1; j < g.cols(); ++j) {
      const double v = 0.5 * (g(i, j) + g(j, i));
      g(i, j) = v;
      g(j, i) = v;
    }
  EigenDecomposition d = sym_eig(g);
  const double lam = d.eigenvalues.back();
  return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

}  // namespace evotherm
