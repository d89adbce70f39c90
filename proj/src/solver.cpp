#include "evotherm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace evotherm {

void TimeAxis::validate() const {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(nu > 0.0)) throw ValidationError("nu must be positive");
  if (steps == 0) throw ValidationError("steps must be positive");
}

bool Trajectory::all_finite() const {
  for (const auto& s : states)
    for (double x : s)
      if (!std::isfinite(x)) return false;
  return true;
}

Trajectory solve(const BlockSystem& system, const SourceFn& source,
                 const TimeAxis& axis) {
  axis.validate();
  const std::size_t n = system.size();
  const double inv_dt = 1.0 / axis.dt;

  DenseMatrix step = add(scale(system.M0, inv_dt), add(system.M1, system.A));
  LuFactorization lu(step);

  Trajectory traj;
  traj.axis = axis;
  traj.weights = system.weights;
  traj.states.reserve(axis.steps);

  Vector u_prev(n, 0.0);
  double source_scale = 0.0;
  for (std::size_t k = 1; k <= axis.steps; ++k) {
    const double t = axis.time_at(k);
    Vector j = source(t);
    if (j.size() != n) throw ValidationError("source length mismatch");
    Vector m0u = matvec(system.M0, u_prev);
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = j[i] + inv_dt * m0u[i];
    Vector u = lu.solve(rhs);

    for (double x : j) source_scale = std::max(source_scale, std::abs(x));
    double u_max = 0.0;
    for (double x : u) u_max = std::max(u_max, std::abs(x));
    if (source_scale > 0.0 && u_max > 1e12 * source_scale)
      throw UnstableError("solve: state norm exceeds 1e12 x source scale");

    u_prev = u;
    traj.states.push_back(std::move(u));
  }
  return traj;
}

double weighted_norm(const Trajectory& traj) {
  double s = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t = traj.axis.time_at(k + 1);
    const double w_t = std::exp(-2.0 * traj.axis.nu * t) * traj.axis.dt;
    const Vector& u = traj.states[k];
    double sp = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      sp += traj.weights[i] * u[i] * u[i];
    s += w_t * sp;
  }
  return std::sqrt(s);
}

Trajectory causal_integral(const Trajectory& rates) {
  Trajectory out = rates;
  if (out.states.empty()) return out;
  Vector acc(out.states.front().size(), 0.0);
  for (auto& s : out.states) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      acc[i] += rates.axis.dt * s[i];
      s[i] = acc[i];
    }
  }
  return out;
}

double state_energy(const BlockSystem& system, const Vector& state) {
  const Vector m0u = matvec(system.M0, state);
  double s = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i)
    s += system.weights[i] * m0u[i] * state[i];
  return 0.5 * s;
}

Trajectory block_trajectory(const Trajectory& traj, const BlockSystem& system,
                            std::size_t block) {
  return blocks_trajectory(traj, system, {block});
}

Trajectory blocks_trajectory(const Trajectory& traj, const BlockSystem& system,
                             const std::vector<std::size_t>& blocks) {
  Trajectory out;
  out.axis = traj.axis;
  for (std::size_t b : blocks) {
    const auto& w = system.layout[b].second.weights;
    out.weights.insert(out.weights.end(), w.begin(), w.end());
  }
  out.states.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    Vector r;
    r.reserve(out.weights.size());
    for (std::size_t b : blocks)
      r.insert(r.end(), s.begin() + long(system.offsets[b]),
               s.begin() + long(system.offsets[b + 1]));
    out.states.push_back(std::move(r));
  }
  return out;
}

RecoveredFields recover_fields(const Trajectory& traj,
                               const BlockSystem& system) {
  const Grid& grid = system.grid;
  const MaterialData& mat = system.material;
  const FieldSpace st = make_space(FieldKind::SymTensorCell, grid);
  const FieldSpace ss = make_space(FieldKind::ScalarNode, grid);
  const FieldSpace sf = make_space(FieldKind::VectorFace, grid);

  const DenseMatrix grad = build_grad(grid).dense();
  const DenseMatrix div = build_div(grid).dense();
  const DenseMatrix kappa = mat.kappa_on(sf);
  DenseMatrix kappa_sqrt =
      from_orthonormal(spd_sqrt(to_orthonormal(kappa, sf.weights, sf.weights)),
                       sf.weights, sf.weights);
  const DenseMatrix C = mat.C_on(st);
  const DenseMatrix Cinv = inverse(C);
  const DenseMatrix gamma = mat.gamma_on(grid);
  const DenseMatrix gamma_adj = weighted_adjoint(gamma, ss.weights, st.weights);
  const Vector rho_s = mat.rho0_on(ss);

  // q and phi maps per variant.
  DenseMatrix q_map, q_theta_map, phi_theta, phi_q;
  bool phi_via_resolvent = false;
  DenseMatrix phi_matrix;  // 1 + L for the two_temperature inversion
  DenseMatrix sigma_map;

  if (system.variant == Variant::TwoTemperature ||
      system.variant == Variant::TwoStrain) {
    DenseMatrix ka = mat.alpha_matrix
                         ? matmul(from_orthonormal(
                                      spd_sqrt(to_orthonormal(*mat.alpha_matrix,
                                                              sf.weights,
                                                              sf.weights)),
                                      sf.weights, sf.weights),
                                  matmul(kappa,
                                         from_orthonormal(
                                             spd_sqrt(to_orthonormal(
                                                 *mat.alpha_matrix, sf.weights,
                                                 sf.weights)),
                                             sf.weights, sf.weights)))
                         : scale(kappa, mat.alpha);
    DenseMatrix ka_sqrt = from_orthonormal(
        spd_sqrt(to_orthonormal(ka, sf.weights, sf.weights)), sf.weights,
        sf.weights);
    const DenseMatrix f =
        scale(matmul(ka_sqrt, matmul(grad, matmul(div, ka_sqrt))), -1.0);
    q_map = scale(matmul(kappa_sqrt, resolvent_inverse_sqrt(f, sf.weights)),
                  mat.T0);
    phi_via_resolvent = true;
    phi_matrix = scale(matmul(div, matmul(ka, grad)), -1.0);
    for (std::size_t i = 0; i < phi_matrix.rows(); ++i) phi_matrix(i, i) += 1.0;
    if (system.variant == Variant::TwoStrain) {
      DenseMatrix c_sqrt = from_orthonormal(
          spd_sqrt(to_orthonormal(C, st.weights, st.weights)), st.weights,
          st.weights);
      const DenseMatrix cb = scale(C, *mat.beta);
      DenseMatrix cb_sqrt = from_orthonormal(
          spd_sqrt(to_orthonormal(cb, st.weights, st.weights)), st.weights,
          st.weights);
      const DenseMatrix Grad = build_Grad(grid).dense();
      const DenseMatrix Div = build_Div(grid).dense();
      const DenseMatrix ft =
          scale(matmul(cb_sqrt, matmul(Grad, matmul(Div, cb_sqrt))), -1.0);
      sigma_map = matmul(c_sqrt, resolvent_inverse_sqrt(ft, st.weights));
    }
  } else if (system.variant == Variant::Yosida) {
    const double eps = *mat.eps;
    const DenseMatrix d = matmul(kappa_sqrt, grad);
    const DenseMatrix d_adj = weighted_adjoint(d, ss.weights, sf.weights);
    DenseMatrix rf = scale(matmul(d, d_adj), eps * eps);
    for (std::size_t i = 0; i < rf.rows(); ++i) rf(i, i) += 1.0;
    DenseMatrix rn = scale(matmul(d_adj, d), eps * eps);
    for (std::size_t i = 0; i < rn.rows(); ++i) rn(i, i) += 1.0;
    const DenseMatrix inv_f = inverse(rf);
    const DenseMatrix inv_n = inverse(rn);
    // q = T0 sqrt(kappa) (1+eps^2 DD*)^{-1} (z - eps D theta)
    q_map = scale(matmul(kappa_sqrt, inv_f), mat.T0);
    q_theta_map = scale(matmul(q_map, d), -eps);
    // phi - T0 = (1+eps T0)(1+eps^2 D*D)^{-1} theta
    //            + eps (1+eps^2 D*D)^{-1} D* sqrt(kappa)^{-1} q / T0
    phi_theta = scale(inv_n, 1.0 + eps * mat.T0);
    phi_q = scale(matmul(inv_n, matmul(d_adj, inverse(kappa_sqrt))),
                  eps / mat.T0);
  } else {  // classical limit
    q_map = scale(kappa_sqrt, mat.T0);
  }

  const std::size_t steps = traj.states.size();
  auto make_traj = [&](const FieldSpace& sp) {
    Trajectory t;
    t.axis = traj.axis;
    t.weights = sp.weights;
    t.states.assign(steps, Vector(sp.dof_count, 0.0));
    return t;
  };

  RecoveredFields out;
  out.phi = make_traj(ss);
  out.q = make_traj(sf);
  out.eta = make_traj(ss);
  out.strain = make_traj(st);
  out.theta = make_traj(ss);
  out.sigma = make_traj(st);

  Trajectory v_traj = block_trajectory(traj, system, 0);
  out.displacement = causal_integral(v_traj);

  std::unique_ptr<LuFactorization> phi_lu;
  if (phi_via_resolvent) phi_lu = std::make_unique<LuFactorization>(phi_matrix);

  for (std::size_t k = 0; k < steps; ++k) {
    const Vector& u = traj.states[k];
    Vector second(u.begin() + long(system.offsets[1]),
                  u.begin() + long(system.offsets[2]));
    Vector theta(u.begin() + long(system.offsets[2]),
                 u.begin() + long(system.offsets[3]));
    Vector fourth(u.begin() + long(system.offsets[3]),
                  u.begin() + long(system.offsets[4]));

    Vector sigma = (system.variant == Variant::TwoStrain)
                       ? matvec(sigma_map, second)
                       : second;

    Vector q = matvec(q_map, fourth);
    if (system.variant == Variant::Yosida) {
      const Vector qt = matvec(q_theta_map, theta);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += qt[i];
    }

    Vector phi(theta.size(), 0.0);
    if (phi_via_resolvent) {
      phi = phi_lu->solve(theta);
    } else if (system.variant == Variant::Yosida) {
      phi = matvec(phi_theta, theta);
      const Vector pq = matvec(phi_q, q);
      for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += pq[i];
    } else {
      phi = theta;
    }
    for (double& x : phi) x += mat.T0;

    // strain and entropy from the constitutive laws
    Vector strain = matvec(Cinv, sigma);
    const Vector gt = matvec(matmul(Cinv, gamma), theta);
    for (std::size_t i = 0; i < strain.size(); ++i) strain[i] += gt[i];
    Vector eta = matvec(gamma_adj, strain);
    for (std::size_t i = 0; i < eta.size(); ++i)
      eta[i] = mat.lambda * theta[i] / mat.T0 + eta[i] / rho_s[i];

    out.theta.states[k] = std::move(theta);
    out.sigma.states[k] = std::move(sigma);
    out.q.states[k] = std::move(q);
    out.phi.states[k] = std::move(phi);
    out.strain.states[k] = std::move(strain);
    out.eta.states[k] = std::move(eta);
  }
  return out;
}

std::vector<double> final_relation_residual(const RecoveredFields& fields,
                                            const BlockSystem& system) {
  if (system.variant != Variant::Yosida)
    throw VariantMismatchError("final_relation_residual requires yosida fields");
  const double eps = *system.material.eps;
  const double t0 = system.material.T0;
  const double coef = 1.0 - eps * t0 / (1.0 + eps * t0);
  const DenseMatrix div = build_div(system.grid).dense();
  const FieldSpace ss = make_space(FieldKind::ScalarNode, system.grid);

  std::vector<double> out(fields.theta.states.size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Vector& theta = fields.theta.states[k];
    const Vector& phi = fields.phi.states[k];
    const Vector divq = matvec(div, fields.q.states[k]);
    Vector r(theta.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] = theta[i] - coef * (phi[i] - t0) - (eps / t0) * divq[i];
    out[k] = weighted_norm(r, ss.weights);
  }
  return out;
}

Trajectory original_form_oracle(const Grid& grid, const MaterialData& material,
                                const SourceFn& force_source,
                                const SourceFn& heat_source,
                                const TimeAxis& axis) {
  axis.validate();
  material.validate(Variant::TwoTemperature);
  if (material.alpha_matrix)
    throw ValidationError("oracle supports scalar alpha only");

  const FieldSpace sv = make_space(FieldKind::VectorNode, grid);
  const FieldSpace st = make_space(FieldKind::SymTensorCell, grid);
  const FieldSpace ss = make_space(FieldKind::ScalarNode, grid);
  const FieldSpace sf = make_space(FieldKind::VectorFace, grid);
  const std::size_t nv = sv.dof_count, nt = st.dof_count, ns = ss.dof_count,
                    nf = sf.dof_count;

  const DenseMatrix grad = build_grad(grid).dense();
  const DenseMatrix div = build_div(grid).dense();
  const DenseMatrix Grad = build_Grad(grid).dense();
  const DenseMatrix Div = build_Div(grid).dense();
  const DenseMatrix kappa = material.kappa_on(sf);
  const DenseMatrix C = material.C_on(st);
  const DenseMatrix Cinv = inverse(C);
  const DenseMatrix gamma = material.gamma_on(grid);
  const DenseMatrix gamma_adj =
      weighted_adjoint(gamma, ss.weights, st.weights);
  const Vector rho_v = material.rho0_on(sv);
  const Vector rho_s = material.rho0_on(ss);
  const double t0 = material.T0, alpha = material.alpha;
  const double inv_dt = 1.0 / axis.dt;

  const DenseMatrix cig = matmul(Cinv, gamma);
  const DenseMatrix gci = matmul(gamma_adj, Cinv);
  DenseMatrix h = matmul(gamma_adj, cig);
  for (std::size_t i = 0; i < ns; ++i) h(i, i) += rho_s[i] * material.lambda / t0;

  // Unknowns per step: (v, sigma, theta, q, psi) with psi = phi - T0.
  const std::size_t n = nv + nt + ns + nf + ns;
  const std::size_t ov = 0, ot = nv, os = nv + nt, oq = nv + nt + ns,
                    op = nv + nt + ns + nf;
  DenseMatrix m(n, n);
  auto put = [&](std::size_t r0, std::size_t c0, const DenseMatrix& b,
                 double f) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) m(r0 + i, c0 + j) += f * b(i, j);
  };
  // momentum rows
  for (std::size_t i = 0; i < nv; ++i) m(ov + i, ov + i) = rho_v[i] * inv_dt;
  put(ov, ot, Div, -1.0);
  // stress-strain rows (time differentiated)
  put(ot, ot, Cinv, inv_dt);
  put(ot, os, cig, inv_dt);
  put(ot, ov, Grad, -1.0);
  // heat equation rows
  put(os, ot, gci, inv_dt);
  put(os, os, h, inv_dt);
  put(os, oq, div, 1.0 / t0);
  // Fourier law rows: q + kappa grad psi = 0
  for (std::size_t i = 0; i < nf; ++i) m(oq + i, oq + i) = 1.0;
  put(oq, op, matmul(kappa, grad), 1.0);
  // two-temperature relation rows: theta - psi - alpha div q = 0
  for (std::size_t i = 0; i < ns; ++i) {
    m(op + i, os + i) = 1.0;
    m(op + i, op + i) = -1.0;
  }
  put(op, oq, div, -alpha);

  LuFactorization lu(m);

  Trajectory out;
  out.axis = axis;
  out.weights.insert(out.weights.end(), sv.weights.begin(), sv.weights.end());
  out.weights.insert(out.weights.end(), st.weights.begin(), st.weights.end());
  out.weights.insert(out.weights.end(), ss.weights.begin(), ss.weights.end());

  Vector v(nv, 0.0), sigma(nt, 0.0), theta(ns, 0.0);
  for (std::size_t k = 1; k <= axis.steps; ++k) {
    const double t = axis.time_at(k);
    const Vector f_src = force_source(t);
    const Vector q_src = heat_source(t);
    if (f_src.size() != nv || q_src.size() != ns)
      throw ValidationError("oracle source length mismatch");

    Vector rhs(n, 0.0);
    for (std::size_t i = 0; i < nv; ++i)
      rhs[ov + i] = rho_v[i] * f_src[i] + rho_v[i] * inv_dt * v[i];
    {
      Vector a = matvec(Cinv, sigma);
      Vector b = matvec(cig, theta);
      for (std::size_t i = 0; i < nt; ++i)
        rhs[ot + i] = inv_dt * (a[i] + b[i]);
    }
    {
      Vector a = matvec(gci, sigma);
      Vector b = matvec(h, theta);
      for (std::size_t i = 0; i < ns; ++i)
        rhs[os + i] = rho_s[i] * q_src[i] / t0 + inv_dt * (a[i] + b[i]);
    }

    const Vector x = lu.solve(rhs);
    v.assign(x.begin() + long(ov), x.begin() + long(ov + nv));
    sigma.assign(x.begin() + long(ot), x.begin() + long(ot + nt));
    theta.assign(x.begin() + long(os), x.begin() + long(os + ns));

    Vector state;
    state.reserve(nv + nt + ns);
    state.insert(state.end(), v.begin(), v.end());
    state.insert(state.end(), sigma.begin(), sigma.end());
    state.insert(state.end(), theta.begin(), theta.end());
    out.states.push_back(std::move(state));
  }
  return out;
}

}  // namespace evotherm
