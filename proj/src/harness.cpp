#include "evotherm/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace evotherm {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

double traj_norm(const std::vector<Vector>& states, const TimeAxis& axis,
                 const Vector& w) {
  Trajectory t;
  t.axis = axis;
  t.states = states;
  t.weights = w;
  return weighted_norm(t);
}

/// Weighted space-time norm of the difference of two trajectories that
/// share a time axis and weights.
double deviation_norm(const Trajectory& a, const Trajectory& b) {
  double acc = 0.0;
  for (std::size_t n = 0; n < a.states.size(); ++n) {
    const double t = a.axis.t_start + double(n + 1) * a.axis.dt;
    double s = 0.0;
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
      const double d = a.states[n][i] - b.states[n][i];
      s += a.weights[i] * d * d;
    }
    acc += std::exp(-2.0 * a.axis.nu * t) * a.axis.dt * s;
  }
  return std::sqrt(acc);
}

std::size_t study_threads() {
  if (const char* env = std::getenv("EVOTHERM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return std::size_t(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? std::min<std::size_t>(hw, 4) : 1;
}

/// Run jobs[i]() for all i on up to `workers` threads.
void fan_out(std::vector<std::function<void()>>& jobs, std::size_t workers) {
  workers = std::min(workers, jobs.size());
  if (workers <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < jobs.size();
           i = next.fetch_add(1))
        jobs[i]();
    });
  for (auto& th : pool) th.join();
}

void append_equation_items(VerificationReport& rep, const Scenario& scenario,
                           const BlockSystem& system, const Trajectory& traj) {
  const RecoveredFields fields = recover_fields(traj, system);
  const Grid& grid = system.grid;
  const MaterialData& mat = system.material;
  const DiscreteOperator grad = build_grad(grid);
  const DiscreteOperator div = build_div(grid);
  const DenseMatrix gradd = grad.dense();
  const DenseMatrix divd = div.dense();
  const FieldSpace ss = make_space(FieldKind::ScalarNode, grid);
  const FieldSpace sf = make_space(FieldKind::VectorFace, grid);

  const double theta_scale = weighted_norm(fields.theta);
  const double q_scale = weighted_norm(fields.q);
  const double scale = 1.0 + theta_scale + q_scale;

  const std::size_t steps = traj.states.size();
  const Variant v = system.variant;

  if (v == Variant::TwoTemperature || v == Variant::Yosida ||
      v == Variant::ClassicalLimit) {
    // Fourier law: q + kappa grad (phi - T0).
    std::vector<Vector> res(steps);
    for (std::size_t n = 0; n < steps; ++n) {
      Vector psi = fields.phi.states[n];
      for (double& x : psi) x -= mat.T0;
      Vector g = matvec(gradd, psi);
      Vector r = fields.q.states[n];
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += mat.kappa * g[i];
      res[n] = std::move(r);
    }
    const double value = traj_norm(res, traj.axis, sf.weights) / scale;
    rep.items.push_back({"fourier_residual", value, 1e-8, value < 1e-8});
  }

  if (v == Variant::TwoTemperature) {
    // Two-temperature relation: theta - (phi - T0) - alpha div q.
    std::vector<Vector> res(steps);
    for (std::size_t n = 0; n < steps; ++n) {
      Vector dq = matvec(divd, fields.q.states[n]);
      Vector r = fields.theta.states[n];
      for (std::size_t i = 0; i < r.size(); ++i)
        r[i] += -(fields.phi.states[n][i] - mat.T0) - mat.alpha * dq[i];
      res[n] = std::move(r);
    }
    const double value = traj_norm(res, traj.axis, ss.weights) / scale;
    rep.items.push_back({"eq2_residual", value, 1e-8, value < 1e-8});
  }

  if (v == Variant::Yosida) {
    const std::vector<double> per_step = final_relation_residual(fields, system);
    double acc = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
      const double t = traj.axis.t_start + double(n + 1) * traj.axis.dt;
      acc += std::exp(-2.0 * traj.axis.nu * t) * traj.axis.dt *
             per_step[n] * per_step[n];
    }
    const double value = std::sqrt(acc) / scale;
    rep.items.push_back({"final_relation_residual", value, 1e-7, value < 1e-7});
  }

  const double finite = traj.all_finite() ? 1.0 : 0.0;
  rep.items.push_back({"trajectory_finite", finite, 1.0, finite >= 1.0});
  (void)scenario;
}

}  // namespace

bool VerificationReport::all_pass() const {
  for (const auto& it : items)
    if (!it.pass) return false;
  return true;
}

std::string VerificationReport::to_json() const {
  std::ostringstream os;
  os << "{\n  \"scenario\": \"" << json_escape(scenario) << "\",\n";
  os << "  \"certificate\": {\n";
  os << "    \"c_range\": " << fmt17(certificate.c_range) << ",\n";
  os << "    \"c_kernel\": " << fmt17(certificate.c_kernel) << ",\n";
  os << "    \"skew_residual\": " << fmt17(certificate.skew_residual) << ",\n";
  os << "    \"nu0_estimate\": " << fmt17(certificate.nu0_estimate) << ",\n";
  os << "    \"valid\": " << (certificate.valid() ? "true" : "false") << "\n";
  os << "  },\n  \"items\": [\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    os << "    {\"item\": \"" << json_escape(it.item)
       << "\", \"value\": " << fmt17(it.value)
       << ", \"threshold\": " << fmt17(it.threshold)
       << ", \"pass\": " << (it.pass ? "true" : "false") << "}"
       << (i + 1 < items.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"all_pass\": " << (all_pass() ? "true" : "false") << "\n}\n";
  return os.str();
}

VerificationReport build_static_report(const Scenario& scenario,
                                       const BlockSystem& system) {
  VerificationReport rep;
  rep.scenario = scenario.name;
  rep.certificate = check_wellposedness(system);

  rep.items.push_back({"certificate.c_range", rep.certificate.c_range, 0.0,
                       rep.certificate.c_range > 0.0});
  rep.items.push_back({"certificate.c_kernel", rep.certificate.c_kernel, 0.0,
                       rep.certificate.c_kernel > 0.0});
  rep.items.push_back({"certificate.skew_residual",
                       rep.certificate.skew_residual, 1e-12,
                       rep.certificate.skew_residual < 1e-12});

  const Grid& grid = system.grid;
  const MaterialData& mat = system.material;
  const DiscreteOperator grad = build_grad(grid);
  const DiscreteOperator div = build_div(grid);
  const DiscreteOperator Grad = build_Grad(grid);
  const DiscreteOperator Div = build_Div(grid);

  {
    // Commuted square roots for A = sqrt(alpha kappa) grad.
    WeightedOperator a = WeightedOperator::from(grad);
    a.matrix = scale(a.matrix, std::sqrt(mat.alpha * mat.kappa));
    const CommutedSqrtPair pair = commuted_sqrt(a);
    const double value = frobenius_norm(sub(pair.left, pair.right));
    const double thr = 1e-10 * (1.0 + frobenius_norm(a.matrix));
    rep.items.push_back({"commutation_residual", value, thr, value <= thr});
    const double cn = weighted_op_norm(pair.right, a.w_dom, a.w_cod);
    rep.items.push_back({"contraction_norm", cn, 1.0 + 1e-10,
                         cn <= 1.0 + 1e-10});
  }
  {
    const FieldSpace sf = make_space(FieldKind::VectorFace, grid);
    const DenseMatrix kap = mat.kappa_on(sf);
    const double value = product_adjoint_check(kap, WeightedOperator::from(grad));
    rep.items.push_back({"product_adjoint_residual", value, 1e-12,
                         value <= 1e-12});
  }
  {
    const double gd = frobenius_norm(add(div.dense(), weighted_adjoint(grad)));
    rep.items.push_back({"adjoint_grad_div", gd, 1e-13, gd <= 1e-13});
    const double GD = frobenius_norm(add(Div.dense(), weighted_adjoint(Grad)));
    rep.items.push_back({"adjoint_Grad_Div", GD, 1e-13, GD <= 1e-13});
  }

  if (system.variant != Variant::TwoStrain) {
    GaussTransform gt = gauss_transform(system);
    DenseMatrix expected(system.size(), system.size());
    const FieldSpace sv = make_space(FieldKind::VectorNode, grid);
    const FieldSpace st = make_space(FieldKind::SymTensorCell, grid);
    const FieldSpace ss = make_space(FieldKind::ScalarNode, grid);
    const Vector rho_v = mat.rho0_on(sv);
    const Vector rho_s = mat.rho0_on(ss);
    for (std::size_t i = 0; i < rho_v.size(); ++i)
      expected(system.offsets[0] + i, system.offsets[0] + i) = rho_v[i];
    const DenseMatrix cinv = inverse(mat.C_on(st));
    for (std::size_t i = 0; i < st.dof_count; ++i)
      for (std::size_t j = 0; j < st.dof_count; ++j)
        expected(system.offsets[1] + i, system.offsets[1] + j) = cinv(i, j);
    for (std::size_t i = 0; i < rho_s.size(); ++i)
      expected(system.offsets[2] + i, system.offsets[2] + i) =
          rho_s[i] * mat.lambda / mat.T0;
    const double value = max_abs(sub(gt.reduced, expected));
    rep.items.push_back({"gauss_reduction_residual", value, 1e-12,
                         value <= 1e-12});
  }

  if (system.variant == Variant::TwoTemperature) {
    const FieldSpace ss = make_space(FieldKind::ScalarNode, grid);
    const FieldSpace sf = make_space(FieldKind::VectorFace, grid);
    const DenseMatrix m132 = coupling_block_m132(grid, mat);
    const double value = weighted_op_norm(m132, ss.weights, sf.weights);
    const double thr = 1.0 / std::sqrt(mat.alpha) + 1e-9;
    rep.items.push_back({"coupling_norm_bound", value, thr, value <= thr});
  }
  return rep;
}

VerificationReport build_report(const Scenario& scenario,
                                const BlockSystem& system,
                                const Trajectory& traj) {
  VerificationReport rep = build_static_report(scenario, system);
  append_equation_items(rep, scenario, system, traj);
  return rep;
}

std::string trajectory_csv(const Trajectory& traj, const BlockSystem& system,
                           const std::vector<std::string>& fields) {
  std::vector<std::size_t> blocks;
  if (fields.empty()) {
    for (std::size_t b = 0; b < system.layout.size(); ++b) blocks.push_back(b);
  } else {
    for (const auto& f : fields) blocks.push_back(system.block_index(f));
  }
  std::ostringstream os;
  os << "step,time,field,component_index,value\n";
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const double t = traj.axis.time_at(n + 1);
    for (std::size_t b : blocks) {
      const auto& [name, space] = system.layout[b];
      const std::size_t off = system.offsets[b];
      for (std::size_t i = 0; i < space.dof_count; ++i)
        os << (n + 1) << ',' << fmt17(t) << ',' << name << ',' << i << ','
           << fmt17(traj.states[n][off + i]) << '\n';
    }
  }
  return os.str();
}

std::string recovered_csv(const RecoveredFields& fields,
                          const BlockSystem& system) {
  std::ostringstream os;
  os << "step,time,field,component_index,value\n";
  const std::vector<std::pair<std::string, const Trajectory*>> named = {
      {"phi", &fields.phi},       {"q", &fields.q},
      {"eta", &fields.eta},       {"strain", &fields.strain},
      {"displacement", &fields.displacement},
      {"theta", &fields.theta},
      {"sigma", system.variant == Variant::TwoStrain ? &fields.sigma : nullptr}};
  const std::size_t steps = fields.theta.states.size();
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = fields.theta.axis.time_at(n + 1);
    for (const auto& [name, tr] : named) {
      if (!tr || tr->states.empty()) continue;
      const Vector& st = tr->states[n];
      for (std::size_t i = 0; i < st.size(); ++i)
        os << (n + 1) << ',' << fmt17(t) << ',' << name << ',' << i << ','
           << fmt17(st[i]) << '\n';
    }
  }
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

int run_scenario(const Scenario& scenario, const std::string& out_dir,
                 bool dry_run) {
  const BlockSystem system =
      assemble(scenario.variant, scenario.grid, scenario.material);
  std::filesystem::create_directories(out_dir);
  if (dry_run) {
    const VerificationReport rep = build_static_report(scenario, system);
    write_file(std::filesystem::path(out_dir) / "report.json", rep.to_json());
    return rep.all_pass() ? 0 : 2;
  }
  const VerificationReport static_rep = build_static_report(scenario, system);
  if (!static_rep.certificate.valid()) {
    write_file(std::filesystem::path(out_dir) / "report.json",
               static_rep.to_json());
    return 2;
  }
  const SourceFn source = build_source(system, scenario.sources);
  const Trajectory traj = solve(system, source, scenario.time);
  const RecoveredFields fields = recover_fields(traj, system);
  const VerificationReport rep = build_report(scenario, system, traj);
  write_file(std::filesystem::path(out_dir) / "trajectory.csv",
             trajectory_csv(traj, system, scenario.output_fields));
  write_file(std::filesystem::path(out_dir) / "recovered.csv",
             recovered_csv(fields, system));
  write_file(std::filesystem::path(out_dir) / "report.json", rep.to_json());
  return rep.all_pass() ? 0 : 2;
}

int verify_scenario(const Scenario& scenario) {
  const BlockSystem system =
      assemble(scenario.variant, scenario.grid, scenario.material);
  const VerificationReport static_rep = build_static_report(scenario, system);
  if (!static_rep.certificate.valid()) {
    std::cout << static_rep.to_json();
    return 2;
  }
  const SourceFn source = build_source(system, scenario.sources);
  const Trajectory traj = solve(system, source, scenario.time);
  const VerificationReport rep = build_report(scenario, system, traj);
  std::cout << rep.to_json();
  return rep.all_pass() ? 0 : 2;
}

std::string StudyResult::to_csv() const {
  std::ostringstream os;
  os << "label,deviation,ratio,warning\n";
  for (const auto& r : rows)
    os << r.label << ',' << fmt17(r.deviation) << ',' << fmt17(r.ratio) << ','
       << r.warning << '\n';
  return os.str();
}

StudyResult run_study(const std::string& kind, const Scenario& scenario,
                      std::vector<double> values) {
  StudyResult result;
  result.kind = kind;

  if (kind != "model_compare") {
    if (values.empty()) throw ValidationError("study requires sweep values");
    for (double v : values)
      if (!(v > 0.0)) throw ValidationError("sweep values must be positive");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] >= values[i - 1])
        throw ValidationError("sweep values must be sorted descending");
  }

  if (kind == "alpha_limit" || kind == "eps_limit") {
    MaterialData ref_mat = scenario.material;
    const BlockSystem ref_sys =
        assemble(Variant::ClassicalLimit, scenario.grid, ref_mat);
    const Trajectory ref =
        solve(ref_sys, build_source(ref_sys, scenario.sources), scenario.time);
    const Trajectory ref_vt = blocks_trajectory(ref, ref_sys, {0, 2});

    std::vector<double> devs(values.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < values.size(); ++i) {
      jobs.emplace_back([&, i] {
        MaterialData m = scenario.material;
        Variant var;
        if (kind == "alpha_limit") {
          m.alpha = values[i];
          var = Variant::TwoTemperature;
        } else {
          m.eps = values[i];
          var = Variant::Yosida;
        }
        const BlockSystem sys = assemble(var, scenario.grid, m);
        const Trajectory tr =
            solve(sys, build_source(sys, scenario.sources), scenario.time);
        devs[i] = deviation_norm(blocks_trajectory(tr, sys, {0, 2}), ref_vt);
      });
    }
    fan_out(jobs, study_threads());

    for (std::size_t i = 0; i < values.size(); ++i) {
      StudyRow row;
      row.label = fmt17(values[i]);
      row.deviation = devs[i];
      row.ratio = (i == 0 || devs[i] == 0.0) ? 0.0 : devs[i - 1] / devs[i];
      if (i > 0 && devs[i] > devs[i - 1]) {
        row.warning = "non-monotone";
        result.monotone_warning = true;
      }
      result.rows.push_back(std::move(row));
    }
    return result;
  }

  if (kind == "dt_refine") {
    const double horizon = scenario.time.dt * double(scenario.time.steps);
    const double dt_ref = values.back() / 8.0;
    TimeAxis ref_axis = scenario.time;
    ref_axis.dt = dt_ref;
    ref_axis.steps = std::size_t(std::llround(horizon / dt_ref));
    const BlockSystem sys =
        assemble(scenario.variant, scenario.grid, scenario.material);
    const SourceFn source = build_source(sys, scenario.sources);
    const Trajectory ref = solve(sys, source, ref_axis);

    std::vector<double> devs(values.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < values.size(); ++i) {
      jobs.emplace_back([&, i] {
        TimeAxis axis = scenario.time;
        axis.dt = values[i];
        axis.steps = std::size_t(std::llround(horizon / values[i]));
        const std::size_t stride = std::size_t(std::llround(values[i] / dt_ref));
        const Trajectory tr = solve(sys, source, axis);
        double acc = 0.0;
        for (std::size_t n = 0; n < tr.states.size(); ++n) {
          const std::size_t rn = (n + 1) * stride - 1;
          if (rn >= ref.states.size()) break;
          const double t = axis.t_start + double(n + 1) * axis.dt;
          double s = 0.0;
          for (std::size_t k = 0; k < tr.weights.size(); ++k) {
            const double d = tr.states[n][k] - ref.states[rn][k];
            s += tr.weights[k] * d * d;
          }
          acc += std::exp(-2.0 * axis.nu * t) * axis.dt * s;
        }
        devs[i] = std::sqrt(acc);
      });
    }
    fan_out(jobs, study_threads());

    for (std::size_t i = 0; i < values.size(); ++i) {
      StudyRow row;
      row.label = fmt17(values[i]);
      row.deviation = devs[i];
      row.ratio = (i == 0 || devs[i] == 0.0) ? 0.0 : devs[i - 1] / devs[i];
      result.rows.push_back(std::move(row));
    }
    return result;
  }

  if (kind == "model_compare") {
    const BlockSystem ref_sys =
        assemble(Variant::TwoTemperature, scenario.grid, scenario.material);
    const Trajectory ref =
        solve(ref_sys, build_source(ref_sys, scenario.sources), scenario.time);
    const Trajectory ref_vt = blocks_trajectory(ref, ref_sys, {0, 2});

    const std::vector<Variant> others = {Variant::TwoStrain, Variant::Yosida,
                                         Variant::ClassicalLimit};
    MaterialData mat = scenario.material;
    if (!mat.beta) mat.beta = default_material().beta;
    if (!mat.eps) mat.eps = default_material().eps;
    std::vector<double> devs(others.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < others.size(); ++i) {
      jobs.emplace_back([&, i] {
        const BlockSystem sys = assemble(others[i], scenario.grid, mat);
        const Trajectory tr =
            solve(sys, build_source(sys, scenario.sources), scenario.time);
        devs[i] = deviation_norm(blocks_trajectory(tr, sys, {0, 2}), ref_vt);
      });
    }
    fan_out(jobs, study_threads());

    for (std::size_t i = 0; i < others.size(); ++i) {
      StudyRow row;
      row.label = variant_name(others[i]);
      row.deviation = devs[i];
      result.rows.push_back(std::move(row));
    }
    return result;
  }

  throw ValidationError("unknown study kind: " + kind);
}

}  // namespace evotherm
