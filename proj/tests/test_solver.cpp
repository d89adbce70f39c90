#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "evotherm/scenario.hpp"

using namespace evotherm;

namespace {

Grid grid_1d(std::size_t n) { return Grid{1, {n}, {1.0}}; }

SourceSpec heat_pulse(double onset = 0.0, double duration = 0.2) {
  SourceSpec s;
  s.field = "Q";
  s.profile = SourceSpec::Profile::GaussianPulse;
  s.amplitude = 1.0;
  s.center = {0.5};
  s.width = 0.1;
  s.onset = onset;
  s.duration = duration;
  return s;
}

SourceSpec force_pulse() {
  SourceSpec s = heat_pulse();
  s.field = "F";
  return s;
}

TimeAxis axis(std::size_t steps, double dt = 1e-3, double nu = 1.0) {
  TimeAxis a;
  a.dt = dt;
  a.steps = steps;
  a.nu = nu;
  return a;
}

}  // namespace

TEST_CASE("time axis validation") {
  CHECK_THROWS_AS(axis(0).validate(), ValidationError);
  CHECK_THROWS_AS(axis(10, -1e-3).validate(), ValidationError);
  CHECK_THROWS_AS(axis(10, 1e-3, 0.0).validate(), ValidationError);
  CHECK_NOTHROW(axis(10).validate());
}

TEST_CASE("zero source yields the zero trajectory exactly") {
  const BlockSystem s =
      assemble(Variant::TwoTemperature, grid_1d(8), default_material());
  const Trajectory traj =
      solve(s, [&](double) { return Vector(s.size(), 0.0); }, axis(50));
  for (const auto& u : traj.states)
    for (double x : u) CHECK(x == 0.0);
}

TEST_CASE("causality: states before the source onset are bit-exact zero") {
  const BlockSystem s =
      assemble(Variant::TwoTemperature, grid_1d(12), default_material());
  const SourceFn src = build_source(s, {heat_pulse(0.5, 0.2)});
  const TimeAxis a = axis(1000);
  const Trajectory traj = solve(s, src, a);
  bool nonzero_after = false;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t = a.time_at(k + 1);
    if (t < 0.5) {
      for (double x : traj.states[k]) CHECK(x == 0.0);
    } else {
      for (double x : traj.states[k]) nonzero_after |= (x != 0.0);
    }
  }
  CHECK(nonzero_after);
}

TEST_CASE("nu-independence: the trajectory is bit-identical for nu=1 and nu=3") {
  const BlockSystem s =
      assemble(Variant::TwoTemperature, grid_1d(12), default_material());
  const SourceFn src = build_source(s, {heat_pulse()});
  const Trajectory t1 = solve(s, src, axis(300, 1e-3, 1.0));
  const Trajectory t3 = solve(s, src, axis(300, 1e-3, 3.0));
  REQUIRE(t1.states.size() == t3.states.size());
  for (std::size_t k = 0; k < t1.states.size(); ++k)
    for (std::size_t i = 0; i < t1.states[k].size(); ++i)
      CHECK(t1.states[k][i] == t3.states[k][i]);
  // The weighted norms do differ.
  CHECK(weighted_norm(t1) != weighted_norm(t3));
}

TEST_CASE("determinism: repeated solves are bit-identical") {
  const BlockSystem s =
      assemble(Variant::Yosida, grid_1d(10), default_material());
  const SourceFn src = build_source(s, {heat_pulse(), force_pulse()});
  const Trajectory a = solve(s, src, axis(200));
  const Trajectory b = solve(s, src, axis(200));
  for (std::size_t k = 0; k < a.states.size(); ++k)
    for (std::size_t i = 0; i < a.states[k].size(); ++i)
      CHECK(a.states[k][i] == b.states[k][i]);
}

TEST_CASE("energy is non-increasing once the source switches off") {
  const MaterialData m = default_material();
  for (Variant v : {Variant::TwoTemperature, Variant::TwoStrain,
                    Variant::Yosida, Variant::ClassicalLimit}) {
    const BlockSystem s = assemble(v, grid_1d(10), m);
    const SourceFn src = build_source(s, {heat_pulse(0.0, 0.2), force_pulse()});
    const TimeAxis a = axis(600);
    const Trajectory traj = solve(s, src, a);
    double prev = -1.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const double t = a.time_at(k + 1);
      const double e = state_energy(s, traj.states[k]);
      if (t > 0.2 + a.dt) {
        CHECK(e <= prev + 1e-9 * (1.0 + prev));
      }
      prev = e;
    }
  }
}

TEST_CASE("weighted norm matches the closed-form integral for a constant state") {
  Trajectory t;
  t.axis = axis(1000, 1e-3, 1.0);
  t.weights = Vector(1, 1.0);
  t.states.assign(1000, Vector(1, 1.0));
  const double exact = std::sqrt((1.0 - std::exp(-2.0)) / 2.0);
  CHECK(weighted_norm(t) == doctest::Approx(exact).epsilon(1e-2));

  // Homogeneity.
  Trajectory t2 = t;
  for (auto& s : t2.states) s[0] *= 2.0;
  CHECK(weighted_norm(t2) ==
        doctest::Approx(2.0 * weighted_norm(t)).epsilon(1e-12));
}

TEST_CASE("causal integral telescopes a constant rate into time") {
  Trajectory r;
  r.axis = axis(100, 1e-2);
  r.weights = Vector(1, 1.0);
  r.states.assign(100, Vector(1, 1.0));
  const Trajectory u = causal_integral(r);
  for (std::size_t k = 0; k < u.states.size(); ++k)
    CHECK(u.states[k][0] ==
          doctest::Approx(r.axis.time_at(k + 1)).epsilon(1e-12));

  const Trajectory z = causal_integral(Trajectory{r.axis, {}, {}});
  CHECK(z.states.empty());
}

TEST_CASE("discrete antiderivative norm bound, Monte-Carlo") {
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double nu = 2.0, dt = 1e-3;
  const double bound = (1.0 / nu) * (1.0 + 5.0 * nu * dt);
  for (int trial = 0; trial < 100; ++trial) {
    Trajectory f;
    f.axis = axis(400, dt, nu);
    f.weights = Vector(3, 0.5);
    f.states.assign(400, Vector(3, 0.0));
    for (auto& s : f.states)
      for (double& x : s) x = dist(rng);
    const double nf = weighted_norm(f);
    const double ni = weighted_norm(causal_integral(f));
    CHECK(ni <= bound * nf);
    CHECK(ni <= 0.51 * nf);
  }
}

TEST_CASE("unstable growth is detected") {
  BlockSystem s;
  s.variant = Variant::TwoTemperature;
  s.grid = grid_1d(2);
  s.material = default_material();
  const FieldSpace sp = make_space(FieldKind::ScalarNode, s.grid);
  s.layout = {{"u", sp}};
  s.offsets = {0, 1};
  s.weights = Vector(1, 1.0);
  s.M0 = DenseMatrix::identity(1);
  s.M1 = scale(DenseMatrix::identity(1), -5.0);  // anti-dissipative
  s.A = DenseMatrix(1, 1);
  const SourceFn src = [](double t) {
    return Vector(1, t <= 1e-3 ? 1.0 : 0.0);
  };
  CHECK_THROWS_AS(solve(s, src, axis(8000)), UnstableError);
}

TEST_CASE("oracle equivalence on a 12-cell two_temperature scenario") {
  const Grid g = grid_1d(12);
  MaterialData m = default_material();
  m.gamma = 0.2;
  const BlockSystem s = assemble(Variant::TwoTemperature, g, m);
  const std::vector<SourceSpec> specs = {heat_pulse(), force_pulse()};
  const TimeAxis a = axis(200);
  const Trajectory traj = solve(s, build_source(s, specs), a);
  const Trajectory oracle = original_form_oracle(
      g, m, build_force_source(g, specs), build_heat_source(g, specs), a);
  const Trajectory mine = blocks_trajectory(traj, s, {0, 1, 2});
  REQUIRE(mine.states.size() == oracle.states.size());
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < mine.states.size(); ++k) {
    const double wt = std::exp(-2.0 * a.nu * a.time_at(k + 1)) * a.dt;
    for (std::size_t i = 0; i < mine.weights.size(); ++i) {
      const double d = mine.states[k][i] - oracle.states[k][i];
      num += wt * mine.weights[i] * d * d;
      den += wt * mine.weights[i] * mine.states[k][i] * mine.states[k][i];
    }
  }
  CHECK(std::sqrt(num) <= 1e-7 * std::sqrt(den));
}

TEST_CASE("gamma = 0 decouples the elastic part exactly") {
  const Grid g = grid_1d(10);
  MaterialData m = default_material();
  m.gamma = 0.0;
  const BlockSystem s = assemble(Variant::TwoTemperature, g, m);
  const std::vector<SourceSpec> specs = {force_pulse()};
  const TimeAxis a = axis(300);
  const Trajectory full = solve(s, build_source(s, specs), a);

  // Standalone elastic wave system (v, sigma).
  BlockSystem el;
  el.variant = Variant::TwoTemperature;
  el.grid = g;
  el.material = m;
  const FieldSpace sv = make_space(FieldKind::VectorNode, g);
  const FieldSpace st = make_space(FieldKind::SymTensorCell, g);
  el.layout = {{"v", sv}, {"sigma", st}};
  el.offsets = {0, sv.dof_count, sv.dof_count + st.dof_count};
  el.weights = sv.weights;
  el.weights.insert(el.weights.end(), st.weights.begin(), st.weights.end());
  const std::size_t n = el.offsets.back();
  el.M0 = DenseMatrix(n, n);
  const Vector rho = m.rho0_on(sv);
  for (std::size_t i = 0; i < sv.dof_count; ++i) el.M0(i, i) = rho[i];
  for (std::size_t i = 0; i < st.dof_count; ++i)
    el.M0(sv.dof_count + i, sv.dof_count + i) = 1.0 / m.c_elast;
  el.M1 = DenseMatrix(n, n);
  el.A = DenseMatrix(n, n);
  const DenseMatrix Grad = build_Grad(g).dense();
  const DenseMatrix Div = build_Div(g).dense();
  for (std::size_t i = 0; i < sv.dof_count; ++i)
    for (std::size_t j = 0; j < st.dof_count; ++j)
      el.A(i, sv.dof_count + j) = -Div(i, j);
  for (std::size_t i = 0; i < st.dof_count; ++i)
    for (std::size_t j = 0; j < sv.dof_count; ++j)
      el.A(sv.dof_count + i, j) = -Grad(i, j);

  const SourceFn fsrc = build_force_source(g, specs);
  const Trajectory sub = solve(
      el,
      [&](double t) {
        Vector j(n, 0.0);
        const Vector f = fsrc(t);
        for (std::size_t i = 0; i < f.size(); ++i) j[i] = rho[i] * f[i];
        return j;
      },
      a);

  const Trajectory elastic = blocks_trajectory(full, s, {0, 1});
  double dev = 0.0;
  for (std::size_t k = 0; k < elastic.states.size(); ++k)
    for (std::size_t i = 0; i < elastic.weights.size(); ++i)
      dev = std::max(dev,
                     std::abs(elastic.states[k][i] - sub.states[k][i]));
  CHECK(dev < 1e-9);

  // Thermal blocks stay exactly zero without a heat source.
  const Trajectory thermal = blocks_trajectory(full, s, {2, 3});
  for (const auto& u : thermal.states)
    for (double x : u) CHECK(x == 0.0);
}

TEST_CASE("recovered fields of the zero trajectory reduce to the reference") {
  const BlockSystem s =
      assemble(Variant::TwoTemperature, grid_1d(8), default_material());
  const Trajectory traj =
      solve(s, [&](double) { return Vector(s.size(), 0.0); }, axis(20));
  const RecoveredFields f = recover_fields(traj, s);
  for (const auto& st : f.phi.states)
    for (double x : st) CHECK(x == doctest::Approx(default_material().T0));
  for (const auto& st : f.q.states)
    for (double x : st) CHECK(x == 0.0);
  for (const auto& st : f.eta.states)
    for (double x : st) CHECK(x == doctest::Approx(0.0));
  for (const auto& st : f.displacement.states)
    for (double x : st) CHECK(x == 0.0);
}

TEST_CASE("strain recovery satisfies the stress-strain relation") {
  const Grid g = grid_1d(10);
  MaterialData m = default_material();
  m.gamma = 0.15;
  m.c_elast = 2.0;
  const BlockSystem s = assemble(Variant::TwoTemperature, g, m);
  const TimeAxis a = axis(150);
  const Trajectory traj =
      solve(s, build_source(s, {heat_pulse(), force_pulse()}), a);
  const RecoveredFields f = recover_fields(traj, s);
  const Trajectory sigma = block_trajectory(traj, s, 1);
  const Trajectory theta = block_trajectory(traj, s, 2);
  const DenseMatrix gamma = m.gamma_on(g);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Vector gt = matvec(gamma, theta.states[k]);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      const double expected =
          (sigma.states[k][i] + gt[i]) / m.c_elast;
      CHECK(f.strain.states[k][i] == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("yosida final relation residual is small after a solve") {
  const Grid g = grid_1d(10);
  MaterialData m = default_material();
  m.eps = 0.1;
  const BlockSystem s = assemble(Variant::Yosida, g, m);
  const TimeAxis a = axis(300);
  const Trajectory traj = solve(s, build_source(s, {heat_pulse()}), a);
  const RecoveredFields f = recover_fields(traj, s);
  const std::vector<double> res = final_relation_residual(f, s);
  double scale_ = 0.0;
  for (const auto& st : f.theta.states)
    for (double x : st) scale_ = std::max(scale_, std::abs(x));
  for (double r : res) CHECK(r <= 1e-7 * (1.0 + scale_));

  const BlockSystem tt =
      assemble(Variant::TwoTemperature, g, default_material());
  CHECK_THROWS_AS(final_relation_residual(f, tt), VariantMismatchError);
}

TEST_CASE("oracle rejects operator-valued alpha") {
  const Grid g = grid_1d(8);
  MaterialData m = default_material();
  const FieldSpace sf = make_space(FieldKind::VectorFace, g);
  m.alpha_matrix = DenseMatrix::identity(sf.dof_count);
  const TimeAxis a = axis(5);
  const SourceFn zf = [&](double) {
    return Vector(make_space(FieldKind::VectorNode, g).dof_count, 0.0);
  };
  const SourceFn zq = [&](double) {
    return Vector(make_space(FieldKind::ScalarNode, g).dof_count, 0.0);
  };
  CHECK_THROWS_AS(original_form_oracle(g, m, zf, zq, a), ValidationError);
}
