#include "evotherm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace evotherm {

using nlohmann::json;

double SourceSpec::time_factor(double t) const {
  if (profile == Profile::Zero) return 0.0;
  if (t < onset || t > onset + duration) return 0.0;
  if (profile == Profile::ConstantPatch) return 1.0;
  const double s = std::sin(M_PI * (t - onset) / duration);
  return s * s;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ParseError("unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw ParseError("key '" + key + "' must be a number");
  return obj[key].get<double>();
}

SourceSpec::Profile profile_from_name(const std::string& name) {
  if (name == "gaussian-pulse") return SourceSpec::Profile::GaussianPulse;
  if (name == "constant-patch") return SourceSpec::Profile::ConstantPatch;
  if (name == "zero") return SourceSpec::Profile::Zero;
  throw ParseError("unknown source profile: " + name);
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON malformed: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  reject_unknown_keys(doc,
                      {"name", "grid", "material", "variant", "sources",
                       "time", "outputs"},
                      "scenario");

  Scenario sc;
  sc.name = doc.value("name", std::string("unnamed"));

  if (!doc.contains("grid")) throw ParseError("scenario requires 'grid'");
  {
    const json& g = doc["grid"];
    reject_unknown_keys(g, {"dimension", "cells", "lengths"}, "grid");
    sc.grid.dimension = int(get_number(g, "dimension", 1));
    if (!g.contains("cells")) throw ParseError("grid requires 'cells'");
    sc.grid.cells.clear();
    for (const auto& c : g["cells"]) {
      const double v = c.get<double>();
      if (v < 1 || v != std::floor(v))
        throw ValidationError("cells must be positive integers");
      sc.grid.cells.push_back(std::size_t(v));
    }
    sc.grid.lengths.assign(sc.grid.cells.size(), 1.0);
    if (g.contains("lengths")) {
      sc.grid.lengths.clear();
      for (const auto& l : g["lengths"]) sc.grid.lengths.push_back(l.get<double>());
    }
    sc.grid.validate();
  }

  sc.material = default_material();
  sc.material.beta.reset();
  sc.material.eps.reset();
  if (doc.contains("material")) {
    const json& m = doc["material"];
    reject_unknown_keys(m,
                        {"rho0", "c_elast", "kappa", "gamma", "lambda",
                         "alpha", "beta", "eps", "T0"},
                        "material");
    sc.material.rho0 = get_number(m, "rho0", sc.material.rho0);
    sc.material.c_elast = get_number(m, "c_elast", sc.material.c_elast);
    sc.material.kappa = get_number(m, "kappa", sc.material.kappa);
    sc.material.gamma = get_number(m, "gamma", sc.material.gamma);
    sc.material.lambda = get_number(m, "lambda", sc.material.lambda);
    sc.material.alpha = get_number(m, "alpha", sc.material.alpha);
    if (m.contains("beta")) sc.material.beta = m["beta"].get<double>();
    if (m.contains("eps")) sc.material.eps = m["eps"].get<double>();
    sc.material.T0 = get_number(m, "T0", sc.material.T0);
  }

  sc.variant = variant_from_name(doc.value("variant", std::string("two_temperature")));
  sc.material.validate(sc.variant);

  if (doc.contains("sources")) {
    for (const json& s : doc["sources"]) {
      reject_unknown_keys(s,
                          {"field", "profile", "amplitude", "center", "width",
                           "onset", "duration", "component"},
                          "source");
      SourceSpec spec;
      spec.field = s.value("field", std::string("Q"));
      if (spec.field != "F" && spec.field != "Q")
        throw ValidationError("source field must be 'F' or 'Q'");
      spec.profile = profile_from_name(s.value("profile", std::string("zero")));
      spec.amplitude = get_number(s, "amplitude", 1.0);
      spec.width = get_number(s, "width", 0.1);
      spec.onset = get_number(s, "onset", 0.0);
      spec.duration = get_number(s, "duration", 0.2);
      spec.component = int(get_number(s, "component", 0));
      if (s.contains("center")) {
        spec.center.clear();
        for (const auto& c : s["center"]) spec.center.push_back(c.get<double>());
      }
      if (spec.center.size() != std::size_t(sc.grid.dimension))
        spec.center.assign(std::size_t(sc.grid.dimension), 0.5);
      if (!(spec.width > 0.0)) throw ValidationError("source width must be positive");
      if (!(spec.duration > 0.0))
        throw ValidationError("source duration must be positive");
      sc.sources.push_back(std::move(spec));
    }
  }

  sc.time = TimeAxis{};
  sc.time.steps = 1000;
  if (doc.contains("time")) {
    const json& t = doc["time"];
    reject_unknown_keys(t, {"t_start", "dt", "steps", "nu"}, "time");
    sc.time.t_start = get_number(t, "t_start", 0.0);
    sc.time.dt = get_number(t, "dt", 1e-3);
    const double st = get_number(t, "steps", 1000.0);
    if (st < 1 || st != std::floor(st))
      throw ValidationError("steps must be a positive integer");
    sc.time.steps = std::size_t(st);
    sc.time.nu = get_number(t, "nu", 1.0);
  }
  sc.time.validate();

  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    reject_unknown_keys(o, {"fields", "report"}, "outputs");
    if (o.contains("fields"))
      for (const auto& f : o["fields"])
        sc.output_fields.push_back(f.get<std::string>());
    sc.report = o.value("report", true);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

// Dof coordinates of the interior scalar nodes.
std::vector<std::vector<double>> scalar_node_positions(const Grid& g) {
  std::vector<std::vector<double>> pos;
  if (g.dimension == 1) {
    const double h = g.spacing(0);
    for (std::size_t i = 1; i <= g.cells[0] - 1; ++i)
      pos.push_back({double(i) * h});
    return pos;
  }
  const double hx = g.spacing(0), hy = g.spacing(1);
  for (std::size_t j = 1; j <= g.cells[1] - 1; ++j)
    for (std::size_t i = 1; i <= g.cells[0] - 1; ++i)
      pos.push_back({double(i) * hx, double(j) * hy});
  return pos;
}

double space_factor(const SourceSpec& s, const std::vector<double>& x) {
  switch (s.profile) {
    case SourceSpec::Profile::Zero:
      return 0.0;
    case SourceSpec::Profile::GaussianPulse: {
      double e = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double dx = x[d] - s.center[d];
        e += dx * dx;
      }
      return std::exp(-e / (2.0 * s.width * s.width));
    }
    case SourceSpec::Profile::ConstantPatch: {
      for (std::size_t d = 0; d < x.size(); ++d)
        if (std::abs(x[d] - s.center[d]) > s.width) return 0.0;
      return 1.0;
    }
  }
  return 0.0;
}

}  // namespace

Vector source_space_values(const SourceSpec& spec, const Grid& grid) {
  const auto pos = scalar_node_positions(grid);
  const std::size_t ns = pos.size();
  if (spec.field == "Q") {
    Vector v(ns, 0.0);
    for (std::size_t i = 0; i < ns; ++i)
      v[i] = spec.amplitude * space_factor(spec, pos[i]);
    return v;
  }
  // Force on the vector-node space; one component carries the profile.
  const int comps = grid.dimension == 1 ? 1 : 2;
  Vector v(std::size_t(comps) * ns, 0.0);
  const int c = std::min(spec.component, comps - 1);
  for (std::size_t i = 0; i < ns; ++i)
    v[std::size_t(c) * ns + i] = spec.amplitude * space_factor(spec, pos[i]);
  return v;
}

SourceFn build_force_source(const Grid& grid,
                            const std::vector<SourceSpec>& sources) {
  const FieldSpace sv = make_space(FieldKind::VectorNode, grid);
  std::vector<std::pair<SourceSpec, Vector>> parts;
  for (const auto& s : sources)
    if (s.field == "F") parts.emplace_back(s, source_space_values(s, grid));
  const std::size_t n = sv.dof_count;
  return [parts, n](double t) {
    Vector v(n, 0.0);
    for (const auto& [spec, space] : parts) {
      const double f = spec.time_factor(t);
      if (f == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) v[i] += f * space[i];
    }
    return v;
  };
}

SourceFn build_heat_source(const Grid& grid,
                           const std::vector<SourceSpec>& sources) {
  const FieldSpace ss = make_space(FieldKind::ScalarNode, grid);
  std::vector<std::pair<SourceSpec, Vector>> parts;
  for (const auto& s : sources)
    if (s.field == "Q") parts.emplace_back(s, source_space_values(s, grid));
  const std::size_t n = ss.dof_count;
  return [parts, n](double t) {
    Vector v(n, 0.0);
    for (const auto& [spec, space] : parts) {
      const double f = spec.time_factor(t);
      if (f == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) v[i] += f * space[i];
    }
    return v;
  };
}

SourceFn build_source(const BlockSystem& system,
                      const std::vector<SourceSpec>& sources) {
  const SourceFn f_src = build_force_source(system.grid, sources);
  const SourceFn q_src = build_heat_source(system.grid, sources);
  const Vector rho_v =
      system.material.rho0_on(make_space(FieldKind::VectorNode, system.grid));
  const Vector rho_s =
      system.material.rho0_on(make_space(FieldKind::ScalarNode, system.grid));
  const double t0 = system.material.T0;
  const std::size_t n = system.size();
  const std::size_t ov = system.offsets[0], os = system.offsets[2];
  return [=](double t) {
    Vector j(n, 0.0);
    const Vector f = f_src(t);
    const Vector q = q_src(t);
    for (std::size_t i = 0; i < f.size(); ++i) j[ov + i] = rho_v[i] * f[i];
    for (std::size_t i = 0; i < q.size(); ++i) j[os + i] = rho_s[i] * q[i] / t0;
    return j;
  };
}

}  // namespace evotherm
