#pragma once

#include "evotherm/solver.hpp"

namespace evotherm {

struct SourceSpec {
  enum class Profile { GaussianPulse, ConstantPatch, Zero };

  std::string field = "Q";  // "F" (force) or "Q" (heat source)
  Profile profile = Profile::Zero;
  double amplitude = 1.0;
  std::vector<double> center = {0.5};
  double width = 0.1;
  double onset = 0.0;
  double duration = 0.2;
  int component = 0;  // force component in 2D

  double time_factor(double t) const;
};

/// Declarative simulation description; parsed from strict JSON.
struct Scenario {
  std::string name;
  Grid grid;
  MaterialData material;
  Variant variant = Variant::TwoTemperature;
  std::vector<SourceSpec> sources;
  TimeAxis time;
  std::vector<std::string> output_fields;
  bool report = true;
};

/// Parse and validate a scenario document. Unknown keys are rejected.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Spatial sample of a source on its field space.
Vector source_space_values(const SourceSpec& spec, const Grid& grid);

/// Full-state right-hand side J(t) = (rho0 F, 0, rho0 Q/T0, 0).
SourceFn build_source(const BlockSystem& system,
                      const std::vector<SourceSpec>& sources);
/// The F and Q components separately (for the original-form oracle).
SourceFn build_force_source(const Grid& grid,
                            const std::vector<SourceSpec>& sources);
SourceFn build_heat_source(const Grid& grid,
                           const std::vector<SourceSpec>& sources);

}  // namespace evotherm
