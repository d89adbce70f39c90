#pragma once

#include <functional>

#include "evotherm/model.hpp"

namespace evotherm {

struct TimeAxis {
  double t_start = 0.0;
  double dt = 1e-3;
  std::size_t steps = 0;
  double nu = 1.0;  // exponential weight; enters norms only, never stepping

  double time_at(std::size_t step) const { return t_start + double(step) * dt; }
  void validate() const;
};

/// Time-indexed sequence of state vectors; states[n] lives at
/// t = t_start + (n+1) dt (implicit Euler, right endpoints).
struct Trajectory {
  TimeAxis axis;
  std::vector<Vector> states;
  Vector weights;  // spatial quadrature weights of the state layout

  bool all_finite() const;
};

/// State-space source sampled at a time point.
using SourceFn = std::function<Vector(double t)>;

/// Implicit Euler stepping of (d0 M0 + M1 + A) U = J with zero history.
/// The step matrix is factorized once; causality is exact.
Trajectory solve(const BlockSystem& system, const SourceFn& source,
                 const TimeAxis& axis);

/// Discrete L^2_nu space-time norm.
double weighted_norm(const Trajectory& traj);

/// Discrete antiderivative (cumulative sum times dt), causal.
Trajectory causal_integral(const Trajectory& rates);

/// Energy 1/2 <M0 U, U>_W of a single state.
double state_energy(const BlockSystem& system, const Vector& state);

struct RecoveredFields {
  Trajectory phi;           // conductive temperature
  Trajectory q;             // heat flux
  Trajectory eta;           // entropy
  Trajectory strain;        // C^{-1} sigma + C^{-1} gamma theta
  Trajectory displacement;  // causal integral of v
  Trajectory theta;         // thermodynamic temperature
  Trajectory sigma;         // stress (recovered for two_strain)
};

/// Extract the sub-trajectory of one layout block.
Trajectory block_trajectory(const Trajectory& traj, const BlockSystem& system,
                            std::size_t block);
/// Concatenation of several blocks (shared spaces across variants).
Trajectory blocks_trajectory(const Trajectory& traj, const BlockSystem& system,
                             const std::vector<std::size_t>& blocks);

RecoveredFields recover_fields(const Trajectory& traj,
                               const BlockSystem& system);

/// Per-step weighted-norm residual of the epsilon-model two-temperature
/// relation; only meaningful for yosida-variant fields.
std::vector<double> final_relation_residual(const RecoveredFields& fields,
                                            const BlockSystem& system);

/// Direct implicit-Euler discretization of the original coupled equations
/// in (v, sigma, theta, q, phi), with the algebraic temperature and Fourier
/// relations enforced each step. Returns the (v, sigma, theta) restriction.
/// Independent of the block-system route; no operator square roots.
Trajectory original_form_oracle(const Grid& grid, const MaterialData& material,
                                const SourceFn& force_source,
                                const SourceFn& heat_source,
                                const TimeAxis& axis);

}  // namespace evotherm
