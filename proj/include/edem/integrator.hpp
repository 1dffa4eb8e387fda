#pragma once

#include <vector>

#include <Eigen/Dense>

#include "edem/mechanics.hpp"

namespace edem {

struct SolverParams {
  double dt = 0.0;
  double tol = 1e-12;
  int max_iter = 100;
  bool cfl_guard = false;

  /// Throws ConfigError unless dt > 0, tol > 0, max_iter >= 1.
  void validate() const;
};

struct RotationSolveInput {
  Vec3 alpha = Vec3::Zero();
  Vec3 d = Vec3::Zero();
  Vec3 I_moments = Vec3::Zero();  // I1 = d2 + d3 and cyclic
};

struct RotationSolution {
  Eigen::Vector4d e{1.0, 0.0, 0.0, 0.0};
  Mat3 delta = Mat3::Zero();  // dt * Z, i.e. (Id + dt Z) - Id
  int iterations = 0;
  double margin = 0.0;
};

/// (sqrt(21) - 3) / 6
inline const double kRotationBound = (std::sqrt(21.0) - 3.0) / 6.0;

double cfl_margin(const Vec3& alpha, const Vec3& I_moments, double dt);

/// Fixed-point quaternion iteration from (1,0,0,0). Throws StepFailure on divergence or
/// when max_iter is exhausted. When iterates is non-null every iterate (including the
/// starting point) is appended.
RotationSolution rotation_solve(const RotationSolveInput& input, double dt, double tol, int max_iter,
                                std::vector<Eigen::Vector4d>* iterates = nullptr);

struct StepStats {
  int max_iterations = 0;
  double max_margin = 0.0;
  Index worst_particle = 0;
};

/// Scratch space reused across steps. When forces_ready is set, forces already hold the
/// loads at the current positions and time; the step consumes and clears the flag.
struct StepWorkspace {
  ForceField forces;
  bool forces_ready = false;
};

/// One step of the force/torque form of RATTLE from t to t + dt.
StepStats rattle_step(const Mesh& mesh, StateArray& states, const LoadSet& loads, const SolverParams& params,
                      double t, StepWorkspace& ws);

/// Converts whole-step momenta stored in T_half/Z_half into the half-step values at -dt/2
/// (T^{-1/2} = T^0 - dt/2 F^0, and the same for the body angular momentum).
void stagger_momenta(const Mesh& mesh, StateArray& states, const LoadSet& loads, double dt, double t,
                     StepWorkspace& ws);

/// Replaces the momenta by those of the time-reversed trajectory through the same positions.
void reverse_momenta(const Mesh& mesh, StateArray& states, const LoadSet& loads, double dt, double t,
                     StepWorkspace& ws);

/// Runs n_steps of the time-reversed dynamics and restores the forward momentum convention.
/// Requires time-independent, undamped loads.
StateArray reverse_run(const Mesh& mesh, const StateArray& final_states, long n_steps, const LoadSet& loads,
                       const SolverParams& params);

/// cfl_factor * h_min / c_p.
double suggest_dt(const Mesh& mesh, const MaterialParams& material, double cfl_factor);

}  // namespace edem
