#include "edem/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edem/errors.hpp"

namespace edem {

void SolverParams::validate() const
{
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("time step must be positive");
  }
  if (!(tol > 0.0)) {
    throw ConfigError("solver tolerance must be positive");
  }
  if (max_iter < 1) {
    throw ConfigError("max_iter must be >= 1");
  }
}

double cfl_margin(const Vec3& alpha, const Vec3& I_moments, double dt)
{
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    s += std::abs(alpha[k]) / I_moments[k];
  }
  return dt * s / kRotationBound;
}

RotationSolution rotation_solve(const RotationSolveInput& input, double dt, double tol, int max_iter,
                                std::vector<Eigen::Vector4d>* iterates)
{
  const Vec3& d = input.d;
  const Vec3 rhs = dt * input.alpha;
  const Vec3 denom(2.0 * (d[1] + d[2]), 2.0 * (d[0] + d[2]), 2.0 * (d[0] + d[1]));
  const Vec3 cross(2.0 * (d[1] - d[2]), 2.0 * (d[2] - d[0]), 2.0 * (d[0] - d[1]));

  RotationSolution sol;
  sol.margin = cfl_margin(input.alpha, input.I_moments, dt);
  Eigen::Vector4d e(1.0, 0.0, 0.0, 0.0);
  if (iterates != nullptr) {
    iterates->push_back(e);
  }
  for (int k = 1; k <= max_iter; ++k) {
    Eigen::Vector4d next;
    next[1] = (rhs[0] - cross[0] * e[2] * e[3]) / (denom[0] * e[0]);
    next[2] = (rhs[1] - cross[1] * e[1] * e[3]) / (denom[1] * e[0]);
    next[3] = (rhs[2] - cross[2] * e[1] * e[2]) / (denom[2] * e[0]);
    const double s = next[1] * next[1] + next[2] * next[2] + next[3] * next[3];
    if (!(s < 1.0)) {
      throw StepFailure("rotation solve diverged", 0, sol.margin);
    }
    next[0] = std::sqrt(1.0 - s);
    const double update = (next - e).cwiseAbs().maxCoeff();
    e = next;
    if (iterates != nullptr) {
      iterates->push_back(e);
    }
    if (update <= tol) {
      sol.e = e;
      sol.iterations = k;
      const Mat3 E = skew(e.tail<3>());
      sol.delta = 2.0 * e[0] * E + 2.0 * E * E;
      return sol;
    }
  }
  throw StepFailure("rotation solve did not converge in " + std::to_string(max_iter) + " iterations", 0,
                    sol.margin);
}

StepStats rattle_step(const Mesh& mesh, StateArray& states, const LoadSet& loads, const SolverParams& params,
                      double t, StepWorkspace& ws)
{
  params.validate();
  if (!ws.forces_ready) {
    assemble(mesh, states, loads, t, ws.forces);
  }
  ws.forces_ready = false;

  const auto mask = loads.constraint_mask(mesh.size());
  const double dt = params.dt;
  const double damp = loads.damping > 0.0 ? 1.0 - loads.damping * dt : 1.0;
  const auto np = static_cast<long>(mesh.size());
  std::vector<int> iterations(mesh.size(), 0);
  std::vector<double> margins(mesh.size(), 0.0);
  std::vector<unsigned char> failed(mesh.size(), 0);
  std::vector<std::string> reasons(mesh.size());

#pragma omp parallel for schedule(static)
  for (long p = 0; p < np; ++p) {
    if (mask[p] == 1) {
      continue;
    }
    const ParticleGeom& g = mesh.particles[p];
    ParticleState& s = states[p];
    if (mask[p] != 2) {
      s.T_half += dt * ws.forces.force[p];
      s.X += (dt / g.mass) * s.T_half;
    }
    RotationSolveInput in;
    in.alpha = kicked_body_momentum(g, s, ws.forces.torque[p], dt);
    in.d = g.d_coeffs;
    in.I_moments = g.principal_inertia;
    margins[p] = cfl_margin(in.alpha, in.I_moments, dt);
    if (params.cfl_guard && margins[p] > 1.0) {
      failed[p] = 1;
      reasons[p] = "rotation CFL condition violated";
      continue;
    }
    try {
      const RotationSolution sol = rotation_solve(in, dt, params.tol, params.max_iter);
      iterations[p] = sol.iterations;
      const Mat3& Ep = g.principal_axes;
      s.Q += s.Q * (Ep * sol.delta * Ep.transpose());
      s.Z_half = sol.delta / dt;
    } catch (const StepFailure& f) {
      failed[p] = 1;
      reasons[p] = f.what();
      continue;
    }
    if (damp != 1.0) {
      s.T_half *= damp;
      s.Z_half *= damp;
    }
  }

  StepStats stats;
  for (Index p = 0; p < mesh.size(); ++p) {
    if (failed[p]) {
      StepFailure err(reasons[p], p, margins[p]);
      throw err;
    }
    stats.max_iterations = std::max(stats.max_iterations, iterations[p]);
    if (margins[p] > stats.max_margin) {
      stats.max_margin = margins[p];
      stats.worst_particle = p;
    }
  }
  return stats;
}

void stagger_momenta(const Mesh& mesh, StateArray& states, const LoadSet& loads, double dt, double t,
                     StepWorkspace& ws)
{
  assemble(mesh, states, loads, t, ws.forces);
  ws.forces_ready = true;
  const auto mask = loads.constraint_mask(mesh.size());
  for (Index p = 0; p < mesh.size(); ++p) {
    if (mask[p] == 1) {
      continue;
    }
    const ParticleGeom& g = mesh.particles[p];
    ParticleState& s = states[p];
    if (mask[p] != 2) {
      s.T_half -= 0.5 * dt * ws.forces.force[p];
    }
    s.Z_half = z_from_body_momentum(g, kicked_body_momentum(g, s, ws.forces.torque[p], -0.5 * dt));
  }
}

void reverse_momenta(const Mesh& mesh, StateArray& states, const LoadSet& loads, double dt, double t,
                     StepWorkspace& ws)
{
  assemble(mesh, states, loads, t, ws.forces);
  ws.forces_ready = true;
  const auto mask = loads.constraint_mask(mesh.size());
  for (Index p = 0; p < mesh.size(); ++p) {
    if (mask[p] == 1) {
      continue;
    }
    const ParticleGeom& g = mesh.particles[p];
    ParticleState& s = states[p];
    if (mask[p] != 2) {
      s.T_half = -(s.T_half + dt * ws.forces.force[p]);
    }
    s.Z_half = z_from_body_momentum(g, -kicked_body_momentum(g, s, ws.forces.torque[p], dt));
  }
}

StateArray reverse_run(const Mesh& mesh, const StateArray& final_states, long n_steps, const LoadSet& loads,
                       const SolverParams& params)
{
  params.validate();
  if (loads.damping != 0.0 || loads.time_dependent()) {
    throw ConfigError("reverse run needs undamped, time-independent loads");
  }
  StateArray states = final_states;
  if (n_steps <= 0) {
    return states;
  }
  StepWorkspace ws;
  reverse_momenta(mesh, states, loads, params.dt, 0.0, ws);
  for (long n = 0; n < n_steps; ++n) {
    rattle_step(mesh, states, loads, params, 0.0, ws);
  }
  reverse_momenta(mesh, states, loads, params.dt, 0.0, ws);
  return states;
}

double suggest_dt(const Mesh& mesh, const MaterialParams& material, double cfl_factor)
{
  if (!(cfl_factor > 0.0 && cfl_factor <= 1.0)) {
    throw ConfigError("cfl_factor must lie in (0, 1]");
  }
  return cfl_factor * mesh.min_link_distance() / material.p_wave_speed();
}

}  // namespace edem
