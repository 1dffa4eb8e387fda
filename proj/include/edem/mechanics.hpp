#pragma once

#include <vector>

#include "edem/mesh.hpp"
#include "edem/state.hpp"

namespace edem {

struct LinkKinematics {
  Vec3 du = Vec3::Zero();  // interface displacement seen from I
  double D = 0.0;
  Vec3 n = Vec3::Zero();  // I -> J
  double eps_v_link = 0.0;
};

/// Time profile multiplying a load amplitude.
struct TimeProfile {
  enum class Kind { constant, ricker, ramp };
  Kind kind = Kind::constant;
  double f0 = 1.0;         // ricker peak frequency (Hz)
  double t0 = 0.0;         // ricker delay (s)
  double ramp_time = 0.0;  // ramp: linear from 0 to 1 over [0, ramp_time], then 1

  double value(double t) const;
};

struct PointForce {
  Index particle = 0;
  Vec3 force = Vec3::Zero();  // scaled by profile
  TimeProfile profile;
};

struct EndMoment {
  Index particle = 0;
  Vec3 axis = Vec3::UnitZ();
  double magnitude = 0.0;
  TimeProfile profile;
};

struct LoadSet {
  std::vector<PointForce> point_forces;
  std::vector<EndMoment> end_moments;
  std::vector<Index> fixed;               // all degrees of freedom clamped
  std::vector<Index> translation_locked;  // position clamped, rotation free
  double damping = 0.0;                   // gamma (1/s)

  bool time_dependent() const;
  /// Per-particle flags: 1 fixed, 2 translation locked (fixed wins).
  std::vector<unsigned char> constraint_mask(Index n) const;
};

/// Per-particle loads plus the intermediate per-link and per-particle fields they came from.
struct ForceField {
  std::vector<Vec3> force;
  std::vector<Vec3> torque;
  std::vector<double> eps_v;
  std::vector<LinkKinematics> kin;
  // Per-link contributions: force on I, torque on I, torque on J.
  std::vector<Vec3> link_force;
  std::vector<Vec3> link_torque_i;
  std::vector<Vec3> link_torque_j;
};

LinkKinematics interface_displacement(const ParticleState& I, const ParticleState& J, const Link& link);

std::vector<double> volumetric_strain(const Mesh& mesh, const StateArray& states);

/// Force on particle I; the force on J is its negation.
Vec3 link_force(const Link& link, const LinkKinematics& kin, const MaterialParams& material);

struct LinkTorques {
  Vec3 torsion_i = Vec3::Zero();
  Vec3 flexion_i = Vec3::Zero();
  Vec3 torsion_j = Vec3::Zero();
  Vec3 flexion_j = Vec3::Zero();
};

LinkTorques link_torques(const Link& link, const ParticleState& I, const ParticleState& J,
                         const LinkKinematics& kin, const MaterialParams& material);

/// Total force and torque per particle at time t; fixed particles get zero loads.
void assemble(const Mesh& mesh, const StateArray& states, const LoadSet& loads, double t, ForceField& out);
ForceField assemble(const Mesh& mesh, const StateArray& states, const LoadSet& loads, double t);

struct PotentialEnergy {
  double U_t = 0.0;
  double U_d = 0.0;
  double U_f = 0.0;  // relative to the rest value
  double total = 0.0;
};

PotentialEnergy potential_energy(const Mesh& mesh, const StateArray& states);

/// A (1 - 2 pi^2 f0^2 (t - t0)^2) exp(-pi^2 f0^2 (t - t0)^2)
double ricker(double t, double f0, double t0, double A);

}  // namespace edem
