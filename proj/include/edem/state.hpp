#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "edem/mesh.hpp"

namespace edem {

/// Evolving kinematic state of one particle.
///
/// Q is the rotation relative to the reference configuration (Id at rest). Z_half is
/// expressed in the particle's principal body frame, so the body-to-world rotation used
/// by the rotation update is Q * principal_axes.
struct ParticleState {
  Vec3 X = Vec3::Zero();
  Mat3 Q = Mat3::Identity();
  Vec3 T_half = Vec3::Zero();
  Mat3 Z_half = Mat3::Zero();
};

using StateArray = std::vector<ParticleState>;

struct DerivedKinematics {
  Vec3 v = Vec3::Zero();
  Vec3 Omega = Vec3::Zero();
  Mat3 P = Mat3::Zero();  // j(Omega) * Qp * D
  Mat3 R = Mat3::Zero();  // world-frame inertia tensor
};

StateArray init_rest(const Mesh& mesh);

/// T_half = m v, Z_half = Qp^T j(Omega) Qp for every particle.
void set_initial_velocity(const Mesh& mesh, StateArray& states, std::span<const Vec3> v,
                          std::span<const Vec3> omega);

/// Same velocity and spin for every particle.
void set_initial_velocity(const Mesh& mesh, StateArray& states, const Vec3& v, const Vec3& omega);

/// World rotation of the principal body frame.
inline Mat3 body_frame(const ParticleGeom& g, const ParticleState& s) { return s.Q * g.principal_axes; }

/// World-frame inertia tensor Qp diag(I) Qp^T.
Mat3 world_inertia(const ParticleGeom& g, const ParticleState& s);

/// Body-frame angular momentum unskew(D Z - Z^T D), the rotational momentum carried into the current frame.
Vec3 body_momentum(const ParticleGeom& g, const Mat3& Z);

/// Body momentum after a world-frame torque kick of duration dt, the alpha vector of the rotation solve.
Vec3 kicked_body_momentum(const ParticleGeom& g, const ParticleState& s, const Vec3& torque, double dt);

/// Skew Z with D Z - Z^T D = j(mu).
Mat3 z_from_body_momentum(const ParticleGeom& g, const Vec3& mu);

/// Velocity, angular velocity and momentum matrices from the half-step momenta.
DerivedKinematics derived_kinematics(const ParticleGeom& g, const ParticleState& s);

/// CSV checkpoint: one row per particle with X, Q (row-major), T_half, Z_half (row-major).
void write_checkpoint(const StateArray& states, std::ostream& out);
StateArray read_checkpoint(std::istream& in);

}  // namespace edem
