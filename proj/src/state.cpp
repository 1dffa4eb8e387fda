#include "edem/state.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "edem/errors.hpp"

namespace edem {

StateArray init_rest(const Mesh& mesh)
{
  StateArray states(mesh.size());
  for (Index p = 0; p < mesh.size(); ++p) {
    states[p].X = mesh.particles[p].X0;
  }
  return states;
}

void set_initial_velocity(const Mesh& mesh, StateArray& states, std::span<const Vec3> v,
                          std::span<const Vec3> omega)
{
  if (v.size() != states.size() || omega.size() != states.size() || states.size() != mesh.size()) {
    throw std::invalid_argument("velocity arrays must match the particle count");
  }
  for (Index p = 0; p < states.size(); ++p) {
    if (!v[p].allFinite() || !omega[p].allFinite()) {
      throw std::invalid_argument("non-finite initial velocity");
    }
    const ParticleGeom& g = mesh.particles[p];
    const Mat3 Qp = body_frame(g, states[p]);
    states[p].T_half = g.mass * v[p];
    states[p].Z_half = Qp.transpose() * skew(omega[p]) * Qp;
  }
}

void set_initial_velocity(const Mesh& mesh, StateArray& states, const Vec3& v, const Vec3& omega)
{
  const std::vector<Vec3> vs(states.size(), v);
  const std::vector<Vec3> ws(states.size(), omega);
  set_initial_velocity(mesh, states, vs, ws);
}

Mat3 world_inertia(const ParticleGeom& g, const ParticleState& s)
{
  const Mat3 Qp = body_frame(g, s);
  return Qp * g.principal_inertia.asDiagonal() * Qp.transpose();
}

Vec3 body_momentum(const ParticleGeom& g, const Mat3& Z)
{
  const auto D = g.d_coeffs.asDiagonal();
  return unskew(D * Z - Z.transpose() * D);
}

Vec3 kicked_body_momentum(const ParticleGeom& g, const ParticleState& s, const Vec3& torque, double dt)
{
  return body_momentum(g, s.Z_half) + dt * (body_frame(g, s).transpose() * torque);
}

Mat3 z_from_body_momentum(const ParticleGeom& g, const Vec3& mu)
{
  return skew(mu.cwiseQuotient(g.principal_inertia));
}

DerivedKinematics derived_kinematics(const ParticleGeom& g, const ParticleState& s)
{
  DerivedKinematics k;
  const Mat3 Qp = body_frame(g, s);
  k.v = s.T_half / g.mass;
  k.Omega = Qp * unskew(s.Z_half);
  k.P = skew(k.Omega) * Qp * g.d_coeffs.asDiagonal();
  k.R = world_inertia(g, s);
  return k;
}

namespace {

void put(std::string& row, double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  if (!row.empty()) {
    row += ',';
  }
  row += buf;
}

}  // namespace

void write_checkpoint(const StateArray& states, std::ostream& out)
{
  out << "X0,X1,X2,Q00,Q01,Q02,Q10,Q11,Q12,Q20,Q21,Q22,T0,T1,T2,"
         "Z00,Z01,Z02,Z10,Z11,Z12,Z20,Z21,Z22\n";
  for (const auto& s : states) {
    std::string row;
    for (int a = 0; a < 3; ++a) {
      put(row, s.X[a]);
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        put(row, s.Q(r, c));
      }
    }
    for (int a = 0; a < 3; ++a) {
      put(row, s.T_half[a]);
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        put(row, s.Z_half(r, c));
      }
    }
    out << row << '\n';
  }
  if (!out) {
    throw std::runtime_error("checkpoint write failed");
  }
}

StateArray read_checkpoint(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty checkpoint");
  }
  StateArray states;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw std::runtime_error("malformed checkpoint value '" + cell + "'");
      }
      v.push_back(x);
    }
    if (v.size() != 24) {
      throw std::runtime_error("checkpoint row " + std::to_string(states.size()) + " has " +
                               std::to_string(v.size()) + " columns, expected 24");
    }
    ParticleState s;
    s.X = Vec3(v[0], v[1], v[2]);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        s.Q(r, c) = v[3 + 3 * r + c];
        s.Z_half(r, c) = v[15 + 3 * r + c];
      }
    }
    s.T_half = Vec3(v[12], v[13], v[14]);
    states.push_back(s);
  }
  return states;
}

}  // namespace edem
