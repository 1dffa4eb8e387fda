#include "edem/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edem/errors.hpp"

namespace edem {

double ricker(double t, double f0, double t0, double A)
{
  const double x = std::numbers::pi * f0 * (t - t0);
  const double x2 = x * x;
  return A * (1.0 - 2.0 * x2) * std::exp(-x2);
}

double TimeProfile::value(double t) const
{
  switch (kind) {
  case Kind::constant:
    return 1.0;
  case Kind::ricker:
    return ricker(t, f0, t0, 1.0);
  case Kind::ramp:
    if (ramp_time <= 0.0 || t >= ramp_time) {
      return 1.0;
    }
    return t <= 0.0 ? 0.0 : t / ramp_time;
  }
  return 1.0;
}

bool LoadSet::time_dependent() const
{
  const auto varies = [](const TimeProfile& p) { return p.kind != TimeProfile::Kind::constant; };
  return std::any_of(point_forces.begin(), point_forces.end(), [&](const auto& f) { return varies(f.profile); }) ||
         std::any_of(end_moments.begin(), end_moments.end(), [&](const auto& m) { return varies(m.profile); });
}

std::vector<unsigned char> LoadSet::constraint_mask(Index n) const
{
  std::vector<unsigned char> mask(n, 0);
  for (Index p : translation_locked) {
    if (p >= n) {
      throw ConfigError("translation-locked particle " + std::to_string(p) + " out of range");
    }
    mask[p] = 2;
  }
  for (Index p : fixed) {
    if (p >= n) {
      throw ConfigError("fixed particle " + std::to_string(p) + " out of range");
    }
    mask[p] = 1;
  }
  return mask;
}

LinkKinematics interface_displacement(const ParticleState& I, const ParticleState& J, const Link& link)
{
  LinkKinematics k;
  const Vec3 d = J.X - I.X;
  // Written as deviations from the rest configuration so that du vanishes exactly at rest.
  k.du = (d - link.offset0) + (J.Q - Mat3::Identity()) * link.lever_j - (I.Q - Mat3::Identity()) * link.lever_i;
  k.D = d.norm();
  if (!(k.D > 1e-12 * link.D0)) {
    throw SingularConfigurationError(link.i, link.j);
  }
  k.n = d / k.D;
  return k;
}

namespace {

void compute_kinematics(const Mesh& mesh, const StateArray& states, std::vector<LinkKinematics>& kin)
{
  const auto nl = static_cast<long>(mesh.links.size());
  kin.resize(mesh.links.size());
  bool singular = false;
  Index bad = 0;
#pragma omp parallel for schedule(static)
  for (long l = 0; l < nl; ++l) {
    const Link& link = mesh.links[l];
    try {
      kin[l] = interface_displacement(states[link.i], states[link.j], link);
    } catch (const SingularConfigurationError&) {
#pragma omp critical(edem_singular)
      {
        if (!singular || static_cast<Index>(l) < bad) {
          bad = static_cast<Index>(l);
        }
        singular = true;
      }
    }
  }
  if (singular) {
    throw SingularConfigurationError(mesh.links[bad].i, mesh.links[bad].j);
  }
}

void compute_strains(const Mesh& mesh, const std::vector<LinkKinematics>& kin, std::vector<double>& eps)
{
  const auto np = static_cast<long>(mesh.size());
  eps.assign(mesh.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (long p = 0; p < np; ++p) {
    double sum = 0.0;
    for (Index l : mesh.adjacency[p]) {
      sum += mesh.links[l].S * kin[l].du.dot(kin[l].n);
    }
    eps[p] = 0.5 * sum / mesh.corrected_volume(static_cast<Index>(p));
  }
}

}  // namespace

std::vector<double> volumetric_strain(const Mesh& mesh, const StateArray& states)
{
  std::vector<LinkKinematics> kin;
  compute_kinematics(mesh, states, kin);
  std::vector<double> eps;
  compute_strains(mesh, kin, eps);
  return eps;
}

Vec3 link_force(const Link& link, const LinkKinematics& kin, const MaterialParams& material)
{
  const double k = link.S / link.D0 * material.link_modulus();
  const double p = link.S * material.lambda() * kin.eps_v_link;
  const double dun = kin.du.dot(kin.n);
  return k * kin.du + p * (kin.n + (kin.du - dun * kin.n) / kin.D);
}

LinkTorques link_torques(const Link& link, const ParticleState& I, const ParticleState& J,
                         const LinkKinematics& kin, const MaterialParams& material)
{
  const double k = link.S / link.D0 * material.link_modulus();
  const double p = link.S * material.lambda() * kin.eps_v_link;
  const Vec3 bi = I.Q * link.lever_i;
  const Vec3 bj = J.Q * link.lever_j;
  LinkTorques t;
  t.torsion_i = bi.cross(k * kin.du + p * kin.n);
  t.torsion_j = -bj.cross(k * kin.du + p * kin.n);
  const double scale = link.S / link.D0;
  t.flexion_i = scale * (link.alpha_n * (I.Q * link.n0).cross(J.Q * link.n0) +
                         link.alpha_s * (I.Q * link.s0).cross(J.Q * link.s0) +
                         link.alpha_t * (I.Q * link.t0).cross(J.Q * link.t0));
  t.flexion_j = -t.flexion_i;
  return t;
}

void assemble(const Mesh& mesh, const StateArray& states, const LoadSet& loads, double t, ForceField& out)
{
  if (states.size() != mesh.size()) {
    throw std::invalid_argument("state array does not match mesh");
  }
  compute_kinematics(mesh, states, out.kin);
  compute_strains(mesh, out.kin, out.eps_v);

  const auto nl = static_cast<long>(mesh.links.size());
  out.link_force.resize(mesh.links.size());
  out.link_torque_i.resize(mesh.links.size());
  out.link_torque_j.resize(mesh.links.size());
#pragma omp parallel for schedule(static)
  for (long l = 0; l < nl; ++l) {
    const Link& link = mesh.links[l];
    LinkKinematics& kin = out.kin[l];
    kin.eps_v_link = 0.5 * (out.eps_v[link.i] + out.eps_v[link.j]);
    out.link_force[l] = link_force(link, kin, mesh.material);
    const LinkTorques tq = link_torques(link, states[link.i], states[link.j], kin, mesh.material);
    out.link_torque_i[l] = tq.torsion_i + tq.flexion_i;
    out.link_torque_j[l] = tq.torsion_j + tq.flexion_j;
  }

  const auto np = static_cast<long>(mesh.size());
  out.force.resize(mesh.size());
  out.torque.resize(mesh.size());
#pragma omp parallel for schedule(static)
  for (long p = 0; p < np; ++p) {
    Vec3 f = Vec3::Zero();
    Vec3 m = Vec3::Zero();
    for (Index l : mesh.adjacency[p]) {
      if (mesh.links[l].i == static_cast<Index>(p)) {
        f += out.link_force[l];
        m += out.link_torque_i[l];
      } else {
        f -= out.link_force[l];
        m += out.link_torque_j[l];
      }
    }
    out.force[p] = f;
    out.torque[p] = m;
  }

  for (const auto& pf : loads.point_forces) {
    out.force.at(pf.particle) += pf.profile.value(t) * pf.force;
  }
  for (const auto& em : loads.end_moments) {
    out.torque.at(em.particle) += em.magnitude * em.profile.value(t) * em.axis.normalized();
  }
  for (Index p : loads.translation_locked) {
    out.force.at(p).setZero();
  }
  for (Index p : loads.fixed) {
    out.force.at(p).setZero();
    out.torque.at(p).setZero();
  }
}

ForceField assemble(const Mesh& mesh, const StateArray& states, const LoadSet& loads, double t)
{
  ForceField f;
  assemble(mesh, states, loads, t, f);
  return f;
}

PotentialEnergy potential_energy(const Mesh& mesh, const StateArray& states)
{
  std::vector<LinkKinematics> kin;
  compute_kinematics(mesh, states, kin);
  std::vector<double> eps;
  compute_strains(mesh, kin, eps);

  PotentialEnergy e;
  const double modulus = mesh.material.link_modulus();
  for (Index l = 0; l < mesh.links.size(); ++l) {
    const Link& link = mesh.links[l];
    const double scale = link.S / link.D0;
    e.U_t += 0.5 * scale * modulus * kin[l].du.squaredNorm();
    const Mat3& Qi = states[link.i].Q;
    const Mat3& Qj = states[link.j].Q;
    // 1 - a.b = |a - b|^2 / 2 for unit vectors, free of cancellation near rest.
    e.U_f += 0.5 * scale *
             (link.alpha_n * (Qj * link.n0 - Qi * link.n0).squaredNorm() +
              link.alpha_s * (Qj * link.s0 - Qi * link.s0).squaredNorm() +
              link.alpha_t * (Qj * link.t0 - Qi * link.t0).squaredNorm());
  }
  const double lambda = mesh.material.lambda();
  for (Index p = 0; p < mesh.size(); ++p) {
    e.U_d += 0.5 * lambda * mesh.corrected_volume(p) * eps[p] * eps[p];
  }
  e.total = e.U_t + e.U_d + e.U_f;
  return e;
}

}  // namespace edem
