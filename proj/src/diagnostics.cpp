#include "edem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "edem/errors.hpp"

namespace edem {

EnergyReport total_energy(const Mesh& mesh, const StateArray& states, const ForceField* forces, double dt, double t)
{
  EnergyReport r;
  r.t = t;
  for (Index p = 0; p < mesh.size(); ++p) {
    const ParticleGeom& g = mesh.particles[p];
    const ParticleState& s = states[p];
    Vec3 T = s.T_half;
    Vec3 mu = body_momentum(g, s.Z_half);
    if (forces != nullptr) {
      T += 0.5 * dt * forces->force[p];
      mu = kicked_body_momentum(g, s, forces->torque[p], 0.5 * dt);
    }
    r.kinetic_trans += 0.5 * T.squaredNorm() / g.mass;
    r.kinetic_rot += 0.5 * mu.cwiseProduct(mu).cwiseQuotient(g.principal_inertia).sum();
  }
  const PotentialEnergy u = potential_energy(mesh, states);
  r.U_t = u.U_t;
  r.U_d = u.U_d;
  r.U_f = u.U_f;
  r.total = r.kinetic_trans + r.kinetic_rot + r.U_t + r.U_d + r.U_f;
  return r;
}

Momenta momenta(const Mesh& mesh, const StateArray& states)
{
  Momenta m;
  for (Index p = 0; p < mesh.size(); ++p) {
    const ParticleGeom& g = mesh.particles[p];
    const ParticleState& s = states[p];
    m.linear += s.T_half;
    m.angular += s.X.cross(s.T_half) + body_frame(g, s) * body_momentum(g, s.Z_half);
  }
  return m;
}

Vec3 rotation_vector(const Mat3& Q)
{
  const Eigen::AngleAxisd aa(Eigen::Quaterniond(Q).normalized());
  double angle = aa.angle();
  Vec3 axis = aa.axis();
  if (angle > std::numbers::pi) {
    angle = 2.0 * std::numbers::pi - angle;
    axis = -axis;
  }
  return angle * axis;
}

void ProbeRecord::sample(const Mesh& mesh, const StateArray& states, double time)
{
  t.push_back(time);
  xi.push_back(states.at(particle).X - mesh.particles.at(particle).X0);
  theta.push_back(rotation_vector(states[particle].Q));
}

double arrival_time(const std::vector<double>& t, const std::vector<double>& signal, double threshold_fraction)
{
  if (t.size() != signal.size() || t.empty()) {
    throw MeasurementError("probe record is empty or inconsistent");
  }
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw MeasurementError("threshold fraction must lie in (0, 1]");
  }
  double peak = 0.0;
  for (double s : signal) {
    peak = std::max(peak, std::abs(s));
  }
  if (!(peak > 0.0)) {
    throw MeasurementError("probe signal never leaves zero");
  }
  const double level = threshold_fraction * peak;
  for (std::size_t k = 0; k < signal.size(); ++k) {
    const double a = std::abs(signal[k]);
    if (a >= level) {
      if (k == 0) {
        return t[0];
      }
      const double b = std::abs(signal[k - 1]);
      const double w = (level - b) / (a - b);
      return t[k - 1] + w * (t[k] - t[k - 1]);
    }
  }
  throw MeasurementError("no threshold crossing");
}

double arrival_time(const ProbeRecord& probe, double threshold_fraction)
{
  std::vector<double> mag(probe.xi.size());
  for (std::size_t k = 0; k < mag.size(); ++k) {
    mag[k] = probe.xi[k].norm();
  }
  return arrival_time(probe.t, mag, threshold_fraction);
}

double convergence_slope(const std::vector<std::pair<double, double>>& pairs)
{
  if (pairs.size() < 3) {
    throw InputError("convergence slope needs at least 3 pairs");
  }
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [h, e] : pairs) {
    if (!(h > 0.0) || !(e > 0.0)) {
      throw InputError("convergence pairs must be positive");
    }
    sx += std::log(h);
    sy += std::log(e);
  }
  const double n = static_cast<double>(pairs.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [h, e] : pairs) {
    const double dx = std::log(h) - mx;
    sxy += dx * (std::log(e) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) {
    throw InputError("convergence pairs need distinct h");
  }
  return sxy / sxx;
}

double curl_consistency(const Mesh& mesh, const StateArray& states, const std::function<Vec3(const Vec3&)>& curl,
                        const std::function<bool(const Vec3&)>& region)
{
  double worst = 0.0;
  for (Index p = 0; p < mesh.size(); ++p) {
    const Vec3& x0 = mesh.particles[p].X0;
    if (region && !region(x0)) {
      continue;
    }
    worst = std::max(worst, (rotation_vector(states[p].Q) - 0.5 * curl(x0)).norm());
  }
  return worst;
}

std::string format_double(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace edem
