#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "edem/mechanics.hpp"

namespace edem {

struct EnergyReport {
  double t = 0.0;
  double kinetic_trans = 0.0;
  double kinetic_rot = 0.0;
  double U_t = 0.0;
  double U_d = 0.0;
  double U_f = 0.0;
  double total = 0.0;
};

/// Energy with momenta centered at the current positions: T^n = T^{n-1/2} + dt/2 F^n and
/// likewise for the body angular momentum. With forces == nullptr the stored momenta are
/// used as they are.
EnergyReport total_energy(const Mesh& mesh, const StateArray& states, const ForceField* forces = nullptr,
                          double dt = 0.0, double t = 0.0);

struct Momenta {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();  // about the origin
};

/// Sum of T_half, and sum of X ^ T_half + Qp unskew(D Z - Z^T D). Both are invariants of
/// the discrete scheme in the absence of external loads and constraints.
Momenta momenta(const Mesh& mesh, const StateArray& states);

/// Axis-angle vector of a rotation matrix.
Vec3 rotation_vector(const Mat3& Q);

struct ProbeRecord {
  Index particle = 0;
  std::vector<double> t;
  std::vector<Vec3> xi;
  std::vector<Vec3> theta;

  void sample(const Mesh& mesh, const StateArray& states, double time);
};

/// First time |xi| exceeds threshold_fraction * max|xi|, interpolated linearly.
double arrival_time(const ProbeRecord& probe, double threshold_fraction);
double arrival_time(const std::vector<double>& t, const std::vector<double>& signal, double threshold_fraction);

/// Least-squares slope of log(error) against log(h).
double convergence_slope(const std::vector<std::pair<double, double>>& pairs);

/// Max over particles accepted by region of |theta - curl(X0) / 2|.
double curl_consistency(const Mesh& mesh, const StateArray& states, const std::function<Vec3(const Vec3&)>& curl,
                        const std::function<bool(const Vec3&)>& region = {});

/// Decimal text with 17 significant digits.
std::string format_double(double x);

}  // namespace edem
