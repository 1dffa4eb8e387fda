#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

namespace edem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index = std::size_t;

/// Cross-product matrix: skew(a) * b == a.cross(b).
inline Mat3 skew(const Vec3& a)
{
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

/// Axial vector of the skew part of m (inverse of skew on skew matrices).
inline Vec3 unskew(const Mat3& m)
{
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

/// Rotation matrix exp(skew(theta)) (Rodrigues).
inline Mat3 rotation_from_vector(const Vec3& theta)
{
  const double angle = theta.norm();
  if (angle == 0.0) {
    return Mat3::Identity();
  }
  return Eigen::AngleAxisd(angle, theta / angle).toRotationMatrix();
}

struct MaterialParams {
  double E = 1.0;
  double nu = 0.0;
  double rho = 1.0;

  /// First Lame coefficient E nu / ((1 + nu)(1 - 2 nu)).
  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  /// Link stretch modulus E / (1 + nu).
  double link_modulus() const { return E / (1.0 + nu); }
  /// Weight 3 nu / (1 - 2 nu) of the free volume in the corrected particle volume.
  double free_volume_weight() const { return 3.0 * nu / (1.0 - 2.0 * nu); }

  double p_wave_speed() const { return std::sqrt(E * (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu) * rho)); }
  double s_wave_speed() const { return std::sqrt(E / (2.0 * (1.0 + nu) * rho)); }

  /// Throws ConfigError when outside E > 0, rho > 0, -1 < nu < 0.5.
  void validate() const;
};

}  // namespace edem
