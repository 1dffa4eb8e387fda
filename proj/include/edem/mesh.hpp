#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "edem/types.hpp"

namespace edem {

/// Stress-free face of a particle, closed by a mirror ghost particle.
struct FreeFace {
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // outward
  double ghost_distance = 0.0;  // twice the center-to-plane distance
};

struct ParticleGeom {
  Index id = 0;
  Vec3 X0 = Vec3::Zero();
  double volume = 0.0;
  double mass = 0.0;
  Vec3 principal_inertia = Vec3::Zero();
  // Columns are the principal axes e1, e2, e3 in the world frame (right-handed).
  Mat3 principal_axes = Mat3::Identity();
  Vec3 d_coeffs = Vec3::Zero();
  double free_volume = 0.0;
  std::vector<FreeFace> free_faces;
  // Cell corners in VTK hexahedron order, reference configuration.
  std::array<Vec3, 8> corners{};
};

struct Link {
  Index i = 0;
  Index j = 0;
  double S = 0.0;
  double D0 = 0.0;
  Vec3 n0 = Vec3::UnitX();
  Vec3 s0 = Vec3::UnitY();
  Vec3 t0 = Vec3::UnitZ();
  Vec3 lever_i = Vec3::Zero();  // X_I^0 -> P_IJ
  Vec3 lever_j = Vec3::Zero();  // X_J^0 -> P_IJ
  Vec3 offset0 = Vec3::Zero();  // X_J^0 - X_I^0
  double Is = 0.0;
  double It = 0.0;
  double alpha_n = 0.0;
  double alpha_s = 0.0;
  double alpha_t = 0.0;
};

struct Mesh {
  std::vector<ParticleGeom> particles;
  std::vector<Link> links;
  // Incident link indices per particle, in increasing link order.
  std::vector<std::vector<Index>> adjacency;
  MaterialParams material;

  Index size() const { return particles.size(); }

  /// V_I + 3 nu / (1 - 2 nu) V_I^l, the denominator of the volumetric strain.
  double corrected_volume(Index p) const
  {
    return particles[p].volume + material.free_volume_weight() * particles[p].free_volume;
  }

  /// Flexion energy sum at rest, -sum (S/D0)(alpha_n + alpha_s + alpha_t).
  double flexion_rest_energy() const;

  /// Smallest initial center-to-center distance over all links.
  double min_link_distance() const;
};

struct FlexionCoefficients {
  double alpha_n = 0.0;
  double alpha_s = 0.0;
  double alpha_t = 0.0;
};

/// Flexion/torsion coefficients matching the beam bending and torsion stiffness of an interface.
FlexionCoefficients flexion_coefficients(double Is, double It, double S, double E, double nu);

/// Area, centroid and second-moment tensor about the centroid of a (nearly) planar polygon.
struct FaceGeometry {
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  Mat3 second_moment = Mat3::Zero();
};

/// Projects the polygon on its least-squares plane first. Vertices must be ordered around the boundary.
FaceGeometry face_geometry(std::span<const Vec3> polygon);

/// Builds the interface record between two cells sharing a planar face.
Link link_geometry(const ParticleGeom& a, const ParticleGeom& b, std::span<const Vec3> shared_face,
                   const MaterialParams& material);

/// Deterministic interface tangent s0 for normal n: n x a with a the global axis least aligned with n.
Vec3 default_tangent(const Vec3& n);

struct BoxOptions {
  Vec3 origin = Vec3::Zero();
  // Boundary faces normal to a constrained axis are neither linked nor stress-free
  // (zero normal strain in that direction, e.g. plane strain with a single layer).
  std::array<bool, 3> constrained{false, false, false};
};

/// Particle index i + nx (j + ny k).
inline Index box_index(const std::array<int, 3>& counts, int i, int j, int k)
{
  return static_cast<Index>(i + counts[0] * (j + counts[1] * k));
}

Mesh build_box_lattice(const Vec3& extent, const std::array<int, 3>& counts, const MaterialParams& material,
                       const BoxOptions& options = {});

struct CylinderShell {
  double radius = 1.0;
  double height = 2.0;
  double thickness = 0.01;
  // {around the perimeter (periodic), along the height, through the thickness}
  std::array<int, 3> counts{50, 20, 1};
};

struct HemisphereShell {
  double radius = 10.0;
  double thickness = 0.04;
  double cutout_deg = 18.0;  // polar half-angle of the hole
  // {in latitude, in longitude (periodic), through the thickness}
  std::array<int, 3> counts{16, 64, 1};
};

using ShellSurface = std::variant<CylinderShell, HemisphereShell>;

Mesh build_mapped_shell(const ShellSurface& surface, const MaterialParams& material);

/// Legacy ASCII VTK dump of the reference cells.
void write_mesh_vtk(const Mesh& mesh, const std::string& path);

}  // namespace edem
