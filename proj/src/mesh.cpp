#include "edem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>

#include "edem/errors.hpp"

namespace edem {

namespace {

// Outward, counter-clockwise corner loops of a VTK hexahedron: -i, +i, -j, +j, -k, +k.
constexpr std::array<std::array<int, 4>, 6> kHexFaces{{
    {3, 0, 4, 7},
    {1, 2, 6, 5},
    {0, 1, 5, 4},
    {2, 3, 7, 6},
    {0, 3, 2, 1},
    {4, 5, 6, 7},
}};

std::array<Vec3, 4> face_corners(const std::array<Vec3, 8>& corners, int face)
{
  std::array<Vec3, 4> out;
  for (int k = 0; k < 4; ++k) {
    out[k] = corners[kHexFaces[face][k]];
  }
  return out;
}

Vec3 deterministic_sign(Vec3 v)
{
  int largest = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(v[k]) > std::abs(v[largest]) * (1.0 + 1e-12)) {
      largest = k;
    }
  }
  return v[largest] < 0.0 ? Vec3(-v) : v;
}

void set_d_coeffs(ParticleGeom& p)
{
  const double half_trace = 0.5 * p.principal_inertia.sum();
  p.d_coeffs = Vec3::Constant(half_trace) - p.principal_inertia;
}

// Volume, centroid and inertia of a hexahedral cell split into 24 tetrahedra
// (cell center, face center, one face edge).
void fill_hex_mass_properties(ParticleGeom& p, double rho)
{
  Vec3 apex = Vec3::Zero();
  for (const auto& c : p.corners) {
    apex += c;
  }
  apex /= 8.0;

  double volume = 0.0;
  Vec3 first = Vec3::Zero();
  Mat3 second = Mat3::Zero();
  for (int f = 0; f < 6; ++f) {
    const auto quad = face_corners(p.corners, f);
    const Vec3 fc = 0.25 * (quad[0] + quad[1] + quad[2] + quad[3]) - apex;
    for (int e = 0; e < 4; ++e) {
      const Vec3 a = quad[e] - apex;
      const Vec3 b = quad[(e + 1) % 4] - apex;
      const double v = fc.dot(a.cross(b)) / 6.0;
      if (!(v > 0.0)) {
        throw MeshError("degenerate cell " + std::to_string(p.id) + ": non-positive Jacobian");
      }
      const Vec3 s = a + b + fc;  // apex is the origin
      volume += v;
      first += v * s / 4.0;
      second += v / 20.0 * (a * a.transpose() + b * b.transpose() + fc * fc.transpose() + s * s.transpose());
    }
  }
  const Vec3 c = first / volume;
  const Mat3 central = second - volume * c * c.transpose();

  p.volume = volume;
  p.X0 = apex + c;
  p.mass = rho * volume;
  const Mat3 inertia = rho * (central.trace() * Mat3::Identity() - central);
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  p.principal_inertia = eig.eigenvalues();
  Mat3 axes = eig.eigenvectors();
  for (int k = 0; k < 3; ++k) {
    axes.col(k) = deterministic_sign(axes.col(k));
  }
  if (axes.determinant() < 0.0) {
    axes.col(2) = -axes.col(2);
  }
  p.principal_axes = axes;
  set_d_coeffs(p);
}

void add_free_face(ParticleGeom& p, std::span<const Vec3> polygon)
{
  const FaceGeometry g = face_geometry(polygon);
  FreeFace f;
  f.area = g.area;
  f.centroid = g.centroid;
  f.normal = g.normal;
  if (f.normal.dot(g.centroid - p.X0) < 0.0) {
    f.normal = -f.normal;
  }
  f.ghost_distance = 2.0 * std::abs((g.centroid - p.X0).dot(f.normal));
  p.free_volume += f.area * f.ghost_distance / 6.0;
  p.free_faces.push_back(f);
}

void finalize(Mesh& mesh)
{
  mesh.adjacency.assign(mesh.particles.size(), {});
  for (Index l = 0; l < mesh.links.size(); ++l) {
    mesh.adjacency[mesh.links[l].i].push_back(l);
    mesh.adjacency[mesh.links[l].j].push_back(l);
  }
  for (const auto& p : mesh.particles) {
    if (mesh.corrected_volume(p.id) <= 0.05 * p.volume) {
      throw ConfigError("corrected volume of particle " + std::to_string(p.id) +
                        " is not positive enough for nu = " + std::to_string(mesh.material.nu));
    }
  }
}

// Structured hexahedral grid given a node map; direction 0 may wrap around.
struct HexGrid {
  std::array<int, 3> n{1, 1, 1};
  bool periodic0 = false;
  std::function<Vec3(int, int, int)> node;
};

Mesh build_hex_grid(const HexGrid& grid, const MaterialParams& material)
{
  const auto [n0, n1, n2] = grid.n;
  if (grid.periodic0 && n0 < 3) {
    throw ConfigError("periodic direction needs at least 3 cells");
  }
  Mesh mesh;
  mesh.material = material;
  const auto cell = [&](int i, int j, int k) { return box_index(grid.n, i, j, k); };
  const auto wrap = [&](int i) { return grid.periodic0 ? i % n0 : i; };

  mesh.particles.resize(static_cast<Index>(n0) * n1 * n2);
  for (int k = 0; k < n2; ++k) {
    for (int j = 0; j < n1; ++j) {
      for (int i = 0; i < n0; ++i) {
        ParticleGeom& p = mesh.particles[cell(i, j, k)];
        p.id = cell(i, j, k);
        const int ip = wrap(i + 1);
        p.corners = {grid.node(i, j, k),      grid.node(ip, j, k),      grid.node(ip, j + 1, k),
                     grid.node(i, j + 1, k),  grid.node(i, j, k + 1),  grid.node(ip, j, k + 1),
                     grid.node(ip, j + 1, k + 1), grid.node(i, j + 1, k + 1)};
        fill_hex_mass_properties(p, material.rho);
      }
    }
  }

  for (int k = 0; k < n2; ++k) {
    for (int j = 0; j < n1; ++j) {
      for (int i = 0; i < n0; ++i) {
        ParticleGeom& p = mesh.particles[cell(i, j, k)];
        const std::array<bool, 3> has_next{grid.periodic0 || i + 1 < n0, j + 1 < n1, k + 1 < n2};
        const std::array<Index, 3> next{cell(wrap(i + 1), j, k), j + 1 < n1 ? cell(i, j + 1, k) : 0,
                                        k + 1 < n2 ? cell(i, j, k + 1) : 0};
        for (int axis = 0; axis < 3; ++axis) {
          if (has_next[axis]) {
            const auto face = face_corners(p.corners, 2 * axis + 1);
            mesh.links.push_back(link_geometry(p, mesh.particles[next[axis]], face, material));
          }
        }
        const std::array<bool, 6> free{!grid.periodic0 && i == 0, !grid.periodic0 && i == n0 - 1,
                                       j == 0, j == n1 - 1, k == 0, k == n2 - 1};
        for (int f = 0; f < 6; ++f) {
          if (free[f]) {
            const auto face = face_corners(p.corners, f);
            add_free_face(p, face);
          }
        }
      }
    }
  }
  finalize(mesh);
  return mesh;
}

}  // namespace

void MaterialParams::validate() const
{
  if (!(E > 0.0)) {
    throw ConfigError("Young modulus must be positive");
  }
  if (!(rho > 0.0)) {
    throw ConfigError("density must be positive");
  }
  if (!(nu > -1.0 && nu < 0.5)) {
    throw ConfigError("Poisson ratio must lie in (-1, 0.5)");
  }
}

double Mesh::flexion_rest_energy() const
{
  double u = 0.0;
  for (const auto& l : links) {
    u -= l.S / l.D0 * (l.alpha_n + l.alpha_s + l.alpha_t);
  }
  return u;
}

double Mesh::min_link_distance() const
{
  double h = std::numeric_limits<double>::infinity();
  for (const auto& l : links) {
    h = std::min(h, l.D0);
  }
  if (links.empty()) {
    for (const auto& p : particles) {
      h = std::min(h, std::cbrt(p.volume));
    }
  }
  return h;
}

FlexionCoefficients flexion_coefficients(double Is, double It, double S, double E, double nu)
{
  if (!(S > 0.0) || Is < 0.0 || It < 0.0) {
    throw MeshError("flexion coefficients need S > 0 and non-negative moments");
  }
  const double scale = E / (4.0 * (1.0 + nu) * S);
  return {scale * (1.0 + 2.0 * nu) * (Is + It), scale * ((3.0 + 2.0 * nu) * Is - (1.0 + 2.0 * nu) * It),
          scale * ((3.0 + 2.0 * nu) * It - (1.0 + 2.0 * nu) * Is)};
}

FaceGeometry face_geometry(std::span<const Vec3> polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3) {
    throw MeshError("face needs at least three vertices");
  }
  Vec3 mean = Vec3::Zero();
  for (const auto& v : polygon) {
    mean += v;
  }
  mean /= static_cast<double>(n);

  // Least-squares plane normal, oriented along the polygon's area vector.
  Vec3 area_vector = Vec3::Zero();
  Mat3 scatter = Mat3::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 a = polygon[k] - mean;
    const Vec3 b = polygon[(k + 1) % n] - mean;
    area_vector += 0.5 * a.cross(b);
    scatter += a * a.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  Vec3 normal = eig.eigenvectors().col(0);
  if (normal.dot(area_vector) < 0.0) {
    normal = -normal;
  }

  std::vector<Vec3> flat(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 r = polygon[k] - mean;
    flat[k] = r - r.dot(normal) * normal;
  }

  double area = 0.0;
  Vec3 first = Vec3::Zero();
  Mat3 second = Mat3::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& a = flat[k];
    const Vec3& b = flat[(k + 1) % n];
    const double tri = 0.5 * a.cross(b).dot(normal);
    const Vec3 s = a + b;
    area += tri;
    first += tri * s / 3.0;
    second += tri / 12.0 * (a * a.transpose() + b * b.transpose() + s * s.transpose());
  }
  if (!(area > 0.0)) {
    throw MeshError("zero-area face");
  }
  const Vec3 c = first / area;
  FaceGeometry g;
  g.area = area;
  g.centroid = mean + c;
  g.normal = normal;
  g.second_moment = second - area * c * c.transpose();
  return g;
}

Vec3 default_tangent(const Vec3& n)
{
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(n[k]) < std::abs(n[axis])) {
      axis = k;
    }
  }
  return n.cross(Vec3::Unit(axis)).normalized();
}

Link link_geometry(const ParticleGeom& a, const ParticleGeom& b, std::span<const Vec3> shared_face,
                   const MaterialParams& material)
{
  const FaceGeometry g = face_geometry(shared_face);
  const double scale = std::sqrt(g.area);
  for (const auto& v : shared_face) {
    if (std::abs((v - g.centroid).dot(g.normal)) > 1e-9 * scale) {
      throw MeshError("shared face between " + std::to_string(a.id) + " and " + std::to_string(b.id) +
                      " is not planar");
    }
  }
  Link l;
  l.i = a.id;
  l.j = b.id;
  l.S = g.area;
  const Vec3 d = b.X0 - a.X0;
  l.offset0 = d;
  l.D0 = d.norm();
  if (!(l.D0 > 0.0)) {
    throw MeshError("coincident cell centers");
  }
  l.n0 = d / l.D0;
  l.lever_i = g.centroid - a.X0;
  l.lever_j = g.centroid - b.X0;

  // Align s0 with the dominant principal direction of the face when it is unambiguous.
  const Mat3 proj = Mat3::Identity() - l.n0 * l.n0.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(proj * g.second_moment * proj);
  const double hi = eig.eigenvalues()(2);
  const double mid = eig.eigenvalues()(1);
  if (hi - mid > 1e-9 * (hi + mid)) {
    l.s0 = deterministic_sign(eig.eigenvectors().col(2));
    l.s0 = (l.s0 - l.s0.dot(l.n0) * l.n0).normalized();
  } else {
    l.s0 = default_tangent(l.n0);
  }
  l.t0 = l.n0.cross(l.s0);
  l.Is = l.s0.dot(g.second_moment * l.s0);
  l.It = l.t0.dot(g.second_moment * l.t0);
  const auto alpha = flexion_coefficients(l.Is, l.It, l.S, material.E, material.nu);
  l.alpha_n = alpha.alpha_n;
  l.alpha_s = alpha.alpha_s;
  l.alpha_t = alpha.alpha_t;
  return l;
}

Mesh build_box_lattice(const Vec3& extent, const std::array<int, 3>& counts, const MaterialParams& material,
                       const BoxOptions& options)
{
  material.validate();
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < 1) {
      throw ConfigError("box lattice counts must be >= 1");
    }
    if (!(extent[a] > 0.0)) {
      throw ConfigError("box lattice extents must be positive");
    }
  }
  const Vec3 pitch(extent.x() / counts[0], extent.y() / counts[1], extent.z() / counts[2]);
  Mesh mesh;
  mesh.material = material;
  mesh.particles.resize(static_cast<Index>(counts[0]) * counts[1] * counts[2]);

  const double volume = pitch.prod();
  for (int k = 0; k < counts[2]; ++k) {
    for (int j = 0; j < counts[1]; ++j) {
      for (int i = 0; i < counts[0]; ++i) {
        ParticleGeom& p = mesh.particles[box_index(counts, i, j, k)];
        p.id = box_index(counts, i, j, k);
        const Vec3 lo = options.origin + Vec3(i * pitch.x(), j * pitch.y(), k * pitch.z());
        const Vec3 hi = lo + pitch;
        p.X0 = lo + 0.5 * pitch;
        p.corners = {Vec3(lo.x(), lo.y(), lo.z()), Vec3(hi.x(), lo.y(), lo.z()), Vec3(hi.x(), hi.y(), lo.z()),
                     Vec3(lo.x(), hi.y(), lo.z()), Vec3(lo.x(), lo.y(), hi.z()), Vec3(hi.x(), lo.y(), hi.z()),
                     Vec3(hi.x(), hi.y(), hi.z()), Vec3(lo.x(), hi.y(), hi.z())};
        p.volume = volume;
        p.mass = material.rho * volume;
        const Vec3 sq = pitch.cwiseProduct(pitch);
        p.principal_inertia = p.mass / 12.0 * Vec3(sq.y() + sq.z(), sq.x() + sq.z(), sq.x() + sq.y());
        p.principal_axes = Mat3::Identity();
        set_d_coeffs(p);
      }
    }
  }

  for (int k = 0; k < counts[2]; ++k) {
    for (int j = 0; j < counts[1]; ++j) {
      for (int i = 0; i < counts[0]; ++i) {
        ParticleGeom& p = mesh.particles[box_index(counts, i, j, k)];
        const std::array<int, 3> ijk{i, j, k};
        for (int axis = 0; axis < 3; ++axis) {
          if (ijk[axis] + 1 < counts[axis]) {
            std::array<int, 3> nb = ijk;
            nb[axis] += 1;
            const auto face = face_corners(p.corners, 2 * axis + 1);
            mesh.links.push_back(link_geometry(p, mesh.particles[box_index(counts, nb[0], nb[1], nb[2])], face,
                                               material));
          }
        }
        for (int f = 0; f < 6; ++f) {
          const int axis = f / 2;
          const bool boundary = (f % 2 == 0) ? ijk[axis] == 0 : ijk[axis] == counts[axis] - 1;
          if (boundary && !options.constrained[axis]) {
            const auto face = face_corners(p.corners, f);
            add_free_face(p, face);
          }
        }
      }
    }
  }
  finalize(mesh);
  return mesh;
}

Mesh build_mapped_shell(const ShellSurface& surface, const MaterialParams& material)
{
  material.validate();
  HexGrid grid;
  if (const auto* cyl = std::get_if<CylinderShell>(&surface)) {
    if (!(cyl->radius > 0.0 && cyl->height > 0.0 && cyl->thickness > 0.0 && cyl->thickness < 2.0 * cyl->radius)) {
      throw ConfigError("cylinder needs positive radius, height and thickness < diameter");
    }
    if (*std::min_element(cyl->counts.begin(), cyl->counts.end()) < 1) {
      throw ConfigError("cylinder counts must be >= 1");
    }
    grid.n = cyl->counts;
    grid.periodic0 = true;
    const CylinderShell c = *cyl;
    grid.node = [c](int i, int j, int k) {
      const double phi = 2.0 * std::numbers::pi * (i % c.counts[0]) / c.counts[0];
      const double r = c.radius - 0.5 * c.thickness + c.thickness * k / c.counts[2];
      const double z = c.height * j / c.counts[1];
      return Vec3(r * std::cos(phi), r * std::sin(phi), z);
    };
  } else {
    const auto& hemi = std::get<HemisphereShell>(surface);
    if (!(hemi.radius > 0.0 && hemi.thickness > 0.0 && hemi.thickness < hemi.radius)) {
      throw ConfigError("hemisphere needs positive radius and thickness < radius");
    }
    if (!(hemi.cutout_deg > 0.0 && hemi.cutout_deg < 90.0)) {
      throw ConfigError("hemisphere cutout angle must lie in (0, 90) degrees");
    }
    if (*std::min_element(hemi.counts.begin(), hemi.counts.end()) < 1) {
      throw ConfigError("hemisphere counts must be >= 1");
    }
    // Grid ordering (longitude, latitude, radius) keeps the cells positively oriented.
    grid.n = {hemi.counts[1], hemi.counts[0], hemi.counts[2]};
    grid.periodic0 = true;
    const HemisphereShell h = hemi;
    grid.node = [h](int i, int j, int k) {
      const double lon = 2.0 * std::numbers::pi * (i % h.counts[1]) / h.counts[1];
      const double lat_max = (90.0 - h.cutout_deg) * std::numbers::pi / 180.0;
      const double lat = lat_max * j / h.counts[0];
      const double r = h.radius - 0.5 * h.thickness + h.thickness * k / h.counts[2];
      return Vec3(r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat));
    };
  }
  return build_hex_grid(grid, material);
}

void write_mesh_vtk(const Mesh& mesh, const std::string& path)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path);
  }
  out.precision(17);
  out << "# vtk DataFile Version 3.0\nreference mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 8 * mesh.size() << " double\n";
  for (const auto& p : mesh.particles) {
    for (const auto& c : p.corners) {
      out << c.x() << ' ' << c.y() << ' ' << c.z() << '\n';
    }
  }
  out << "CELLS " << mesh.size() << ' ' << 9 * mesh.size() << '\n';
  for (Index c = 0; c < mesh.size(); ++c) {
    out << 8;
    for (Index k = 0; k < 8; ++k) {
      out << ' ' << 8 * c + k;
    }
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.size() << '\n';
  for (Index c = 0; c < mesh.size(); ++c) {
    out << "12\n";
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace edem
