#include "edem/output.hpp"

#include <stdexcept>

#include "edem/diagnostics.hpp"

namespace edem {

void write_vtk_snapshot(const Mesh& mesh, const StateArray& states, const std::vector<double>& eps_v,
                        const std::string& path)
{
  if (states.size() != mesh.size() || eps_v.size() != mesh.size()) {
    throw std::invalid_argument("snapshot arrays do not match the mesh");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path);
  }
  const Index n = mesh.size();
  out << "# vtk DataFile Version 3.0\nparticle snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 8 * n << " double\n";
  for (Index p = 0; p < n; ++p) {
    const ParticleGeom& g = mesh.particles[p];
    for (const Vec3& c : g.corners) {
      const Vec3 x = states[p].X + states[p].Q * (c - g.X0);
      out << format_double(x.x()) << ' ' << format_double(x.y()) << ' ' << format_double(x.z()) << '\n';
    }
  }
  out << "CELLS " << n << ' ' << 9 * n << '\n';
  for (Index c = 0; c < n; ++c) {
    out << 8;
    for (Index k = 0; k < 8; ++k) {
      out << ' ' << 8 * c + k;
    }
    out << '\n';
  }
  out << "CELL_TYPES " << n << '\n';
  for (Index c = 0; c < n; ++c) {
    out << "12\n";
  }
  out << "CELL_DATA " << n << "\nSCALARS eps_v double 1\nLOOKUP_TABLE default\n";
  for (double e : eps_v) {
    out << format_double(e) << '\n';
  }
  out << "SCALARS omega double 1\nLOOKUP_TABLE default\n";
  for (Index p = 0; p < n; ++p) {
    out << format_double(derived_kinematics(mesh.particles[p], states[p]).Omega.norm()) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

CsvWriter::CsvWriter(const std::string& path, std::initializer_list<std::string> columns)
    : out_(path), path_(path), columns_(columns.size())
{
  if (!out_) {
    throw std::runtime_error("cannot open " + path);
  }
  bool first = true;
  for (const auto& c : columns) {
    out_ << (first ? "" : ",") << c;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values)
{
  if (values.size() != columns_) {
    throw std::invalid_argument("row width does not match header of " + path_);
  }
  bool first = true;
  for (double v : values) {
    out_ << (first ? "" : ",") << format_double(v);
    first = false;
  }
  out_ << '\n';
  if (!out_) {
    throw std::runtime_error("write failed: " + path_);
  }
}

}  // namespace edem
