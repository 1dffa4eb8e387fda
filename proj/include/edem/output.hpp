#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "edem/mesh.hpp"
#include "edem/state.hpp"

namespace edem {

/// Legacy ASCII VTK frame: 8 points per cell placed rigidly by (X, Q), cell data eps_v and |Omega|.
void write_vtk_snapshot(const Mesh& mesh, const StateArray& states, const std::vector<double>& eps_v,
                        const std::string& path);

/// Comma-separated table with a header row and 17-significant-digit numbers.
class CsvWriter {
public:
  CsvWriter(const std::string& path, std::initializer_list<std::string> columns);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_ = 0;
};

}  // namespace edem
