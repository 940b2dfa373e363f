#ifndef TRIFLOW_MESH_IO_HPP
#define TRIFLOW_MESH_IO_HPP

#include <string>
#include <vector>

#include "triflow/mesh.hpp"

namespace triflow {

struct MeshFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Contents of a native mesh file (see FORMATS.md): shared corner nodes,
/// per-element connectivity, optional curved-face point grids at geometric
/// order `ngeo`, and tagged boundary quads.
struct MeshFile {
  int ngeo = 1;
  std::vector<Vec3> nodes;
  std::vector<ElementInput> elements;
  std::vector<BoundaryFaceInput> boundary;
};

/// Parses the native plain-text mesh grammar. Errors carry "path:line:"
/// prefixes.
MeshFile read_mesh_file(const std::string& path);
MeshFile parse_mesh_text(const std::string& text, const std::string& name);

/// Builds the solver mesh at polynomial order `order`. Curved-face data
/// requires ngeo == order (re-interpolation is out of scope); straight-sided
/// files (ngeo == 1) work at any order.
Mesh build_mesh_from_file(const MeshFile& file, int order);

}  // namespace triflow

#endif
