#ifndef TRIFLOW_MESH_HPP
#define TRIFLOW_MESH_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "triflow/nodal_basis.hpp"
#include "triflow/phase_model.hpp"

namespace triflow {

struct DegenerateElementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Local corner numbering: index = i + 2j + 4k for (xi,eta,zeta) in {-1,+1}.
/// Local sides: 0 xi=-1, 1 xi=+1, 2 eta=-1, 3 eta=+1, 4 zeta=-1, 5 zeta=+1.
/// A side's face coordinates (a,b) are the two reference coordinates that
/// remain free, in xi < eta < zeta order.

/// Element node index for tensor indices (i,j,k).
inline int node_index(int i, int j, int k, int np) {
  return i + np * (j + np * k);
}

/// Element node index of face node (a,b) on a local side.
int face_node_index(int side, int a, int b, int np);

/// Apply one of the 8 square symmetries to face coordinates.
std::pair<int, int> apply_orientation(int code, int a, int b, int n_max);

/// Per-node geometric data of one element.
struct ElementGeometry {
  std::vector<double> x, y, z;   ///< mapping at GL nodes
  std::vector<double> cov;       ///< covariant a_d, layout [(d*3+n)*npts + q]
  std::vector<double> m;         ///< scaled contravariant Ja^d, same layout
  std::vector<double> jac;       ///< J per node, > 0
  double volume = 0.0;           ///< quadrature volume integral of J
};

struct Face {
  int left = -1;
  int right = -1;     ///< -1 for boundary faces
  int side_l = -1;
  int side_r = -1;
  int orient = 0;     ///< right-side orientation code
  int tag = -1;       ///< boundary tag id, -1 for interior
  std::vector<int> nodes_l;  ///< element node index per face node (left)
  std::vector<int> nodes_r;  ///< same for the right element, orientation applied
  std::vector<double> nx, ny, nz, sj;  ///< outward unit normal (from left),
                                       ///< surface Jacobian, at left face nodes
  double area = 0.0;
  double beta = 0.0;  ///< SIP penalty parameter
};

/// Conforming hexahedral mesh with order-N geometry, curl-form metrics and
/// face connectivity. Immutable after construction.
struct Mesh {
  int order = 0;
  NodalBasis basis;
  int nelem = 0;
  int npts = 0;  ///< (N+1)^3
  int nfp = 0;   ///< (N+1)^2
  std::vector<std::array<Vec3, 8>> corners;
  std::vector<ElementGeometry> geom;
  std::vector<Face> faces;
  std::vector<std::string> tag_names;

  int num_interior_faces() const;
  int num_boundary_faces() const;
  int tag_id(const std::string& name) const;  ///< -1 if absent

  /// Max over elements and nodes of the metric-identity residual,
  /// relative to the element size scale.
  double metric_identity_residual() const;

  /// Max over elements of | sum_faces int n sJ dS | (discrete Gauss law).
  double watertightness_residual() const;
};

/// Raw element input: 8 corners plus optional curved data. Exactly one of
/// `mapping_nodes` (full (N+1)^3 grid) or `face_grids` entries may supply
/// curvature; straight-sided elements use the corners alone.
struct ElementInput {
  std::array<Vec3, 8> corners{};
  std::array<int, 8> corner_ids{};
  /// Optional curved faces: side -> (N+1)^2 points in face (a,b) ordering.
  std::map<int, std::vector<Vec3>> face_grids;
  /// Optional full mapping override at GL nodes.
  std::optional<std::vector<Vec3>> mapping_nodes;
};

struct BoundaryFaceInput {
  std::array<int, 4> corner_ids{};  ///< any order
  std::string tag;
};

/// Transfinite interpolation of one element: fills x,y,z of the geometry.
/// Throws DegenerateElementError when the corner ordering is inverted.
ElementGeometry build_mapping(const ElementInput& input,
                              const NodalBasis& basis);

/// Differentiates the mapping and fills covariant/contravariant metrics and
/// the Jacobian via the curl form. Throws DegenerateElementError when J <= 0.
void compute_metrics(ElementGeometry& geom, const NodalBasis& basis,
                     int element_id = -1);

/// Builds the full mesh: mappings, metrics, face pairing (hash on corner
/// ids), orientation detection and face geometry with penalty parameters.
Mesh build_mesh(const std::vector<ElementInput>& elements,
                const std::vector<BoundaryFaceInput>& boundary, int order);

/// Structured box generator with optional periodic directions and an
/// optional analytic deformation of the vertex/high-order node positions.
struct BoxSpec {
  int nx = 1, ny = 1, nz = 1;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1, z0 = 0, z1 = 1;
  std::array<bool, 3> periodic{false, false, false};
  /// Boundary tags in order xmin, xmax, ymin, ymax, zmin, zmax.
  std::array<std::string, 6> tags{"xmin", "xmax", "ymin",
                                  "ymax", "zmin", "zmax"};
  std::function<Vec3(const Vec3&)> deform;  ///< optional curving map
};
Mesh build_box_mesh(const BoxSpec& spec, int order);

/// Smooth periodic deformation of the unit box used for curved-mesh tests:
/// displaces nodes by amplitude * product-of-sines, period-compatible.
std::function<Vec3(const Vec3&)> sine_box_deform(const BoxSpec& spec,
                                                 double amplitude);

/// Maps the [-1,1]^2 cross-section (in y,z) of a box onto a disk of radius R,
/// keeping x as the pipe axis.
std::function<Vec3(const Vec3&)> cylinder_deform(double radius);

}  // namespace triflow

#endif
