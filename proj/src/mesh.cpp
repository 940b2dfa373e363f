#include "triflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace triflow {

namespace {

// Local corner indices of each side, in (a,b) row-major order (b outer).
constexpr int kSideCorners[6][4] = {
    {0, 2, 4, 6},  // xi = -1 : (j,k)
    {1, 3, 5, 7},  // xi = +1
    {0, 1, 4, 5},  // eta = -1 : (i,k)
    {2, 3, 6, 7},  // eta = +1
    {0, 1, 2, 3},  // zeta = -1 : (i,j)
    {4, 5, 6, 7},  // zeta = +1
};

int side_direction(int side) { return side / 2; }
bool side_positive(int side) { return side % 2 == 1; }

Vec3 trilinear(const std::array<Vec3, 8>& c, double xi, double eta,
               double zeta) {
  Vec3 out{0.0, 0.0, 0.0};
  for (int n = 0; n < 8; ++n) {
    const double wx = (n & 1) ? 0.5 * (1.0 + xi) : 0.5 * (1.0 - xi);
    const double wy = (n & 2) ? 0.5 * (1.0 + eta) : 0.5 * (1.0 - eta);
    const double wz = (n & 4) ? 0.5 * (1.0 + zeta) : 0.5 * (1.0 - zeta);
    for (int d = 0; d < 3; ++d) out[d] += wx * wy * wz * c[n][d];
  }
  return out;
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Trilinear Jacobian sample at a corner of the reference cube.
double corner_jacobian(const std::array<Vec3, 8>& c, int n) {
  const double xi = (n & 1) ? 1.0 : -1.0;
  const double eta = (n & 2) ? 1.0 : -1.0;
  const double zeta = (n & 4) ? 1.0 : -1.0;
  const double h = 1e-4;
  auto at = [&](double a, double b, double g) { return trilinear(c, a, b, g); };
  Vec3 a1, a2, a3;
  for (int d = 0; d < 3; ++d) {
    a1[d] = (at(xi + (xi < 0 ? h : 0), eta, zeta)[d] -
             at(xi - (xi > 0 ? h : 0), eta, zeta)[d]) / h;
    a2[d] = (at(xi, eta + (eta < 0 ? h : 0), zeta)[d] -
             at(xi, eta - (eta > 0 ? h : 0), zeta)[d]) / h;
    a3[d] = (at(xi, eta, zeta + (zeta < 0 ? h : 0))[d] -
             at(xi, eta, zeta - (zeta > 0 ? h : 0))[d]) / h;
  }
  return dot(a1, cross(a2, a3));
}

}  // namespace

int face_node_index(int side, int a, int b, int np) {
  const int n = np - 1;
  switch (side) {
    case 0: return node_index(0, a, b, np);
    case 1: return node_index(n, a, b, np);
    case 2: return node_index(a, 0, b, np);
    case 3: return node_index(a, n, b, np);
    case 4: return node_index(a, b, 0, np);
    case 5: return node_index(a, b, n, np);
    default: throw std::invalid_argument("face_node_index: bad side");
  }
}

std::pair<int, int> apply_orientation(int code, int a, int b, int n) {
  switch (code) {
    case 0: return {a, b};
    case 1: return {b, a};
    case 2: return {n - a, b};
    case 3: return {b, n - a};
    case 4: return {n - a, n - b};
    case 5: return {n - b, n - a};
    case 6: return {a, n - b};
    case 7: return {n - b, a};
    default: throw std::invalid_argument("apply_orientation: bad code");
  }
}

ElementGeometry build_mapping(const ElementInput& input,
                              const NodalBasis& basis) {
  const int np = basis.num_points();
  const int npts = np * np * np;
  ElementGeometry g;
  g.x.resize(npts);
  g.y.resize(npts);
  g.z.resize(npts);

  for (int n = 0; n < 8; ++n) {
    if (corner_jacobian(input.corners, n) <= 0.0)
      throw DegenerateElementError(
          "build_mapping: inverted corner ordering (negative Jacobian sample)");
  }

  if (input.mapping_nodes) {
    if (static_cast<int>(input.mapping_nodes->size()) != npts)
      throw std::invalid_argument("build_mapping: mapping_nodes size mismatch");
    for (int q = 0; q < npts; ++q) {
      g.x[q] = (*input.mapping_nodes)[q][0];
      g.y[q] = (*input.mapping_nodes)[q][1];
      g.z[q] = (*input.mapping_nodes)[q][2];
    }
    return g;
  }

  // Face grids; straight sides fall back to the bilinear interpolant of the
  // side's corners.
  std::array<std::vector<Vec3>, 6> face;
  for (int s = 0; s < 6; ++s) {
    auto it = input.face_grids.find(s);
    if (it != input.face_grids.end()) {
      if (static_cast<int>(it->second.size()) != np * np)
        throw std::invalid_argument("build_mapping: face grid size mismatch");
      face[s] = it->second;
    } else {
      face[s].resize(np * np);
      const auto& sc = kSideCorners[s];
      for (int b = 0; b < np; ++b)
        for (int a = 0; a < np; ++a) {
          const double u = basis.nodes[a], v = basis.nodes[b];
          for (int d = 0; d < 3; ++d)
            face[s][a + np * b][d] =
                0.25 * ((1 - u) * (1 - v) * input.corners[sc[0]][d] +
                        (1 + u) * (1 - v) * input.corners[sc[1]][d] +
                        (1 - u) * (1 + v) * input.corners[sc[2]][d] +
                        (1 + u) * (1 + v) * input.corners[sc[3]][d]);
        }
    }
  }

  const int n = np - 1;
  auto F = [&](int s, int a, int b) -> const Vec3& { return face[s][a + np * b]; };

  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        const double xi = basis.nodes[i], eta = basis.nodes[j],
                     zeta = basis.nodes[k];
        const double lx = 0.5 * (1 - xi), rx = 0.5 * (1 + xi);
        const double ly = 0.5 * (1 - eta), ry = 0.5 * (1 + eta);
        const double lz = 0.5 * (1 - zeta), rz = 0.5 * (1 + zeta);
        Vec3 X{0, 0, 0};
        for (int d = 0; d < 3; ++d) {
          const double p1 = lx * F(0, j, k)[d] + rx * F(1, j, k)[d];
          const double p2 = ly * F(2, i, k)[d] + ry * F(3, i, k)[d];
          const double p3 = lz * F(4, i, j)[d] + rz * F(5, i, j)[d];
          // Edge blends (Boolean-sum corrections).
          const double p12 = lx * ly * F(0, 0, k)[d] + rx * ly * F(1, 0, k)[d] +
                             lx * ry * F(0, n, k)[d] + rx * ry * F(1, n, k)[d];
          const double p13 = lx * lz * F(0, j, 0)[d] + rx * lz * F(1, j, 0)[d] +
                             lx * rz * F(0, j, n)[d] + rx * rz * F(1, j, n)[d];
          const double p23 = ly * lz * F(2, i, 0)[d] + ry * lz * F(3, i, 0)[d] +
                             ly * rz * F(2, i, n)[d] + ry * rz * F(3, i, n)[d];
          const double p123 = trilinear(input.corners, xi, eta, zeta)[d];
          X[d] = p1 + p2 + p3 - p12 - p13 - p23 + p123;
        }
        const int q = node_index(i, j, k, np);
        g.x[q] = X[0];
        g.y[q] = X[1];
        g.z[q] = X[2];
      }
  return g;
}

namespace {

// d/dxi^dir of a nodal scalar field, in place into `out`.
void tensor_derivative(const NodalBasis& basis, const std::vector<double>& f,
                       int dir, std::vector<double>& out) {
  const int np = basis.num_points();
  out.assign(f.size(), 0.0);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        double s = 0.0;
        for (int m = 0; m < np; ++m) {
          int q;
          double d;
          if (dir == 0) {
            q = node_index(m, j, k, np);
            d = basis.d(i, m);
          } else if (dir == 1) {
            q = node_index(i, m, k, np);
            d = basis.d(j, m);
          } else {
            q = node_index(i, j, m, np);
            d = basis.d(k, m);
          }
          s += d * f[q];
        }
        out[node_index(i, j, k, np)] = s;
      }
}

}  // namespace

void compute_metrics(ElementGeometry& g, const NodalBasis& basis,
                     int element_id) {
  const int np = basis.num_points();
  const int npts = np * np * np;
  const std::array<const std::vector<double>*, 3> X{&g.x, &g.y, &g.z};

  // Covariant basis a_d = dX/dxi^d.
  g.cov.assign(9 * npts, 0.0);
  std::vector<double> tmp;
  for (int d = 0; d < 3; ++d)
    for (int nc = 0; nc < 3; ++nc) {
      tensor_derivative(basis, *X[nc], d, tmp);
      std::copy(tmp.begin(), tmp.end(), g.cov.begin() + (d * 3 + nc) * npts);
    }

  // Jacobian from the covariant triple product.
  g.jac.assign(npts, 0.0);
  for (int q = 0; q < npts; ++q) {
    Vec3 a1, a2, a3;
    for (int nc = 0; nc < 3; ++nc) {
      a1[nc] = g.cov[(0 * 3 + nc) * npts + q];
      a2[nc] = g.cov[(1 * 3 + nc) * npts + q];
      a3[nc] = g.cov[(2 * 3 + nc) * npts + q];
    }
    g.jac[q] = dot(a1, cross(a2, a3));
    if (g.jac[q] <= 0.0)
      throw DegenerateElementError(
          "compute_metrics: non-positive Jacobian in element " +
          std::to_string(element_id) + " at node " + std::to_string(q));
  }

  // Contravariant (scaled) basis via the curl form:
  // Ja^d_n = -xhat^d . curl_xi( X_l grad_xi X_m ), (n,m,l) cyclic.
  g.m.assign(9 * npts, 0.0);
  std::vector<double> v[3], dv;
  for (int n = 0; n < 3; ++n) {
    const int m = (n + 1) % 3, l = (n + 2) % 3;
    // v_d = X_l * d X_m / dxi^d
    for (int d = 0; d < 3; ++d) {
      v[d].resize(npts);
      for (int q = 0; q < npts; ++q)
        v[d][q] = (*X[l])[q] * g.cov[(d * 3 + m) * npts + q];
    }
    // curl components: (curl v)_1 = d2 v3 - d3 v2, etc.
    for (int d = 0; d < 3; ++d) {
      const int d2 = (d + 1) % 3, d3 = (d + 2) % 3;
      std::vector<double> t1, t2;
      tensor_derivative(basis, v[d3], d2, t1);
      tensor_derivative(basis, v[d2], d3, t2);
      for (int q = 0; q < npts; ++q)
        g.m[(d * 3 + n) * npts + q] = -(t1[q] - t2[q]);
    }
  }

  // Quadrature volume.
  g.volume = 0.0;
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        g.volume += basis.weights[i] * basis.weights[j] * basis.weights[k] *
                    g.jac[node_index(i, j, k, np)];
}

Mesh build_mesh(const std::vector<ElementInput>& elements,
                const std::vector<BoundaryFaceInput>& boundary, int order) {
  Mesh mesh;
  mesh.order = order;
  mesh.basis = gauss_lobatto(order);
  mesh.nelem = static_cast<int>(elements.size());
  const int np = order + 1;
  mesh.npts = np * np * np;
  mesh.nfp = np * np;

  mesh.corners.resize(mesh.nelem);
  mesh.geom.resize(mesh.nelem);
  for (int e = 0; e < mesh.nelem; ++e) {
    mesh.corners[e] = elements[e].corners;
    mesh.geom[e] = build_mapping(elements[e], mesh.basis);
    compute_metrics(mesh.geom[e], mesh.basis, e);
  }

  // Boundary tag table.
  std::map<std::array<int, 4>, int> boundary_lookup;  // sorted ids -> tag id
  std::map<std::string, int> tag_ids;
  for (const auto& b : boundary) {
    auto key = b.corner_ids;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = tag_ids.try_emplace(
        b.tag, static_cast<int>(mesh.tag_names.size()));
    if (inserted) mesh.tag_names.push_back(b.tag);
    boundary_lookup[key] = it->second;
  }

  // Pair element sides by sorted corner-id keys.
  std::map<std::array<int, 4>, std::vector<std::pair<int, int>>> side_map;
  for (int e = 0; e < mesh.nelem; ++e)
    for (int s = 0; s < 6; ++s) {
      std::array<int, 4> key;
      for (int c = 0; c < 4; ++c)
        key[c] = elements[e].corner_ids[kSideCorners[s][c]];
      std::sort(key.begin(), key.end());
      side_map[key].push_back({e, s});
    }

  // Centroid and average outward normal of an element side, used to resolve
  // id-hash collisions (periodic directions that are two elements wide make
  // four sides share one corner-id set).
  auto side_centroid = [&](int e, int s) {
    const auto& g = mesh.geom[e];
    Vec3 c{0, 0, 0};
    for (int b = 0; b < np; ++b)
      for (int a = 0; a < np; ++a) {
        const int q = face_node_index(s, a, b, np);
        c[0] += g.x[q] / mesh.nfp;
        c[1] += g.y[q] / mesh.nfp;
        c[2] += g.z[q] / mesh.nfp;
      }
    return c;
  };
  auto side_normal = [&](int e, int s) {
    const auto& g = mesh.geom[e];
    const int dir = side_direction(s);
    const double sign = side_positive(s) ? 1.0 : -1.0;
    Vec3 nrm{0, 0, 0};
    for (int b = 0; b < np; ++b)
      for (int a = 0; a < np; ++a) {
        const int q = face_node_index(s, a, b, np);
        for (int d = 0; d < 3; ++d)
          nrm[d] += sign * g.m[(dir * 3 + d) * mesh.npts + q];
      }
    return nrm;
  };

  for (const auto& [key, sides] : side_map) {
    if (sides.size() == 1) {
      auto it = boundary_lookup.find(key);
      if (it == boundary_lookup.end())
        throw TopologyError("build_mesh: boundary face without a tag");
      Face face;
      face.left = sides[0].first;
      face.side_l = sides[0].second;
      face.tag = it->second;
      mesh.faces.push_back(face);
    } else if (sides.size() == 2) {
      Face face;
      face.left = sides[0].first;
      face.side_l = sides[0].second;
      face.right = sides[1].first;
      face.side_r = sides[1].second;
      mesh.faces.push_back(face);
    } else if (sides.size() % 2 == 0) {
      // Greedy pairing: only sides with opposing outward normals may match,
      // closest centroids first (periodic partners are translated copies).
      std::vector<std::pair<int, int>> pool = sides;
      std::vector<Vec3> cent(pool.size()), nrm(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) {
        cent[i] = side_centroid(pool[i].first, pool[i].second);
        nrm[i] = side_normal(pool[i].first, pool[i].second);
      }
      std::vector<bool> used(pool.size(), false);
      for (std::size_t n_left = pool.size(); n_left > 0; n_left -= 2) {
        double best = -1.0;
        int bi = -1, bj = -1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          if (used[i]) continue;
          for (std::size_t j = i + 1; j < pool.size(); ++j) {
            if (used[j]) continue;
            if (dot(nrm[i], nrm[j]) >= 0.0) continue;
            double d2 = 0.0;
            for (int d = 0; d < 3; ++d) {
              const double dd = cent[i][d] - cent[j][d];
              d2 += dd * dd;
            }
            if (bi < 0 || d2 < best) {
              best = d2;
              bi = static_cast<int>(i);
              bj = static_cast<int>(j);
            }
          }
        }
        if (bi < 0)
          throw TopologyError(
              "build_mesh: cannot resolve multiply-shared face corner ids");
        used[bi] = used[bj] = true;
        Face face;
        face.left = pool[bi].first;
        face.side_l = pool[bi].second;
        face.right = pool[bj].first;
        face.side_r = pool[bj].second;
        mesh.faces.push_back(face);
      }
    } else {
      throw TopologyError("build_mesh: face shared by an odd number of sides");
    }
  }

  // Face node lists, orientation, geometry and penalties.
  const auto& w = mesh.basis.weights;
  for (auto& face : mesh.faces) {
    face.nodes_l.resize(mesh.nfp);
    for (int b = 0; b < np; ++b)
      for (int a = 0; a < np; ++a)
        face.nodes_l[a + np * b] = face_node_index(face.side_l, a, b, np);

    // Normal and surface Jacobian from the left element's metrics.
    const auto& gl = mesh.geom[face.left];
    const int dir = side_direction(face.side_l);
    const double sign = side_positive(face.side_l) ? 1.0 : -1.0;
    face.nx.resize(mesh.nfp);
    face.ny.resize(mesh.nfp);
    face.nz.resize(mesh.nfp);
    face.sj.resize(mesh.nfp);
    face.area = 0.0;
    for (int b = 0; b < np; ++b)
      for (int a = 0; a < np; ++a) {
        const int fp = a + np * b;
        const int q = face.nodes_l[fp];
        Vec3 ja{gl.m[(dir * 3 + 0) * mesh.npts + q],
                gl.m[(dir * 3 + 1) * mesh.npts + q],
                gl.m[(dir * 3 + 2) * mesh.npts + q]};
        const double norm = std::sqrt(dot(ja, ja));
        face.sj[fp] = norm;
        face.nx[fp] = sign * ja[0] / norm;
        face.ny[fp] = sign * ja[1] / norm;
        face.nz[fp] = sign * ja[2] / norm;
        face.area += w[a] * w[b] * norm;
      }

    if (face.right >= 0) {
      // Orientation by coordinate matching, translation-invariant so that
      // periodic pairings are handled too.
      const auto& gr = mesh.geom[face.right];
      std::vector<Vec3> xl(mesh.nfp), xr(mesh.nfp);
      Vec3 cl{0, 0, 0}, cr{0, 0, 0};
      for (int b = 0; b < np; ++b)
        for (int a = 0; a < np; ++a) {
          const int fp = a + np * b;
          const int ql = face.nodes_l[fp];
          const int qr = face_node_index(face.side_r, a, b, np);
          xl[fp] = {gl.x[ql], gl.y[ql], gl.z[ql]};
          xr[fp] = {gr.x[qr], gr.y[qr], gr.z[qr]};
          for (int d = 0; d < 3; ++d) {
            cl[d] += xl[fp][d] / mesh.nfp;
            cr[d] += xr[fp][d] / mesh.nfp;
          }
        }
      const double scale = std::sqrt(face.area);
      int best_code = -1;
      for (int code = 0; code < 8 && best_code < 0; ++code) {
        double err = 0.0;
        for (int b = 0; b < np; ++b)
          for (int a = 0; a < np; ++a) {
            const auto [a2, b2] = apply_orientation(code, a, b, np - 1);
            for (int d = 0; d < 3; ++d) {
              const double diff = (xl[a + np * b][d] - cl[d]) -
                                  (xr[a2 + np * b2][d] - cr[d]);
              err = std::max(err, std::abs(diff));
            }
          }
        if (err < 1e-8 * scale + 1e-12) best_code = code;
      }
      if (best_code < 0)
        throw TopologyError("build_mesh: non-conforming face between elements " +
                            std::to_string(face.left) + " and " +
                            std::to_string(face.right));
      face.orient = best_code;
      face.nodes_r.resize(mesh.nfp);
      for (int b = 0; b < np; ++b)
        for (int a = 0; a < np; ++a) {
          const auto [a2, b2] = apply_orientation(best_code, a, b, np - 1);
          face.nodes_r[a + np * b] = face_node_index(face.side_r, a2, b2, np);
        }
    }

    const double vl = mesh.geom[face.left].volume;
    const double vr = face.right >= 0 ? mesh.geom[face.right].volume : vl;
    const double h_bar = std::min(vl, vr) / face.area;
    face.beta = (order + 1.0) * (order + 2.0) / (2.0 * h_bar);
  }
  return mesh;
}

int Mesh::num_interior_faces() const {
  int n = 0;
  for (const auto& f : faces)
    if (f.right >= 0) ++n;
  return n;
}
int Mesh::num_boundary_faces() const {
  return static_cast<int>(faces.size()) - num_interior_faces();
}
int Mesh::tag_id(const std::string& name) const {
  for (std::size_t i = 0; i < tag_names.size(); ++i)
    if (tag_names[i] == name) return static_cast<int>(i);
  return -1;
}

double Mesh::metric_identity_residual() const {
  double worst = 0.0;
  std::vector<double> col(npts), dcol;
  for (const auto& g : geom) {
    double scale = 0.0;
    for (double v : g.m) scale = std::max(scale, std::abs(v));
    for (int n = 0; n < 3; ++n) {
      std::vector<double> div(npts, 0.0);
      for (int d = 0; d < 3; ++d) {
        std::copy(g.m.begin() + (d * 3 + n) * npts,
                  g.m.begin() + (d * 3 + n + 1) * npts, col.begin());
        tensor_derivative(basis, col, d, dcol);
        for (int q = 0; q < npts; ++q) div[q] += dcol[q];
      }
      for (int q = 0; q < npts; ++q)
        worst = std::max(worst, std::abs(div[q]) / scale);
    }
  }
  return worst;
}

double Mesh::watertightness_residual() const {
  const int np = order + 1;
  std::vector<Vec3> sums(nelem, Vec3{0, 0, 0});
  std::vector<double> areas(nelem, 0.0);
  for (const auto& f : faces) {
    for (int b = 0; b < np; ++b)
      for (int a = 0; a < np; ++a) {
        const int fp = a + np * b;
        const double ws = basis.weights[a] * basis.weights[b] * f.sj[fp];
        sums[f.left][0] += ws * f.nx[fp];
        sums[f.left][1] += ws * f.ny[fp];
        sums[f.left][2] += ws * f.nz[fp];
        areas[f.left] += ws;
        if (f.right >= 0) {
          sums[f.right][0] -= ws * f.nx[fp];
          sums[f.right][1] -= ws * f.ny[fp];
          sums[f.right][2] -= ws * f.nz[fp];
          areas[f.right] += ws;
        }
      }
  }
  double worst = 0.0;
  for (int e = 0; e < nelem; ++e)
    for (int d = 0; d < 3; ++d)
      worst = std::max(worst, std::abs(sums[e][d]) / areas[e]);
  return worst;
}

Mesh build_box_mesh(const BoxSpec& spec, int order) {
  const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
  const int mx = spec.periodic[0] ? nx : nx + 1;
  const int my = spec.periodic[1] ? ny : ny + 1;
  const int mz = spec.periodic[2] ? nz : nz + 1;
  auto vid = [&](int i, int j, int k) {
    return (i % mx) + mx * ((j % my) + my * (k % mz));
  };
  auto vertex = [&](int i, int j, int k) -> Vec3 {
    return {spec.x0 + (spec.x1 - spec.x0) * i / nx,
            spec.y0 + (spec.y1 - spec.y0) * j / ny,
            spec.z0 + (spec.z1 - spec.z0) * k / nz};
  };

  const NodalBasis basis = gauss_lobatto(order);
  const int np = order + 1;

  std::vector<ElementInput> elements;
  elements.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        ElementInput el;
        for (int n = 0; n < 8; ++n) {
          const int di = (n & 1) ? 1 : 0, dj = (n & 2) ? 1 : 0,
                    dk = (n & 4) ? 1 : 0;
          Vec3 v = vertex(i + di, j + dj, k + dk);
          el.corner_ids[n] = vid(i + di, j + dj, k + dk);
          el.corners[n] = spec.deform ? spec.deform(v) : v;
        }
        if (spec.deform) {
          std::vector<Vec3> nodes(np * np * np);
          for (int kk = 0; kk < np; ++kk)
            for (int jj = 0; jj < np; ++jj)
              for (int ii = 0; ii < np; ++ii) {
                Vec3 v = {
                    spec.x0 + (spec.x1 - spec.x0) *
                                  (i + 0.5 * (1 + basis.nodes[ii])) / nx,
                    spec.y0 + (spec.y1 - spec.y0) *
                                  (j + 0.5 * (1 + basis.nodes[jj])) / ny,
                    spec.z0 + (spec.z1 - spec.z0) *
                                  (k + 0.5 * (1 + basis.nodes[kk])) / nz};
                nodes[node_index(ii, jj, kk, np)] = spec.deform(v);
              }
          el.mapping_nodes = std::move(nodes);
        }
        elements.push_back(std::move(el));
      }

  std::vector<BoundaryFaceInput> boundary;
  auto add_boundary = [&](int side, int i, int j, int k) {
    BoundaryFaceInput b;
    b.tag = spec.tags[side];
    int c = 0;
    for (int n = 0; n < 8; ++n) {
      const bool on_face =
          (side == 0 && !(n & 1)) || (side == 1 && (n & 1)) ||
          (side == 2 && !(n & 2)) || (side == 3 && (n & 2)) ||
          (side == 4 && !(n & 4)) || (side == 5 && (n & 4));
      if (!on_face) continue;
      const int di = (n & 1) ? 1 : 0, dj = (n & 2) ? 1 : 0, dk = (n & 4) ? 1 : 0;
      b.corner_ids[c++] = vid(i + di, j + dj, k + dk);
    }
    boundary.push_back(b);
  };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!spec.periodic[0] && i == 0) add_boundary(0, i, j, k);
        if (!spec.periodic[0] && i == nx - 1) add_boundary(1, i, j, k);
        if (!spec.periodic[1] && j == 0) add_boundary(2, i, j, k);
        if (!spec.periodic[1] && j == ny - 1) add_boundary(3, i, j, k);
        if (!spec.periodic[2] && k == 0) add_boundary(4, i, j, k);
        if (!spec.periodic[2] && k == nz - 1) add_boundary(5, i, j, k);
      }

  return build_mesh(elements, boundary, order);
}

std::function<Vec3(const Vec3&)> sine_box_deform(const BoxSpec& spec,
                                                 double amplitude) {
  const double lx = spec.x1 - spec.x0, ly = spec.y1 - spec.y0,
               lz = spec.z1 - spec.z0;
  const double x0 = spec.x0, y0 = spec.y0, z0 = spec.z0;
  return [=](const Vec3& v) -> Vec3 {
    const double u = 2.0 * M_PI * (v[0] - x0) / lx;
    const double w = 2.0 * M_PI * (v[1] - y0) / ly;
    const double t = 2.0 * M_PI * (v[2] - z0) / lz;
    return {v[0] + amplitude * lx * std::sin(u + 0.9) * std::sin(w) *
                       std::sin(t + 0.4),
            v[1] + amplitude * ly * std::sin(u) * std::sin(w + 1.7) *
                       std::sin(t),
            v[2] + amplitude * lz * std::sin(u + 0.2) * std::sin(w + 0.8) *
                       std::sin(t + 2.1)};
  };
}

std::function<Vec3(const Vec3&)> cylinder_deform(double radius) {
  return [radius](const Vec3& v) -> Vec3 {
    const double y = v[1], z = v[2];
    return {v[0], radius * y * std::sqrt(1.0 - 0.5 * z * z),
            radius * z * std::sqrt(1.0 - 0.5 * y * y)};
  };
}

}  // namespace triflow
