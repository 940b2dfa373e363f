#include "triflow/dg_operators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace triflow {

namespace {

struct Prim {
  double c1, c2, rho, u[3], p;
};

inline Prim primitives(const State& q, const PhaseParams& p) {
  Prim w;
  w.c1 = q[0];
  w.c2 = q[1];
  w.rho = recovery_density(q[0], q[1], p);
  for (int d = 0; d < 3; ++d) w.u[d] = q[2 + d] / w.rho;
  w.p = q[5];
  return w;
}

// out[q] += scale * sum_m D(i_dir, m) f[line node m], tensor direction dir.
void add_deriv(const NodalBasis& basis, int dir, const double* f, double* out,
               int np, double scale) {
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        const int idx[3] = {i, j, k};
        double s = 0.0;
        for (int m = 0; m < np; ++m) {
          int q;
          if (dir == 0)
            q = node_index(m, j, k, np);
          else if (dir == 1)
            q = node_index(i, m, k, np);
          else
            q = node_index(i, j, m, np);
          s += basis.d(idx[dir], m) * f[q];
        }
        out[node_index(i, j, k, np)] += scale * s;
      }
}

// Chain-rule gradient of a scalar on one element:
// grad[n*npts+q] = (1/J) sum_d Ja^d_n du/dxi^d. This form is exact for
// constants and is the discrete adjoint of the conservative divergence under
// summation by parts, which keeps the SIP operator symmetric on curved
// elements.
void element_gradient(const Mesh& mesh, int e, const double* u, double* grad) {
  const auto& g = mesh.geom[e];
  const int np = mesh.order + 1, npts = mesh.npts;
  std::vector<double> du(3 * npts, 0.0);
  for (int d = 0; d < 3; ++d)
    add_deriv(mesh.basis, d, u, du.data() + d * npts, np, 1.0);
  for (int n = 0; n < 3; ++n)
    for (int q = 0; q < npts; ++q) {
      double s = 0.0;
      for (int d = 0; d < 3; ++d)
        s += g.m[(d * 3 + n) * npts + q] * du[d * npts + q];
      grad[n * npts + q] = s / g.jac[q];
    }
}

// out[q] += (1/J) sum_d d/dxi^d ( Ja^d . v ), v a per-node physical vector
// stored v[n*npts+q].
void element_divergence(const Mesh& mesh, int e, const double* v, double* out) {
  const auto& g = mesh.geom[e];
  const int np = mesh.order + 1, npts = mesh.npts;
  std::vector<double> t(npts), acc(npts, 0.0);
  for (int d = 0; d < 3; ++d) {
    for (int q = 0; q < npts; ++q) {
      double s = 0.0;
      for (int n = 0; n < 3; ++n)
        s += g.m[(d * 3 + n) * npts + q] * v[n * npts + q];
      t[q] = s;
    }
    add_deriv(mesh.basis, d, t.data(), acc.data(), np, 1.0);
  }
  for (int q = 0; q < npts; ++q) out[q] += acc[q] / g.jac[q];
}

// Face-node quadrature weight (product of the two tangential 1D weights).
inline double face_weight(const NodalBasis& basis, int fp, int np) {
  return basis.weights[fp % np] * basis.weights[fp / np];
}

}  // namespace

double field_integral(const Mesh& mesh, const GlobalField& f, int var) {
  const int np = mesh.order + 1;
  double total = 0.0;
  for (int e = 0; e < mesh.nelem; ++e) {
    const double* u = f.block(e, var);
    const auto& g = mesh.geom[e];
    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
          const int q = node_index(i, j, k, np);
          total += mesh.basis.weights[i] * mesh.basis.weights[j] *
                   mesh.basis.weights[k] * g.jac[q] * u[q];
        }
  }
  return total;
}

FluxBlock two_point_flux(const State& qL, const State& qR,
                         const PhaseParams& params) {
  const Prim a = primitives(qL, params), b = primitives(qR, params);
  const double c1 = 0.5 * (a.c1 + b.c1), c2 = 0.5 * (a.c2 + b.c2);
  const double rho = 0.5 * (a.rho + b.rho), p = 0.5 * (a.p + b.p);
  const double u[3] = {0.5 * (a.u[0] + b.u[0]), 0.5 * (a.u[1] + b.u[1]),
                       0.5 * (a.u[2] + b.u[2])};
  FluxBlock f{};
  for (int d = 0; d < 3; ++d) {
    f[0][d] = c1 * u[d];
    f[1][d] = c2 * u[d];
    for (int i = 0; i < 3; ++i)
      f[2 + i][d] = rho * u[i] * u[d] + (i == d ? p : 0.0);
    f[5][d] = params.rho0 * params.c0 * params.c0 * u[d];
  }
  return f;
}

State riemann_exact(const State& qL, const State& qR, const Vec3& n,
                    const PhaseParams& params) {
  const Prim a = primitives(qL, params), b = primitives(qR, params);
  const double unL = a.u[0] * n[0] + a.u[1] * n[1] + a.u[2] * n[2];
  const double unR = b.u[0] * n[0] + b.u[1] * n[1] + b.u[2] * n[2];
  const double a2 = params.rho0 * params.c0 * params.c0;
  const double lamLp = 0.5 * (unL + std::sqrt(unL * unL + 4.0 * a2 / a.rho));
  const double lamRm = 0.5 * (unR - std::sqrt(unR * unR + 4.0 * a2 / b.rho));
  const double denom = b.rho * lamRm - a.rho * lamLp;
  if (denom == 0.0)
    throw std::runtime_error("riemann_exact: degenerate wave configuration");
  const double ustar =
      (b.p - a.p + b.rho * unR * lamRm - a.rho * unL * lamLp) / denom;
  const double pstar = b.p + b.rho * lamRm * (unR - ustar);

  const Prim& k = (ustar >= 0.0) ? a : b;
  const double unK = (ustar >= 0.0) ? unL : unR;
  State flux{};
  flux[0] = k.c1 * ustar;
  flux[1] = k.c2 * ustar;
  for (int i = 0; i < 3; ++i)
    flux[2 + i] =
        k.rho * ustar * (k.u[i] + (ustar - unK) * n[i]) + pstar * n[i];
  flux[5] = a2 * ustar;
  return flux;
}

// ---------------------------------------------------------------------------
// ScalarLaplacian
// ---------------------------------------------------------------------------

ScalarLaplacian::ScalarLaplacian(const Mesh& mesh) : mesh_(&mesh) {
  elem_faces_.resize(mesh.nelem);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    elem_faces_[mesh.faces[f].left].push_back(static_cast<int>(f));
    if (mesh.faces[f].right >= 0 && mesh.faces[f].right != mesh.faces[f].left)
      elem_faces_[mesh.faces[f].right].push_back(static_cast<int>(f));
  }
}

namespace {

// Shared kernels of the SIP Laplacian, parameterized by the element/face
// subsets they run over so that the global and patch applications use the
// identical arithmetic.
struct SipWork {
  const Mesh* mesh;
  std::vector<double>* grad_local;   // [(e*3+n)*npts+q]
  std::vector<double>* grad_lifted;  // same layout
  std::vector<double>* out;          // [e*npts+q]
};

void sip_gradients(const SipWork& w, const std::vector<int>& elems,
                   const std::vector<int>& faces, const double* u) {
  const Mesh& mesh = *w.mesh;
  const int npts = mesh.npts;
  for (int e : elems)
    element_gradient(mesh, e, u + static_cast<std::size_t>(e) * npts,
                     w.grad_local->data() + static_cast<std::size_t>(e) * 3 * npts);
  for (int e : elems)
    std::copy(w.grad_local->begin() + static_cast<std::size_t>(e) * 3 * npts,
              w.grad_local->begin() + static_cast<std::size_t>(e + 1) * 3 * npts,
              w.grad_lifted->begin() + static_cast<std::size_t>(e) * 3 * npts);
  const double w0 = mesh.basis.weights[0];
  for (int fi : faces) {
    const Face& f = mesh.faces[fi];
    if (f.right < 0) continue;  // boundary: u* = interior, no lift
    const double* uL = u + static_cast<std::size_t>(f.left) * npts;
    const double* uR = u + static_cast<std::size_t>(f.right) * npts;
    double* gL = w.grad_lifted->data() + static_cast<std::size_t>(f.left) * 3 * npts;
    double* gR = w.grad_lifted->data() + static_cast<std::size_t>(f.right) * 3 * npts;
    const auto& jacL = mesh.geom[f.left].jac;
    const auto& jacR = mesh.geom[f.right].jac;
    for (int fp = 0; fp < mesh.nfp; ++fp) {
      const int ql = f.nodes_l[fp], qr = f.nodes_r[fp];
      const double du = 0.5 * (uR[qr] - uL[ql]);  // u* - uL = -(u* - uR)
      const double n[3] = {f.nx[fp], f.ny[fp], f.nz[fp]};
      const double facL = f.sj[fp] / (jacL[ql] * w0);
      const double facR = f.sj[fp] / (jacR[qr] * w0);
      for (int d = 0; d < 3; ++d) {
        gL[d * npts + ql] += du * n[d] * facL;
        gR[d * npts + qr] += du * n[d] * facR;  // (-du)(-n) = du * n
      }
    }
  }
}

void sip_divergence(const SipWork& w, const std::vector<int>& elems,
                    const std::vector<int>& faces, const double* u,
                    const ScalarLaplacian::BoundaryFlux* bflux) {
  const Mesh& mesh = *w.mesh;
  const int npts = mesh.npts;
  for (int e : elems) {
    double* oe = w.out->data() + static_cast<std::size_t>(e) * npts;
    std::fill(oe, oe + npts, 0.0);
    element_divergence(mesh, e,
                       w.grad_lifted->data() + static_cast<std::size_t>(e) * 3 * npts,
                       oe);
  }
  const double w0 = mesh.basis.weights[0];
  for (int fi : faces) {
    const Face& f = mesh.faces[fi];
    const double* glocL =
        w.grad_local->data() + static_cast<std::size_t>(f.left) * 3 * npts;
    const double* gliftL =
        w.grad_lifted->data() + static_cast<std::size_t>(f.left) * 3 * npts;
    double* oL = w.out->data() + static_cast<std::size_t>(f.left) * npts;
    const auto& jacL = mesh.geom[f.left].jac;
    if (f.right < 0) {
      for (int fp = 0; fp < mesh.nfp; ++fp) {
        const int ql = f.nodes_l[fp];
        const double n[3] = {f.nx[fp], f.ny[fp], f.nz[fp]};
        const double gstar = bflux ? (*bflux)(fi, fp) : 0.0;
        double glift_n = 0.0;
        for (int d = 0; d < 3; ++d) glift_n += gliftL[d * npts + ql] * n[d];
        oL[ql] += (gstar - glift_n) * f.sj[fp] / (jacL[ql] * w0);
      }
      continue;
    }
    const double* uL = u + static_cast<std::size_t>(f.left) * npts;
    const double* uR = u + static_cast<std::size_t>(f.right) * npts;
    const double* glocR =
        w.grad_local->data() + static_cast<std::size_t>(f.right) * 3 * npts;
    const double* gliftR =
        w.grad_lifted->data() + static_cast<std::size_t>(f.right) * 3 * npts;
    double* oR = w.out->data() + static_cast<std::size_t>(f.right) * npts;
    const auto& jacR = mesh.geom[f.right].jac;
    for (int fp = 0; fp < mesh.nfp; ++fp) {
      const int ql = f.nodes_l[fp], qr = f.nodes_r[fp];
      const double n[3] = {f.nx[fp], f.ny[fp], f.nz[fp]};
      double gavg_n = 0.0, gliftL_n = 0.0, gliftR_n = 0.0;
      for (int d = 0; d < 3; ++d) {
        gavg_n += 0.5 * (glocL[d * npts + ql] + glocR[d * npts + qr]) * n[d];
        gliftL_n += gliftL[d * npts + ql] * n[d];
        gliftR_n += gliftR[d * npts + qr] * n[d];
      }
      const double gstar = gavg_n - f.beta * (uL[ql] - uR[qr]);
      oL[ql] += (gstar - gliftL_n) * f.sj[fp] / (jacL[ql] * w0);
      oR[qr] += (-gstar + gliftR_n) * f.sj[fp] / (jacR[qr] * w0);
    }
  }
}

}  // namespace

void ScalarLaplacian::apply(const std::vector<double>& u,
                            std::vector<double>& out,
                            const BoundaryFlux* boundary_flux) const {
  const Mesh& mesh = *mesh_;
  const std::size_t ndof = static_cast<std::size_t>(mesh.nelem) * mesh.npts;
  if (u.size() != ndof)
    throw std::invalid_argument("ScalarLaplacian::apply: size mismatch");
  out.assign(ndof, 0.0);
  std::vector<double> gloc(3 * ndof), glift(3 * ndof);
  std::vector<int> elems(mesh.nelem), faces(mesh.faces.size());
  for (int e = 0; e < mesh.nelem; ++e) elems[e] = e;
  for (std::size_t f = 0; f < faces.size(); ++f) faces[f] = static_cast<int>(f);
  SipWork w{&mesh, &gloc, &glift, &out};
  sip_gradients(w, elems, faces, u.data());
  sip_divergence(w, elems, faces, u.data(), boundary_flux);
}

void ScalarLaplacian::apply_unit(
    int elem, int node, std::map<int, std::vector<double>>& columns) const {
  const Mesh& mesh = *mesh_;
  const int npts = mesh.npts;
  // Patch: the element, its face neighbours, and all faces incident to them.
  std::set<int> elem_set{elem};
  for (int fi : elem_faces_[elem]) {
    const Face& f = mesh.faces[fi];
    elem_set.insert(f.left);
    if (f.right >= 0) elem_set.insert(f.right);
  }
  std::set<int> face_set;
  for (int e : elem_set)
    for (int fi : elem_faces_[e]) face_set.insert(fi);
  std::vector<int> elems(elem_set.begin(), elem_set.end());
  std::vector<int> faces(face_set.begin(), face_set.end());

  // Full-size scratch, touched only on the patch.
  const std::size_t ndof = static_cast<std::size_t>(mesh.nelem) * npts;
  static thread_local std::vector<double> u, gloc, glift, out;
  u.assign(ndof, 0.0);
  gloc.assign(3 * ndof, 0.0);
  glift.assign(3 * ndof, 0.0);
  out.assign(ndof, 0.0);
  u[static_cast<std::size_t>(elem) * npts + node] = 1.0;

  SipWork w{&mesh, &gloc, &glift, &out};
  sip_gradients(w, elems, faces, u.data());
  sip_divergence(w, elems, faces, u.data(), nullptr);

  columns.clear();
  for (int e : elems) {
    std::vector<double> col(out.begin() + static_cast<std::size_t>(e) * npts,
                            out.begin() + static_cast<std::size_t>(e + 1) * npts);
    bool nonzero = false;
    for (double v : col)
      if (v != 0.0) nonzero = true;
    if (nonzero) columns[e] = std::move(col);
  }
}

// ---------------------------------------------------------------------------
// SpatialOperator
// ---------------------------------------------------------------------------

SpatialOperator::SpatialOperator(const Mesh& mesh, const PhaseParams& params,
                                 BoundarySet bcs)
    : mesh_(&mesh), params_(params), bcs_(std::move(bcs)), laplacian_(mesh) {
  // Validate configuration and precompute steady inflow data.
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (f.right >= 0) continue;
    const BoundaryCondition& bc = bcs_.at(f.tag);
    if (bc.kind == BoundaryKind::Wall) {
      validate_wall_spec(bc.wall, params_);
    } else if (bc.kind == BoundaryKind::Inflow) {
      std::vector<InflowNode> nodes(mesh.nfp);
      const auto& g = mesh.geom[f.left];
      for (int fp = 0; fp < mesh.nfp; ++fp) {
        const int q = f.nodes_l[fp];
        inflow_state(bc.inflow, params_, {g.x[q], g.y[q], g.z[q]},
                     nodes[fp].c1, nodes[fp].c2, nodes[fp].u);
      }
      inflow_nodes_[static_cast<int>(fi)] = std::move(nodes);
    }
  }
}

State SpatialOperator::ghost_state(const State& q_int, int face, int fp,
                                   const Vec3& normal) const {
  const Face& f = mesh_->faces[face];
  const BoundaryCondition& bc = bcs_.at(f.tag);
  switch (bc.kind) {
    case BoundaryKind::Wall:
      return wall_ghost(q_int, normal);
    case BoundaryKind::Outflow:
      return outflow_ghost(q_int, bc.outflow);
    case BoundaryKind::Inflow: {
      const InflowNode& n = inflow_nodes_.at(face)[fp];
      const double rho = mixture_density(n.c1, n.c2, params_);
      return State{n.c1,           n.c2,          rho * n.u[0],
                   rho * n.u[1],  rho * n.u[2],  q_int[5]};
    }
  }
  return q_int;
}

void SpatialOperator::chemical_potential(const GlobalField& Q,
                                         ChemicalState& chem) const {
  const Mesh& mesh = *mesh_;
  const int npts = mesh.npts;
  const std::size_t ndof = static_cast<std::size_t>(mesh.nelem) * npts;
  chem.mu = GlobalField(mesh.nelem, 2, npts);
  chem.grad_c = GlobalField(mesh.nelem, 6, npts);
  chem.grad_c_local = GlobalField(mesh.nelem, 6, npts);

  std::vector<double> c(ndof), lap(ndof), gloc(3 * ndof), glift(3 * ndof);
  std::vector<int> elems(mesh.nelem), faces(mesh.faces.size());
  for (int e = 0; e < mesh.nelem; ++e) elems[e] = e;
  for (std::size_t f = 0; f < faces.size(); ++f) faces[f] = static_cast<int>(f);

  for (int i = 0; i < 2; ++i) {
    for (int e = 0; e < mesh.nelem; ++e)
      std::copy(Q.block(e, i), Q.block(e, i) + npts,
                c.begin() + static_cast<std::size_t>(e) * npts);

    // Contact-angle inhomogeneous Neumann data on wall faces.
    ScalarLaplacian::BoundaryFlux bflux = [&](int face, int fp) -> double {
      const Face& f = mesh.faces[face];
      const BoundaryCondition& bc = bcs_.at(f.tag);
      if (bc.kind != BoundaryKind::Wall) return 0.0;
      const int q = f.nodes_l[fp];
      double fw1, fw2;
      wall_concentration_flux(Q.at(f.left, 0, q), Q.at(f.left, 1, q), bc.wall,
                              params_, fw1, fw2);
      return i == 0 ? fw1 : fw2;
    };

    lap.assign(ndof, 0.0);
    SipWork w{&mesh, &gloc, &glift, &lap};
    sip_gradients(w, elems, faces, c.data());
    sip_divergence(w, elems, faces, c.data(), &bflux);

    const double kf = 12.0 / params_.eps * params_.Sigma[i];
    const double kl = 0.75 * params_.eps * params_.Sigma[i];
    for (int e = 0; e < mesh.nelem; ++e)
      for (int q = 0; q < npts; ++q) {
        const double c1 = Q.at(e, 0, q), c2 = Q.at(e, 1, q);
        const Vec3 f0 = bulk_potential(c1, c2, 1.0 - c1 - c2, params_);
        chem.mu.at(e, i, q) =
            kf * f0[i] - kl * lap[static_cast<std::size_t>(e) * npts + q];
        for (int d = 0; d < 3; ++d) {
          chem.grad_c.at(e, i * 3 + d, q) =
              glift[(static_cast<std::size_t>(e) * 3 + d) * npts + q];
          chem.grad_c_local.at(e, i * 3 + d, q) =
              gloc[(static_cast<std::size_t>(e) * 3 + d) * npts + q];
        }
      }
  }
}

void SpatialOperator::wall_flux_lift(const GlobalField& Q,
                                     GlobalField& lift2) const {
  const Mesh& mesh = *mesh_;
  lift2 = GlobalField(mesh.nelem, 2, mesh.npts);
  const double w0 = mesh.basis.weights[0];
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (f.right >= 0) continue;
    const BoundaryCondition& bc = bcs_.at(f.tag);
    if (bc.kind != BoundaryKind::Wall) continue;
    const auto& jac = mesh.geom[f.left].jac;
    for (int fp = 0; fp < mesh.nfp; ++fp) {
      const int q = f.nodes_l[fp];
      double fw1, fw2;
      wall_concentration_flux(Q.at(f.left, 0, q), Q.at(f.left, 1, q), bc.wall,
                              params_, fw1, fw2);
      const double fac = f.sj[fp] / (jac[q] * w0);
      lift2.at(f.left, 0, q) += fw1 * fac;
      lift2.at(f.left, 1, q) += fw2 * fac;
    }
  }
}

void SpatialOperator::lifted_gradient(const GlobalField& U,
                                      GlobalField& G) const {
  const Mesh& mesh = *mesh_;
  const int npts = mesh.npts;
  const std::size_t ndof = static_cast<std::size_t>(mesh.nelem) * npts;
  G = GlobalField(mesh.nelem, 3 * U.nvar, npts);
  std::vector<double> u(ndof), gloc(3 * ndof), glift(3 * ndof), dummy(ndof);
  std::vector<int> elems(mesh.nelem), faces(mesh.faces.size());
  for (int e = 0; e < mesh.nelem; ++e) elems[e] = e;
  for (std::size_t f = 0; f < faces.size(); ++f) faces[f] = static_cast<int>(f);
  for (int v = 0; v < U.nvar; ++v) {
    for (int e = 0; e < mesh.nelem; ++e)
      std::copy(U.block(e, v), U.block(e, v) + npts,
                u.begin() + static_cast<std::size_t>(e) * npts);
    SipWork w{&mesh, &gloc, &glift, &dummy};
    sip_gradients(w, elems, faces, u.data());
    for (int e = 0; e < mesh.nelem; ++e)
      for (int d = 0; d < 3; ++d)
        for (int q = 0; q < npts; ++q)
          G.at(e, v * 3 + d, q) =
              glift[(static_cast<std::size_t>(e) * 3 + d) * npts + q];
  }
}

void SpatialOperator::split_divergence(const GlobalField& Q,
                                       GlobalField& out) const {
  const Mesh& mesh = *mesh_;
  const int np = mesh.order + 1, npts = mesh.npts;
  out = GlobalField(mesh.nelem, kNumVars, npts);
  const double a2 = params_.rho0 * params_.c0 * params_.c0;

  std::vector<Prim> prim(npts);
  for (int e = 0; e < mesh.nelem; ++e) {
    const auto& g = mesh.geom[e];
    for (int q = 0; q < npts; ++q) {
      State s;
      for (int v = 0; v < kNumVars; ++v) s[v] = Q.at(e, v, q);
      prim[q] = primitives(s, params_);
    }
    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
          const int q = node_index(i, j, k, np);
          const int idx[3] = {i, j, k};
          double acc[kNumVars] = {0, 0, 0, 0, 0, 0};
          for (int dir = 0; dir < 3; ++dir) {
            for (int m = 0; m < np; ++m) {
              int qm;
              if (dir == 0)
                qm = node_index(m, j, k, np);
              else if (dir == 1)
                qm = node_index(i, m, k, np);
              else
                qm = node_index(i, j, m, np);
              const Prim& A = prim[q];
              const Prim& B = prim[qm];
              // Metric average of Ja^dir between the node pair.
              double mm[3];
              for (int n = 0; n < 3; ++n)
                mm[n] = 0.5 * (g.m[(dir * 3 + n) * npts + q] +
                               g.m[(dir * 3 + n) * npts + qm]);
              const double ub[3] = {0.5 * (A.u[0] + B.u[0]),
                                    0.5 * (A.u[1] + B.u[1]),
                                    0.5 * (A.u[2] + B.u[2])};
              const double umn = ub[0] * mm[0] + ub[1] * mm[1] + ub[2] * mm[2];
              const double cb1 = 0.5 * (A.c1 + B.c1);
              const double cb2 = 0.5 * (A.c2 + B.c2);
              const double rb = 0.5 * (A.rho + B.rho);
              const double pb = 0.5 * (A.p + B.p);
              const double d2 = 2.0 * mesh.basis.d(idx[dir], m);
              acc[0] += d2 * cb1 * umn;
              acc[1] += d2 * cb2 * umn;
              for (int n = 0; n < 3; ++n)
                acc[2 + n] += d2 * (rb * ub[n] * umn + pb * mm[n]);
              acc[5] += d2 * a2 * umn;
            }
          }
          for (int v = 0; v < kNumVars; ++v)
            out.at(e, v, q) = acc[v] / g.jac[q];
        }
  }
}

void SpatialOperator::residual(const GlobalField& Q, double t,
                               const ResidualOptions& opt,
                               GlobalField& Qt) const {
  const Mesh& mesh = *mesh_;
  const int npts = mesh.npts, nfp = mesh.nfp;
  const double w0 = mesh.basis.weights[0];
  Qt = GlobalField(mesh.nelem, kNumVars, npts);

  // 1. Chemical potentials and concentration gradients.
  ChemicalState chem;
  chemical_potential(Q, chem);

  // 2. Gradient variables W = (mu1/S1, mu2/S2, rho u, rho v, rho w, p).
  GlobalField W(mesh.nelem, kNumVars, npts);
  for (int e = 0; e < mesh.nelem; ++e)
    for (int q = 0; q < npts; ++q) {
      W.at(e, 0, q) = chem.mu.at(e, 0, q) / params_.Sigma[0];
      W.at(e, 1, q) = chem.mu.at(e, 1, q) / params_.Sigma[1];
      for (int v = 2; v < kNumVars; ++v) W.at(e, v, q) = Q.at(e, v, q);
    }

  // 3. Gradients of W: local volume gradients plus face lifts with
  //    boundary-specific face values.
  GlobalField GWloc(mesh.nelem, 3 * kNumVars, npts);
  GlobalField GW(mesh.nelem, 3 * kNumVars, npts);
  {
    std::vector<double> grad(3 * npts);
    for (int e = 0; e < mesh.nelem; ++e)
      for (int v = 0; v < kNumVars; ++v) {
        element_gradient(mesh, e, W.block(e, v), grad.data());
        for (int d = 0; d < 3; ++d)
          for (int q = 0; q < npts; ++q)
            GWloc.at(e, v * 3 + d, q) = grad[d * npts + q];
      }
    GW.data = GWloc.data;
  }
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    const auto& jacL = mesh.geom[f.left].jac;
    if (f.right >= 0) {
      const auto& jacR = mesh.geom[f.right].jac;
      for (int fp = 0; fp < nfp; ++fp) {
        const int ql = f.nodes_l[fp], qr = f.nodes_r[fp];
        const double n[3] = {f.nx[fp], f.ny[fp], f.nz[fp]};
        const double facL = f.sj[fp] / (jacL[ql] * w0);
        const double facR = f.sj[fp] / (jacR[qr] * w0);
        for (int v = 0; v < kNumVars; ++v) {
          const double du = 0.5 * (W.at(f.right, v, qr) - W.at(f.left, v, ql));
          for (int d = 0; d < 3; ++d) {
            GW.at(f.left, v * 3 + d, ql) += du * n[d] * facL;
            GW.at(f.right, v * 3 + d, qr) += du * n[d] * facR;
          }
        }
      }
    } else {
      const BoundaryCondition& bc = bcs_.at(f.tag);
      if (bc.kind == BoundaryKind::Outflow) continue;  // W* = W_i: no lift
      for (int fp = 0; fp < nfp; ++fp) {
        const int ql = f.nodes_l[fp];
        const double n[3] = {f.nx[fp], f.ny[fp], f.nz[fp]};
        State qi;
        for (int v = 0; v < kNumVars; ++v) qi[v] = Q.at(f.left, v, ql);
        const State qe = ghost_state(qi, static_cast<int>(fi), fp,
                                     {n[0], n[1], n[2]});
        // Ghost W: potentials copied from the interior (Neumann), momentum
        // and pressure from the ghost state.
        const double facL = f.sj[fp] / (jacL[ql] * w0);
        for (int v = 2; v < kNumVars; ++v) {
          const double wstar = 0.5 * (W.at(f.left, v, ql) + qe[v]);
          const double du = wstar - W.at(f.left, v, ql);
          for (int d = 0; d < 3; ++d)
            GW.at(f.left, v * 3 + d, ql) += du * n[d] * facL;
        }
      }
    }
  }

  // 4. Volume terms: split inviscid divergence, viscous divergence, sources.
  {
    GlobalField div;
    split_divergence(Q, div);
    for (std::size_t idx = 0; idx < Qt.data.size(); ++idx)
      Qt.data[idx] -= div.data[idx];
  }
  {
    std::vector<double> fv(3 * npts);
    std::array<Vec3, kNumVars> grad_w;
    std::array<Vec3, 2> grad_c;
    for (int e = 0; e < mesh.nelem; ++e) {
      // Viscous fluxes, one physical direction triplet per variable.
      std::vector<double> fvall(3 * kNumVars * npts);
      for (int q = 0; q < npts; ++q) {
        State s;
        for (int v = 0; v < kNumVars; ++v) s[v] = Q.at(e, v, q);
        for (int v = 0; v < kNumVars; ++v)
          for (int d = 0; d < 3; ++d) grad_w[v][d] = GW.at(e, v * 3 + d, q);
        for (int i = 0; i < 2; ++i)
          for (int d = 0; d < 3; ++d)
            grad_c[i][d] = chem.grad_c.at(e, i * 3 + d, q);
        FluxBlock F = viscous_flux(s, grad_w, grad_c, params_);
        if (!opt.ch_diffusion)
          for (int d = 0; d < 3; ++d) F[0][d] = F[1][d] = 0.0;
        for (int v = 0; v < kNumVars; ++v)
          for (int d = 0; d < 3; ++d)
            fvall[(v * 3 + d) * npts + q] = F[v][d];
        // Source: gravity plus capillary forces.
        const std::array<double, 2> mu{chem.mu.at(e, 0, q),
                                       chem.mu.at(e, 1, q)};
        const State src = source_term(s, grad_c, mu, params_);
        for (int v = 0; v < kNumVars; ++v) Qt.at(e, v, q) += src[v];
        if (opt.source) {
          const auto& g = mesh.geom[e];
          const State forcing = (*opt.source)({g.x[q], g.y[q], g.z[q]}, t);
          for (int v = 0; v < kNumVars; ++v) Qt.at(e, v, q) += forcing[v];
        }
      }
      for (int v = 0; v < kNumVars; ++v) {
        std::copy(fvall.begin() + v * 3 * npts,
                  fvall.begin() + (v + 1) * 3 * npts, fv.begin());
        element_divergence(mesh, e, fv.data(), Qt.block(e, v));
      }
    }
  }

  // 5. Surface terms.
  auto local_viscous_n = [&](int e, int q, const double n[3],
                             const GlobalField& grads,
                             const GlobalField& gradc,
                             State& out_fn) {
    State s;
    for (int v = 0; v < kNumVars; ++v) s[v] = Q.at(e, v, q);
    std::array<Vec3, kNumVars> gw;
    std::array<Vec3, 2> gc;
    for (int v = 0; v < kNumVars; ++v)
      for (int d = 0; d < 3; ++d) gw[v][d] = grads.at(e, v * 3 + d, q);
    for (int i = 0; i < 2; ++i)
      for (int d = 0; d < 3; ++d) gc[i][d] = gradc.at(e, i * 3 + d, q);
    const FluxBlock F = viscous_flux(s, gw, gc, params_);
    for (int v = 0; v < kNumVars; ++v)
      out_fn[v] = F[v][0] * n[0] + F[v][1] * n[1] + F[v][2] * n[2];
  };

  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    const auto& jacL = mesh.geom[f.left].jac;
    if (f.right >= 0) {
      const auto& jacR = mesh.geom[f.right].jac;
      for (int fp = 0; fp < nfp; ++fp) {
        const int ql = f.nodes_l[fp], qr = f.nodes_r[fp];
        const double n[3] = {f.nx[fp], f.ny[fp], f.nz[fp]};
        const Vec3 nv{n[0], n[1], n[2]};
        State qL, qR;
        for (int v = 0; v < kNumVars; ++v) {
          qL[v] = Q.at(f.left, v, ql);
          qR[v] = Q.at(f.right, v, qr);
        }
        const double facL = f.sj[fp] / (jacL[ql] * w0);
        const double facR = f.sj[fp] / (jacR[qr] * w0);

        // Inviscid: exact Riemann star flux.
        const State fstar = riemann_exact(qL, qR, nv, params_);
        const FluxBlock fL = inviscid_flux(qL, params_);
        const FluxBlock fR = inviscid_flux(qR, params_);
        for (int v = 0; v < kNumVars; ++v) {
          const double fnL = fL[v][0] * n[0] + fL[v][1] * n[1] + fL[v][2] * n[2];
          const double fnR = fR[v][0] * n[0] + fR[v][1] * n[1] + fR[v][2] * n[2];
          Qt.at(f.left, v, ql) -= (fstar[v] - fnL) * facL;
          Qt.at(f.right, v, qr) -= (-fstar[v] + fnR) * facR;
        }

        // Viscous: SIP star flux from element-local gradients plus penalty.
        State vL, vR, vLl, vRl;
        local_viscous_n(f.left, ql, n, GWloc, chem.grad_c_local, vL);
        local_viscous_n(f.right, qr, n, GWloc, chem.grad_c_local, vR);
        local_viscous_n(f.left, ql, n, GW, chem.grad_c, vLl);
        local_viscous_n(f.right, qr, n, GW, chem.grad_c, vRl);
        const double etaL = mixture_viscosity(qL[0], qL[1], params_);
        const double etaR = mixture_viscosity(qR[0], qR[1], params_);
        const double etab = 0.5 * (etaL + etaR);
        State vstar;
        for (int v = 0; v < kNumVars; ++v) {
          double coef, jump;
          if (v < 2) {
            coef = params_.M0;
            jump = W.at(f.left, v, ql) - W.at(f.right, v, qr);
          } else {
            coef = etab;
            jump = qL[v] - qR[v];
          }
          vstar[v] = 0.5 * (vL[v] + vR[v]) - f.beta * coef * jump;
        }
        if (!opt.ch_diffusion)
          vstar[0] = vstar[1] = vLl[0] = vLl[1] = vRl[0] = vRl[1] = 0.0;
        for (int v = 0; v < kNumVars; ++v) {
          Qt.at(f.left, v, ql) += (vstar[v] - vLl[v]) * facL;
          Qt.at(f.right, v, qr) += (-vstar[v] + vRl[v]) * facR;
        }
      }
    } else {
      const BoundaryCondition& bc = bcs_.at(f.tag);
      for (int fp = 0; fp < nfp; ++fp) {
        const int ql = f.nodes_l[fp];
        const double n[3] = {f.nx[fp], f.ny[fp], f.nz[fp]};
        const Vec3 nv{n[0], n[1], n[2]};
        State qL;
        for (int v = 0; v < kNumVars; ++v) qL[v] = Q.at(f.left, v, ql);
        const State qE = ghost_state(qL, static_cast<int>(fi), fp, nv);
        const double facL = f.sj[fp] / (jacL[ql] * w0);

        const State fstar = riemann_exact(qL, qE, nv, params_);
        const FluxBlock fL = inviscid_flux(qL, params_);
        for (int v = 0; v < kNumVars; ++v) {
          const double fnL = fL[v][0] * n[0] + fL[v][1] * n[1] + fL[v][2] * n[2];
          Qt.at(f.left, v, ql) -= (fstar[v] - fnL) * facL;
        }

        // Viscous boundary flux: interior momentum stresses at wall/inflow,
        // zero elsewhere (Neumann potentials, zero pressure row).
        State vstar{};
        if (bc.kind != BoundaryKind::Outflow) {
          State vloc;
          local_viscous_n(f.left, ql, n, GWloc, chem.grad_c_local, vloc);
          for (int v = 2; v < 5; ++v) vstar[v] = vloc[v];
        }
        State vLl;
        local_viscous_n(f.left, ql, n, GW, chem.grad_c, vLl);
        if (!opt.ch_diffusion) vLl[0] = vLl[1] = 0.0;
        for (int v = 0; v < kNumVars; ++v)
          Qt.at(f.left, v, ql) += (vstar[v] - vLl[v]) * facL;
      }
    }
  }
}

}  // namespace triflow
