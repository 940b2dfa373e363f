#ifndef TRIFLOW_DG_OPERATORS_HPP
#define TRIFLOW_DG_OPERATORS_HPP

#include <functional>
#include <map>
#include <vector>

#include "triflow/boundary_conditions.hpp"
#include "triflow/mesh.hpp"
#include "triflow/phase_model.hpp"

namespace triflow {

/// Nodal storage for `nvar` variables on every element,
/// layout data[(elem * nvar + var) * npts + node].
struct GlobalField {
  int nelem = 0, nvar = 0, npts = 0;
  std::vector<double> data;

  GlobalField() = default;
  GlobalField(int ne, int nv, int np)
      : nelem(ne), nvar(nv), npts(np),
        data(static_cast<std::size_t>(ne) * nv * np, 0.0) {}

  double& at(int e, int v, int q) {
    return data[(static_cast<std::size_t>(e) * nvar + v) * npts + q];
  }
  double at(int e, int v, int q) const {
    return data[(static_cast<std::size_t>(e) * nvar + v) * npts + q];
  }
  double* block(int e, int v) {
    return data.data() + (static_cast<std::size_t>(e) * nvar + v) * npts;
  }
  const double* block(int e, int v) const {
    return data.data() + (static_cast<std::size_t>(e) * nvar + v) * npts;
  }
  void set_zero() { std::fill(data.begin(), data.end(), 0.0); }
};

/// Quadrature integral of one variable over the whole domain.
double field_integral(const Mesh& mesh, const GlobalField& f, int var);

/// Split-form two-point volume flux: products of arithmetic averages of the
/// primitive values of the two states. Consistent (F#(q,q) = inviscid flux)
/// and symmetric in its arguments.
FluxBlock two_point_flux(const State& qL, const State& qR,
                         const PhaseParams& params);

/// Exact Riemann solver of the artificial-compressibility pressure-velocity
/// system: star normal velocity/pressure from the two acoustic waves
/// lambda_K^+- = (u_K +- sqrt(u_K^2 + 4 rho0 c0^2 / rho_K)) / 2, remaining
/// variables upwinded by the sign of u* (ties take the left state).
/// Returns the normal flux along the given unit normal.
State riemann_exact(const State& qL, const State& qR, const Vec3& normal,
                    const PhaseParams& params);

/// Scalar SIP DG Laplacian on the mesh: lifted gradients with face averages,
/// face fluxes {grad u_local} - beta [[u]] n, homogeneous Neumann boundary
/// data unless a boundary flux is supplied. This single discretization is
/// shared by the chemical-potential evaluation, the concentration diffusion
/// rows and the implicit correction operator.
class ScalarLaplacian {
 public:
  /// Boundary normal-gradient flux g*.n per boundary face node; arguments
  /// are (face index in mesh.faces, face node index).
  using BoundaryFlux = std::function<double(int face, int fp)>;

  explicit ScalarLaplacian(const Mesh& mesh);

  /// out = Laplacian(u), u and out sized nelem*npts (element-major).
  void apply(const std::vector<double>& u, std::vector<double>& out,
             const BoundaryFlux* boundary_flux = nullptr) const;

  /// Column of the operator for the unit vector at (elem, node): results per
  /// touched element (1-ring patch), same npts-block layout.
  void apply_unit(int elem, int node,
                  std::map<int, std::vector<double>>& columns) const;

  const Mesh& mesh() const { return *mesh_; }
  const std::vector<int>& element_faces(int e) const { return elem_faces_[e]; }

 private:
  const Mesh* mesh_;
  std::vector<std::vector<int>> elem_faces_;
};

struct ResidualOptions {
  /// When false, the Cahn-Hilliard diffusion rows (M0 grad of the scaled
  /// potentials, volume and surface) are omitted: the concentrations are
  /// advected only, as required by the explicit IMEX stage. Chemical
  /// potentials are still evaluated for the capillary momentum source.
  bool ch_diffusion = true;

  /// Optional per-equation forcing s(x, t) added pointwise to the residual
  /// (used by manufactured-solution runs).
  using SourceFunction = std::function<State(const Vec3&, double)>;
  const SourceFunction* source = nullptr;
};

/// Chemical potentials and concentration gradients produced alongside them.
struct ChemicalState {
  GlobalField mu;            ///< 2 vars: mu1, mu2
  GlobalField grad_c;        ///< 6 vars: lifted gradient, var = i*3 + dim
  GlobalField grad_c_local;  ///< 6 vars: element-local gradient
};

/// The semi-discrete spatial operator: chemical potentials, gradient
/// variables, split-form inviscid divergence with Riemann interface fluxes,
/// SIP viscous coupling, boundary conditions and sources.
class SpatialOperator {
 public:
  SpatialOperator(const Mesh& mesh, const PhaseParams& params,
                  BoundarySet bcs);

  const Mesh& mesh() const { return *mesh_; }
  const PhaseParams& params() const { return params_; }
  const ScalarLaplacian& laplacian() const { return laplacian_; }

  /// mu_i = (12/eps) Sigma_i f_i - (3/4) eps Sigma_i Laplacian(c_i), with the
  /// contact-angle wall flux as inhomogeneous Neumann data.
  void chemical_potential(const GlobalField& Q, ChemicalState& chem) const;

  /// Laplacian inhomogeneity field produced by the contact-angle wall data
  /// alone (zero when all walls are at 90 degrees); used by the IMEX
  /// correction right-hand side.
  void wall_flux_lift(const GlobalField& Q, GlobalField& lift2) const;

  /// Lifted DG gradient of an nvar-variable field with face values {U} and
  /// boundary values taken from the interior (used by tests; the residual
  /// applies boundary-specific face values internally).
  void lifted_gradient(const GlobalField& U, GlobalField& G) const;

  /// Volume split-form divergence of the inviscid flux, divided by J; no
  /// surface terms.
  void split_divergence(const GlobalField& Q, GlobalField& out) const;

  /// Full semi-discrete residual Q_t.
  void residual(const GlobalField& Q, double t, const ResidualOptions& opt,
                GlobalField& Qt) const;

 private:
  const Mesh* mesh_;
  PhaseParams params_;
  BoundarySet bcs_;
  ScalarLaplacian laplacian_;
  /// Precomputed inflow data per boundary face node: c1, c2, u (steady).
  struct InflowNode {
    double c1, c2;
    Vec3 u;
  };
  std::map<int, std::vector<InflowNode>> inflow_nodes_;  // face -> nfp entries

  State ghost_state(const State& q_int, int face, int fp,
                    const Vec3& normal) const;
};

}  // namespace triflow

#endif
