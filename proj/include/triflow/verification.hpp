#ifndef TRIFLOW_VERIFICATION_HPP
#define TRIFLOW_VERIFICATION_HPP

#include <string>
#include <vector>

#include "triflow/time_integration.hpp"

namespace triflow {

struct SourceSynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A time-dependent analytic solution of the coupled system together with
/// the forcing that makes it exact: trigonometric concentrations and a
/// divergence-free trigonometric velocity on the periodic square [-1,1]^2
/// (constant in the third direction).
class ManufacturedCase {
 public:
  /// two_phase = true: single moving concentration, c2 identically zero.
  ManufacturedCase(const PhaseParams& params, bool two_phase);

  const PhaseParams& params() const { return params_; }
  bool two_phase() const { return two_phase_; }

  /// Conserved state (c1, c2, rho u, rho v, rho w, p) at a point.
  State exact(const Vec3& x, double t) const;

  /// Per-equation forcing derived analytically from the continuous system.
  State source(const Vec3& x, double t) const;

  /// Primitive values (used by the finite-difference oracle and tests).
  void concentrations(double x, double y, double t, double& c1,
                      double& c2) const;
  void velocity(double x, double y, double t, double& u, double& v) const;
  double pressure(double x, double y, double t) const;

 private:
  PhaseParams params_;
  bool two_phase_;
};

/// Independent check of the synthesized sources: the full PDE residual is
/// rebuilt with 8th-order spatial / 6th-order temporal central differences
/// of the primitive fields only, at `npoints` random space-time samples.
/// Returns the largest relative residual over all equations.
double source_oracle_residual(const ManufacturedCase& mc, int npoints,
                              unsigned seed);

/// Quadrature L2 errors per variable against the analytic solution at time t.
std::array<double, kNumVars> l2_error(const Mesh& mesh, const GlobalField& Q,
                                      const ManufacturedCase& mc, double t);

struct ConvergenceRow {
  int order = 0;       ///< polynomial order N
  int mesh = 0;        ///< elements per direction
  bool failed = false; ///< run aborted; errors are NaN
  std::array<double, kNumVars> error{};
  std::array<double, kNumVars> rate{};  ///< NaN on the first row of a block
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double dt = 0.0, t_final = 0.0;
  std::string to_text() const;  ///< aligned table
  std::string to_csv() const;
};

/// Runs the manufactured case on a list of square periodic meshes for each
/// polynomial order and tabulates L2 errors and observed convergence rates.
ConvergenceReport convergence_study(const ManufacturedCase& mc,
                                    const std::vector<int>& meshes,
                                    const std::vector<int>& orders, double dt,
                                    double t_final, double S0);

/// Builds the 2D periodic slab mesh used by the studies: m x m elements on
/// [-1,1]^2, one cube-shaped element thick in z, fully periodic.
Mesh manufactured_slab_mesh(int m, int order);

}  // namespace triflow

#endif
