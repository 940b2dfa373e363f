#ifndef TRIFLOW_PHASE_MODEL_HPP
#define TRIFLOW_PHASE_MODEL_HPP

#include <array>
#include <stdexcept>

namespace triflow {

using Vec3 = std::array<double, 3>;

/// Number of evolved equations: c1, c2, rho*u, rho*v, rho*w, p.
inline constexpr int kNumVars = 6;

using State = std::array<double, kNumVars>;     ///< (c1, c2, mx, my, mz, p)
using FluxBlock = std::array<Vec3, kNumVars>;   ///< one 3-vector per equation

struct SingularSpreadingFactorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonphysicalDensityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Physical constants of the three-phase model, with derived quantities.
struct PhaseParams {
  Vec3 rho{};            ///< phase densities [kg/m^3]
  Vec3 eta{};            ///< phase viscosities [Pa s]
  double sigma12 = 0.0;  ///< pairwise interfacial tensions [N/m]
  double sigma13 = 0.0;
  double sigma23 = 0.0;
  double eps = 0.0;      ///< interface width [m]
  double M0 = 0.0;       ///< mobility [m/s]
  double c0 = 0.0;       ///< artificial sound speed [m/s]
  Vec3 gravity{0.0, 0.0, 0.0};

  // Derived:
  Vec3 Sigma{};          ///< spreading factors Sigma_i = s_ij + s_ik - s_jk
  double SigmaT = 0.0;   ///< 3/SigmaT = sum_i 1/Sigma_i
  double rho0 = 0.0;     ///< max phase density

  /// Optional density floor for under-resolved runs (0 = off).
  double density_floor = 0.0;
};

/// Fills the derived members (Sigma, SigmaT, rho0) and validates inputs.
PhaseParams derive_params(const Vec3& rho, const Vec3& eta, double sigma12,
                          double sigma13, double sigma23, double eps, double M0,
                          double c0, const Vec3& gravity);

/// Linear mixture rules with c3 = 1 - c1 - c2.
double mixture_density(double c1, double c2, const PhaseParams& p);
double mixture_viscosity(double c1, double c2, const PhaseParams& p);

/// Density used for velocity recovery; applies the configured floor and
/// rejects non-positive values.
double recovery_density(double c1, double c2, const PhaseParams& p);

/// Partial derivatives of the chemical free energy F0 with respect to the
/// three concentrations treated as independent variables.
Vec3 free_energy_derivatives(double c1, double c2, double c3,
                             const PhaseParams& p);

/// Hessian of F0 (symmetric 3x3, row-major upper usage H[i][j]).
std::array<Vec3, 3> free_energy_hessian(double c1, double c2, double c3,
                                        const PhaseParams& p);

/// Third partial derivatives of F0, T[i][j][k] (fully symmetric).
std::array<std::array<Vec3, 3>, 3> free_energy_third(double c1, double c2,
                                                     double c3,
                                                     const PhaseParams& p);

/// Bulk chemical potentials f_i = (SigmaT/(3 Sigma_i)) sum_{j!=i}
/// (1/Sigma_j)(dF0/dc_i - dF0/dc_j).
Vec3 bulk_potential(double c1, double c2, double c3, const PhaseParams& p);

/// d f_i / d c_a with (i = 0..2 rows, a = 0..2 columns).
std::array<Vec3, 3> bulk_potential_jacobian(double c1, double c2, double c3,
                                            const PhaseParams& p);

/// d^2 f_i / (d c_a d c_b); index [i][a][b].
std::array<std::array<Vec3, 3>, 3> bulk_potential_hessian(
    double c1, double c2, double c3, const PhaseParams& p);

/// Inviscid flux block f_e(q). Velocities are recovered with the mixture
/// density. Throws NonphysicalDensityError when the density is not positive.
FluxBlock inviscid_flux(const State& q, const PhaseParams& p);

/// Viscous flux block. grad_w holds the gradients of the six gradient
/// variables (mu1/Sigma1, mu2/Sigma2, rho u, rho v, rho w, p); grad_c the
/// gradients of c1 and c2 used to recover the velocity gradient.
FluxBlock viscous_flux(const State& q, const std::array<Vec3, kNumVars>& grad_w,
                       const std::array<Vec3, 2>& grad_c,
                       const PhaseParams& p);

/// Gravity plus capillary source. mu = (mu1, mu2); mu3 and grad c3 follow
/// from the constraints.
State source_term(const State& q, const std::array<Vec3, 2>& grad_c,
                  const std::array<double, 2>& mu, const PhaseParams& p);

/// mu3 from the algebraic constraint mu1/S1 + mu2/S2 + mu3/S3 = 0.
inline double mu3_from_constraint(double mu1, double mu2,
                                  const PhaseParams& p) {
  return -p.Sigma[2] * (mu1 / p.Sigma[0] + mu2 / p.Sigma[1]);
}

}  // namespace triflow

#endif
