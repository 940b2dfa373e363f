#ifndef TRIFLOW_BOUNDARY_CONDITIONS_HPP
#define TRIFLOW_BOUNDARY_CONDITIONS_HPP

#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "triflow/phase_model.hpp"

namespace triflow {

struct BoundaryConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InflowSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BoundaryKind { Wall, Inflow, Outflow };

/// No-slip wall with prescribed contact angles (radians). The three angles
/// must satisfy the wall equilibrium constraint
/// sigma12 cos(t12) + sigma23 cos(t23) = sigma13 cos(t13).
struct WallSpec {
  double theta12 = std::numbers::pi / 2;
  double theta13 = std::numbers::pi / 2;
  double theta23 = std::numbers::pi / 2;
};

struct OutflowSpec {
  double ambient_pressure = 0.0;
};

/// Layered inflow: phase 1 above y12, phase 2 between y23 and y12, phase 3
/// below y23, blended with tanh layers of width `layer_eps`; the axial speed
/// is a Poiseuille parabola scaled per phase by V_max.
struct InflowSpec {
  enum class Section { Circular, Channel };
  Section section = Section::Circular;
  double radius = 1.0;  ///< pipe radius or channel half-height
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 axis{1.0, 0.0, 0.0};  ///< unit flow direction
  Vec3 up{0.0, 1.0, 0.0};    ///< unit direction of the layering coordinate

  Vec3 superficial{0.0, 0.0, 0.0};  ///< requested superficial velocities
  double slip12 = 0.0;              ///< V1max - V2max
  double slip23 = 0.0;              ///< V2max - V3max

  /// Profile parameters: either solved by solve_inflow_profile from the
  /// superficial/slip velocities, or prescribed directly.
  Vec3 vmax{0.0, 0.0, 0.0};
  double y12 = 0.0;
  double y23 = 0.0;
  bool prescribed = false;
  double layer_eps = 0.0;  ///< 0: use the phase-field interface width
};

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Wall;
  WallSpec wall;
  OutflowSpec outflow;
  InflowSpec inflow;
};

/// Boundary conditions per mesh tag id. Every tagged boundary must have an
/// entry; lookup of a missing tag throws BoundaryConfigError.
struct BoundarySet {
  std::map<int, BoundaryCondition> by_tag;
  const BoundaryCondition& at(int tag) const {
    auto it = by_tag.find(tag);
    if (it == by_tag.end())
      throw BoundaryConfigError("no boundary condition for tag " +
                                std::to_string(tag));
    return it->second;
  }
};

/// Throws BoundaryConfigError when the contact angles violate the wall
/// equilibrium constraint (tolerance 1e-10 relative to sigma13).
void validate_wall_spec(const WallSpec& spec, const PhaseParams& params);

/// Newton-Raphson completion of the layered profile: solves the 5x5 system
/// (two slip definitions + three superficial-velocity integrals over the
/// section) for (V1max, V2max, V3max, y12, y23). The incoming y12/y23 act as
/// the initial guess. Converged when the residual inf-norm <= 1e-12 within 50
/// iterations; otherwise throws InflowSolveError with the residual.
InflowSpec solve_inflow_profile(const InflowSpec& spec,
                                const PhaseParams& params);

/// Concentrations and velocity of the layered profile at a physical point of
/// the inflow section.
void inflow_state(const InflowSpec& spec, const PhaseParams& params,
                  const Vec3& x, double& c1, double& c2, Vec3& u);

/// Superficial velocity of phase i recomputed from a completed profile by
/// quadrature (round-trip check of the Newton solve).
double inflow_superficial_velocity(const InflowSpec& spec,
                                   const PhaseParams& params, int phase);

/// Ghost states for the inviscid (Riemann) boundary fluxes.
State inflow_ghost(const State& q_interior, const Vec3& x,
                   const InflowSpec& spec, const PhaseParams& params);
State outflow_ghost(const State& q_interior, const OutflowSpec& spec);
State wall_ghost(const State& q_interior, const Vec3& normal);

/// Contact-angle concentration-gradient flux G*_c . n = F_w at a wall node.
void wall_concentration_flux(double c1, double c2, const WallSpec& spec,
                             const PhaseParams& params, double& fw1,
                             double& fw2);

}  // namespace triflow

#endif
