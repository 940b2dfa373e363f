#include "triflow/boundary_conditions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "triflow/nodal_basis.hpp"

namespace triflow {

namespace {

double layer_width(const InflowSpec& spec, const PhaseParams& params) {
  return spec.layer_eps > 0.0 ? spec.layer_eps : params.eps;
}

// Tanh-layered concentration profile along the layering coordinate y.
void layer_concentrations(double y, double y12, double y23, double eps,
                          double& c1, double& c2, double& c3) {
  const double t12 = std::tanh((y - y12) / eps);
  const double t23 = std::tanh((y - y23) / eps);
  c1 = 0.5 + 0.5 * t12;
  c2 = 0.5 * t23 - 0.5 * t12;
  c3 = 0.5 - 0.5 * t23;
}

// d(c_i)/d(y12) and d(c_i)/d(y23).
void layer_derivatives(double y, double y12, double y23, double eps,
                       double dc_dy12[3], double dc_dy23[3]) {
  const double s12 = 1.0 / std::cosh((y - y12) / eps);
  const double s23 = 1.0 / std::cosh((y - y23) / eps);
  const double d12 = -0.5 * s12 * s12 / eps;  // d(0.5 tanh)/dy12
  const double d23 = -0.5 * s23 * s23 / eps;
  dc_dy12[0] = d12;
  dc_dy12[1] = -d12;
  dc_dy12[2] = 0.0;
  dc_dy23[0] = 0.0;
  dc_dy23[1] = d23;
  dc_dy23[2] = -d23;
}

// Quadrature rule over the inflow section: points carry (y, parabola weight
// w*(1-(r/R)^2) already folded out -- we keep them separate).
struct SectionQuadrature {
  std::vector<double> y;        // layering coordinate of each point
  std::vector<double> w;        // measure weight
  std::vector<double> profile;  // 1 - (r/R)^2 at each point
  double area = 0.0;
};

SectionQuadrature section_quadrature(const InflowSpec& spec) {
  SectionQuadrature q;
  const double R = spec.radius;
  if (spec.section == InflowSpec::Section::Channel) {
    auto basis = gauss_lobatto(24);
    for (int i = 0; i < basis.num_points(); ++i) {
      const double y = R * basis.nodes[i];
      q.y.push_back(y);
      q.w.push_back(R * basis.weights[i]);
      q.profile.push_back(1.0 - (y / R) * (y / R));
    }
    q.area = 2.0 * R;
  } else {
    // Polar rule: Gauss-Lobatto in radius, uniform (spectral) in angle.
    auto basis = gauss_lobatto(24);
    const int nphi = 64;
    for (int i = 0; i < basis.num_points(); ++i) {
      const double r = 0.5 * R * (1.0 + basis.nodes[i]);
      const double wr = 0.5 * R * basis.weights[i] * r;
      for (int k = 0; k < nphi; ++k) {
        const double phi = 2.0 * M_PI * k / nphi;
        q.y.push_back(r * std::sin(phi));
        q.w.push_back(wr * 2.0 * M_PI / nphi);
        q.profile.push_back(1.0 - (r / R) * (r / R));
      }
    }
    q.area = M_PI * R * R;
  }
  return q;
}

}  // namespace

void validate_wall_spec(const WallSpec& spec, const PhaseParams& params) {
  const double lhs = params.sigma12 * std::cos(spec.theta12) +
                     params.sigma23 * std::cos(spec.theta23);
  const double rhs = params.sigma13 * std::cos(spec.theta13);
  const double scale =
      std::abs(params.sigma12) + std::abs(params.sigma13) +
      std::abs(params.sigma23);
  if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, scale))
    throw BoundaryConfigError(
        "wall contact angles violate the equilibrium constraint "
        "sigma12 cos(t12) + sigma23 cos(t23) = sigma13 cos(t13)");
}

InflowSpec solve_inflow_profile(const InflowSpec& spec,
                                const PhaseParams& params) {
  InflowSpec out = spec;
  if (out.prescribed) return out;
  const double eps = layer_width(spec, params);
  const auto quad = section_quadrature(spec);
  const double R = spec.radius;

  Eigen::VectorXd x(5);
  x << std::max(2.0 * spec.superficial[0], 0.1),
      std::max(2.0 * spec.superficial[1], 0.1),
      std::max(2.0 * spec.superficial[2], 0.1),
      (spec.y12 != 0.0 || spec.y23 != 0.0) ? spec.y12 : R / 3.0,
      (spec.y12 != 0.0 || spec.y23 != 0.0) ? spec.y23 : -R / 3.0;

  Eigen::VectorXd res(5);
  for (int it = 0; it < 50; ++it) {
    const double V[3] = {x(0), x(1), x(2)};
    const double y12 = x(3), y23 = x(4);
    double I[3] = {0, 0, 0}, dI12[3] = {0, 0, 0}, dI23[3] = {0, 0, 0};
    for (std::size_t n = 0; n < quad.y.size(); ++n) {
      double c[3], d12[3], d23[3];
      layer_concentrations(quad.y[n], y12, y23, eps, c[0], c[1], c[2]);
      layer_derivatives(quad.y[n], y12, y23, eps, d12, d23);
      const double wp = quad.w[n] * quad.profile[n];
      for (int i = 0; i < 3; ++i) {
        I[i] += wp * c[i];
        dI12[i] += wp * d12[i];
        dI23[i] += wp * d23[i];
      }
    }
    res(0) = V[0] - V[1] - spec.slip12;
    res(1) = V[1] - V[2] - spec.slip23;
    for (int i = 0; i < 3; ++i)
      res(2 + i) = V[i] * I[i] / quad.area - spec.superficial[i];

    if (res.lpNorm<Eigen::Infinity>() <= 1e-12) break;

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(5, 5);
    J(0, 0) = 1.0;
    J(0, 1) = -1.0;
    J(1, 1) = 1.0;
    J(1, 2) = -1.0;
    for (int i = 0; i < 3; ++i) {
      J(2 + i, i) = I[i] / quad.area;
      J(2 + i, 3) = V[i] * dI12[i] / quad.area;
      J(2 + i, 4) = V[i] * dI23[i] / quad.area;
    }
    // Minimum-norm least-squares step: robust when an interface is pinned
    // outside the section and its column vanishes.
    Eigen::VectorXd dx = J.completeOrthogonalDecomposition().solve(res);
    // Keep interface moves bounded by the section size.
    const double ymove = std::max(std::abs(dx(3)), std::abs(dx(4)));
    if (ymove > R) dx *= R / ymove;
    x -= dx;
  }

  if (res.lpNorm<Eigen::Infinity>() > 1e-12) {
    std::ostringstream msg;
    msg << "inflow profile Newton solve did not converge; residual = ("
        << res.transpose() << "), iterate = (" << x.transpose() << ")";
    throw InflowSolveError(msg.str());
  }
  out.vmax = {x(0), x(1), x(2)};
  out.y12 = x(3);
  out.y23 = x(4);
  return out;
}

void inflow_state(const InflowSpec& spec, const PhaseParams& params,
                  const Vec3& x, double& c1, double& c2, Vec3& u) {
  const double eps = layer_width(spec, params);
  Vec3 d{x[0] - spec.center[0], x[1] - spec.center[1], x[2] - spec.center[2]};
  const double y = d[0] * spec.up[0] + d[1] * spec.up[1] + d[2] * spec.up[2];
  double r2;
  if (spec.section == InflowSpec::Section::Channel) {
    r2 = y * y;
  } else {
    const double s = d[0] * spec.axis[0] + d[1] * spec.axis[1] +
                     d[2] * spec.axis[2];
    r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - s * s;
  }
  double c3;
  layer_concentrations(y, spec.y12, spec.y23, eps, c1, c2, c3);
  const double speed =
      (spec.vmax[0] * c1 + spec.vmax[1] * c2 + spec.vmax[2] * c3) *
      (1.0 - r2 / (spec.radius * spec.radius));
  u = {speed * spec.axis[0], speed * spec.axis[1], speed * spec.axis[2]};
}

double inflow_superficial_velocity(const InflowSpec& spec,
                                   const PhaseParams& params, int phase) {
  const double eps = layer_width(spec, params);
  const auto quad = section_quadrature(spec);
  double integral = 0.0;
  for (std::size_t n = 0; n < quad.y.size(); ++n) {
    double c[3];
    layer_concentrations(quad.y[n], spec.y12, spec.y23, eps, c[0], c[1], c[2]);
    integral += quad.w[n] * quad.profile[n] * c[phase];
  }
  return spec.vmax[phase] * integral / quad.area;
}

State inflow_ghost(const State& q_interior, const Vec3& x,
                   const InflowSpec& spec, const PhaseParams& params) {
  double c1, c2;
  Vec3 u;
  inflow_state(spec, params, x, c1, c2, u);
  const double rho = mixture_density(c1, c2, params);
  return State{c1, c2, rho * u[0], rho * u[1], rho * u[2], q_interior[5]};
}

State outflow_ghost(const State& q_interior, const OutflowSpec& spec) {
  State g = q_interior;
  g[5] = spec.ambient_pressure;
  return g;
}

State wall_ghost(const State& q_interior, const Vec3& normal) {
  State g = q_interior;
  const double mn = q_interior[2] * normal[0] + q_interior[3] * normal[1] +
                    q_interior[4] * normal[2];
  for (int d = 0; d < 3; ++d) g[2 + d] -= 2.0 * mn * normal[d];
  return g;
}

void wall_concentration_flux(double c1, double c2, const WallSpec& spec,
                             const PhaseParams& params, double& fw1,
                             double& fw2) {
  const double c3 = 1.0 - c1 - c2;
  const double k = -4.0 / params.eps;
  fw1 = k * (std::cos(spec.theta12) * c1 * c2 * (c1 + c2) +
             std::cos(spec.theta13) * c1 * c3 * (c1 + c3));
  fw2 = k * (-std::cos(spec.theta12) * c1 * c2 * (c1 + c2) +
             std::cos(spec.theta23) * c2 * c3 * (c1 + c3));
}

}  // namespace triflow
