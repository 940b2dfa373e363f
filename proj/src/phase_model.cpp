#include "triflow/phase_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace triflow {

PhaseParams derive_params(const Vec3& rho, const Vec3& eta, double sigma12,
                          double sigma13, double sigma23, double eps, double M0,
                          double c0, const Vec3& gravity) {
  PhaseParams p;
  p.rho = rho;
  p.eta = eta;
  p.sigma12 = sigma12;
  p.sigma13 = sigma13;
  p.sigma23 = sigma23;
  p.eps = eps;
  p.M0 = M0;
  p.c0 = c0;
  p.gravity = gravity;

  for (int i = 0; i < 3; ++i) {
    if (rho[i] <= 0.0 || eta[i] <= 0.0)
      throw std::invalid_argument("derive_params: densities and viscosities must be positive");
  }
  if (eps <= 0.0 || M0 < 0.0 || c0 <= 0.0)
    throw std::invalid_argument(
        "derive_params: eps and c0 must be positive, M0 non-negative");

  p.Sigma[0] = sigma12 + sigma13 - sigma23;
  p.Sigma[1] = sigma12 + sigma23 - sigma13;
  p.Sigma[2] = sigma13 + sigma23 - sigma12;
  for (int i = 0; i < 3; ++i) {
    if (p.Sigma[i] == 0.0)
      throw SingularSpreadingFactorError(
          "derive_params: spreading factor Sigma_" + std::to_string(i + 1) +
          " is zero");
  }
  p.SigmaT = 3.0 / (1.0 / p.Sigma[0] + 1.0 / p.Sigma[1] + 1.0 / p.Sigma[2]);
  p.rho0 = std::max({rho[0], rho[1], rho[2]});
  return p;
}

double mixture_density(double c1, double c2, const PhaseParams& p) {
  const double c3 = 1.0 - c1 - c2;
  return p.rho[0] * c1 + p.rho[1] * c2 + p.rho[2] * c3;
}

double mixture_viscosity(double c1, double c2, const PhaseParams& p) {
  const double c3 = 1.0 - c1 - c2;
  return p.eta[0] * c1 + p.eta[1] * c2 + p.eta[2] * c3;
}

double recovery_density(double c1, double c2, const PhaseParams& p) {
  double rho = mixture_density(c1, c2, p);
  if (p.density_floor > 0.0) rho = std::max(rho, p.density_floor);
  if (rho <= 0.0)
    throw NonphysicalDensityError("mixture density is not positive: rho = " +
                                  std::to_string(rho));
  return rho;
}

Vec3 free_energy_derivatives(double c1, double c2, double c3,
                             const PhaseParams& p) {
  const double S = p.Sigma[0] * c1 + p.Sigma[1] * c2 + p.Sigma[2] * c3;
  Vec3 g;
  g[0] = 2.0 * p.sigma12 * c1 * c2 * c2 + 2.0 * p.sigma13 * c1 * c3 * c3 +
         c2 * c3 * S + c1 * c2 * c3 * p.Sigma[0];
  g[1] = 2.0 * p.sigma12 * c1 * c1 * c2 + 2.0 * p.sigma23 * c2 * c3 * c3 +
         c1 * c3 * S + c1 * c2 * c3 * p.Sigma[1];
  g[2] = 2.0 * p.sigma13 * c1 * c1 * c3 + 2.0 * p.sigma23 * c2 * c2 * c3 +
         c1 * c2 * S + c1 * c2 * c3 * p.Sigma[2];
  return g;
}

std::array<Vec3, 3> free_energy_hessian(double c1, double c2, double c3,
                                        const PhaseParams& p) {
  const double S = p.Sigma[0] * c1 + p.Sigma[1] * c2 + p.Sigma[2] * c3;
  std::array<Vec3, 3> h{};
  h[0][0] = 2.0 * p.sigma12 * c2 * c2 + 2.0 * p.sigma13 * c3 * c3 +
            2.0 * p.Sigma[0] * c2 * c3;
  h[1][1] = 2.0 * p.sigma12 * c1 * c1 + 2.0 * p.sigma23 * c3 * c3 +
            2.0 * p.Sigma[1] * c1 * c3;
  h[2][2] = 2.0 * p.sigma13 * c1 * c1 + 2.0 * p.sigma23 * c2 * c2 +
            2.0 * p.Sigma[2] * c1 * c2;
  h[0][1] = 4.0 * p.sigma12 * c1 * c2 + c3 * S + p.Sigma[1] * c2 * c3 +
            p.Sigma[0] * c1 * c3;
  h[0][2] = 4.0 * p.sigma13 * c1 * c3 + c2 * S + p.Sigma[2] * c2 * c3 +
            p.Sigma[0] * c1 * c2;
  h[1][2] = 4.0 * p.sigma23 * c2 * c3 + c1 * S + p.Sigma[2] * c1 * c3 +
            p.Sigma[1] * c1 * c2;
  h[1][0] = h[0][1];
  h[2][0] = h[0][2];
  h[2][1] = h[1][2];
  return h;
}

std::array<std::array<Vec3, 3>, 3> free_energy_third(double c1, double c2,
                                                     double c3,
                                                     const PhaseParams& p) {
  const double S = p.Sigma[0] * c1 + p.Sigma[1] * c2 + p.Sigma[2] * c3;
  std::array<std::array<Vec3, 3>, 3> t{};
  auto set = [&t](int a, int b, int c, double v) {
    t[a][b][c] = t[a][c][b] = t[b][a][c] = t[b][c][a] = t[c][a][b] =
        t[c][b][a] = v;
  };
  set(0, 0, 0, 0.0);
  set(1, 1, 1, 0.0);
  set(2, 2, 2, 0.0);
  set(0, 0, 1, 4.0 * p.sigma12 * c2 + 2.0 * p.Sigma[0] * c3);
  set(0, 0, 2, 4.0 * p.sigma13 * c3 + 2.0 * p.Sigma[0] * c2);
  set(0, 1, 1, 4.0 * p.sigma12 * c1 + 2.0 * p.Sigma[1] * c3);
  set(0, 2, 2, 4.0 * p.sigma13 * c1 + 2.0 * p.Sigma[2] * c2);
  set(1, 1, 2, 4.0 * p.sigma23 * c3 + 2.0 * p.Sigma[1] * c1);
  set(1, 2, 2, 4.0 * p.sigma23 * c2 + 2.0 * p.Sigma[2] * c1);
  set(0, 1, 2, S + p.Sigma[2] * c3 + p.Sigma[1] * c2 + p.Sigma[0] * c1);
  return t;
}

Vec3 bulk_potential(double c1, double c2, double c3, const PhaseParams& p) {
  const Vec3 g = free_energy_derivatives(c1, c2, c3, p);
  Vec3 f{};
  for (int i = 0; i < 3; ++i) {
    const double k = p.SigmaT / (3.0 * p.Sigma[i]);
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) s += (g[i] - g[j]) / p.Sigma[j];
    f[i] = k * s;
  }
  return f;
}

std::array<Vec3, 3> bulk_potential_jacobian(double c1, double c2, double c3,
                                            const PhaseParams& p) {
  const auto h = free_energy_hessian(c1, c2, c3, p);
  std::array<Vec3, 3> df{};
  for (int i = 0; i < 3; ++i) {
    const double k = p.SigmaT / (3.0 * p.Sigma[i]);
    for (int a = 0; a < 3; ++a) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j)
        if (j != i) s += (h[i][a] - h[j][a]) / p.Sigma[j];
      df[i][a] = k * s;
    }
  }
  return df;
}

std::array<std::array<Vec3, 3>, 3> bulk_potential_hessian(
    double c1, double c2, double c3, const PhaseParams& p) {
  const auto t = free_energy_third(c1, c2, c3, p);
  std::array<std::array<Vec3, 3>, 3> d2f{};
  for (int i = 0; i < 3; ++i) {
    const double k = p.SigmaT / (3.0 * p.Sigma[i]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j)
          if (j != i) s += (t[i][a][b] - t[j][a][b]) / p.Sigma[j];
        d2f[i][a][b] = k * s;
      }
  }
  return d2f;
}

FluxBlock inviscid_flux(const State& q, const PhaseParams& p) {
  const double rho = recovery_density(q[0], q[1], p);
  const Vec3 u{q[2] / rho, q[3] / rho, q[4] / rho};
  FluxBlock f{};
  for (int d = 0; d < 3; ++d) {
    f[0][d] = q[0] * u[d];
    f[1][d] = q[1] * u[d];
    for (int i = 0; i < 3; ++i)
      f[2 + i][d] = rho * u[i] * u[d] + (i == d ? q[5] : 0.0);
    f[5][d] = p.rho0 * p.c0 * p.c0 * u[d];
  }
  return f;
}

FluxBlock viscous_flux(const State& q, const std::array<Vec3, kNumVars>& grad_w,
                       const std::array<Vec3, 2>& grad_c,
                       const PhaseParams& p) {
  const double rho = recovery_density(q[0], q[1], p);
  const double eta = mixture_viscosity(q[0], q[1], p);
  const Vec3 u{q[2] / rho, q[3] / rho, q[4] / rho};
  Vec3 grad_rho{};
  for (int d = 0; d < 3; ++d)
    grad_rho[d] = (p.rho[0] - p.rho[2]) * grad_c[0][d] +
                  (p.rho[1] - p.rho[2]) * grad_c[1][d];

  // du_i/dx_d from the momentum and density gradients.
  std::array<Vec3, 3> grad_u{};
  for (int i = 0; i < 3; ++i)
    for (int d = 0; d < 3; ++d)
      grad_u[i][d] = (grad_w[2 + i][d] - u[i] * grad_rho[d]) / rho;

  FluxBlock f{};
  for (int d = 0; d < 3; ++d) {
    f[0][d] = p.M0 * grad_w[0][d];
    f[1][d] = p.M0 * grad_w[1][d];
    for (int i = 0; i < 3; ++i)
      f[2 + i][d] = eta * (grad_u[i][d] + grad_u[d][i]);
    f[5][d] = 0.0;
  }
  return f;
}

State source_term(const State& q, const std::array<Vec3, 2>& grad_c,
                  const std::array<double, 2>& mu, const PhaseParams& p) {
  const double rho = mixture_density(q[0], q[1], p);
  const double mu3 = mu3_from_constraint(mu[0], mu[1], p);
  State s{};
  for (int d = 0; d < 3; ++d) {
    const double dc3 = -grad_c[0][d] - grad_c[1][d];
    s[2 + d] = rho * p.gravity[d] + mu[0] * grad_c[0][d] +
               mu[1] * grad_c[1][d] + mu3 * dc3;
  }
  return s;
}

}  // namespace triflow
