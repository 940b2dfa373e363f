#include <doctest.h>

#include <cmath>
#include <random>

#include "triflow/phase_model.hpp"

using namespace triflow;

namespace {

PhaseParams sample_params() {
  return derive_params({1.0, 3.0, 2.0}, {1e-3, 2e-3, 1.5e-3}, 6.236e-3,
                       7.265e-3, 8.165e-3, 1.0 / std::sqrt(2.0), 1.134e-2,
                       1.0e3, {0.0, 0.0, -9.81});
}

// Independent oracle for the triple-well free energy.
double free_energy(double c1, double c2, double c3, const PhaseParams& p) {
  return p.sigma12 * c1 * c1 * c2 * c2 + p.sigma13 * c1 * c1 * c3 * c3 +
         p.sigma23 * c2 * c2 * c3 * c3 +
         c1 * c2 * c3 *
             (p.Sigma[0] * c1 + p.Sigma[1] * c2 + p.Sigma[2] * c3);
}

}  // namespace

TEST_CASE("derive_params computes spreading factors and totals") {
  auto p = sample_params();
  CHECK(p.Sigma[0] == doctest::Approx(6.236e-3 + 7.265e-3 - 8.165e-3));
  CHECK(p.Sigma[1] == doctest::Approx(6.236e-3 + 8.165e-3 - 7.265e-3));
  CHECK(p.Sigma[2] == doctest::Approx(7.265e-3 + 8.165e-3 - 6.236e-3));
  CHECK(3.0 / p.SigmaT ==
        doctest::Approx(1.0 / p.Sigma[0] + 1.0 / p.Sigma[1] + 1.0 / p.Sigma[2])
            .epsilon(1e-14));
  CHECK(p.rho0 == 3.0);
}

TEST_CASE("derive_params rejects singular spreading factors") {
  // sigma12 + sigma13 - sigma23 = 0
  CHECK_THROWS_AS(derive_params({1, 1, 1}, {1, 1, 1}, 1.0, 2.0, 3.0, 0.1, 0.1,
                                1.0, {0, 0, 0}),
                  SingularSpreadingFactorError);
  CHECK_THROWS_AS(derive_params({1, 1, -1}, {1, 1, 1}, 1.0, 1.0, 1.0, 0.1, 0.1,
                                1.0, {0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("mixture rules are linear and consistent at the vertices") {
  auto p = sample_params();
  CHECK(mixture_density(1, 0, p) == p.rho[0]);
  CHECK(mixture_density(0, 1, p) == p.rho[1]);
  CHECK(mixture_density(0, 0, p) == p.rho[2]);
  CHECK(mixture_viscosity(0.2, 0.3, p) ==
        doctest::Approx(0.2 * p.eta[0] + 0.3 * p.eta[1] + 0.5 * p.eta[2]));
}

TEST_CASE("recovery density floors and rejects nonphysical states") {
  auto p = sample_params();
  CHECK(recovery_density(0.4, 0.4, p) ==
        doctest::Approx(mixture_density(0.4, 0.4, p)));
  PhaseParams q = derive_params({1.0, 1.0, 1.0}, {1, 1, 1}, 1e-3, 1e-3, 1e-3,
                                0.1, 0.1, 1.0, {0, 0, 0});
  // Strong overshoot: c1 large negative makes rho negative only with
  // contrasting densities.
  PhaseParams r = derive_params({0.1, 10.0, 1.0}, {1, 1, 1}, 1e-3, 1e-3, 1e-3,
                                0.1, 0.1, 1.0, {0, 0, 0});
  CHECK_THROWS_AS(recovery_density(0.0, -0.2, r), NonphysicalDensityError);
  r.density_floor = 0.05;
  CHECK(recovery_density(0.0, -0.2, r) == doctest::Approx(0.05));
  (void)q;
}

TEST_CASE("free energy derivatives match finite differences of the oracle") {
  auto p = sample_params();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-0.2, 1.2);
  const double h = 1e-6;
  for (int s = 0; s < 30; ++s) {
    const double c1 = dist(rng), c2 = dist(rng), c3 = dist(rng);
    auto g = free_energy_derivatives(c1, c2, c3, p);
    double c[3] = {c1, c2, c3};
    for (int i = 0; i < 3; ++i) {
      double cp[3] = {c[0], c[1], c[2]}, cm[3] = {c[0], c[1], c[2]};
      cp[i] += h;
      cm[i] -= h;
      const double fd = (free_energy(cp[0], cp[1], cp[2], p) -
                         free_energy(cm[0], cm[1], cm[2], p)) /
                        (2 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(2e-6));
    }
  }
}

TEST_CASE("free energy hessian and third tensor match finite differences") {
  auto p = sample_params();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-0.2, 1.2);
  const double h = 1e-5;
  for (int s = 0; s < 20; ++s) {
    double c[3] = {dist(rng), dist(rng), dist(rng)};
    auto H = free_energy_hessian(c[0], c[1], c[2], p);
    auto T = free_energy_third(c[0], c[1], c[2], p);
    for (int a = 0; a < 3; ++a) {
      double cp[3] = {c[0], c[1], c[2]}, cm[3] = {c[0], c[1], c[2]};
      cp[a] += h;
      cm[a] -= h;
      auto gp = free_energy_derivatives(cp[0], cp[1], cp[2], p);
      auto gm = free_energy_derivatives(cm[0], cm[1], cm[2], p);
      auto Hp = free_energy_hessian(cp[0], cp[1], cp[2], p);
      auto Hm = free_energy_hessian(cm[0], cm[1], cm[2], p);
      for (int i = 0; i < 3; ++i) {
        CHECK(H[i][a] ==
              doctest::Approx((gp[i] - gm[i]) / (2 * h)).epsilon(5e-7));
        for (int b = 0; b < 3; ++b)
          CHECK(T[i][b][a] ==
                doctest::Approx((Hp[i][b] - Hm[i][b]) / (2 * h)).epsilon(5e-7));
      }
    }
  }
}

TEST_CASE("bulk potential derivatives match finite differences") {
  auto p = sample_params();
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> dist(-0.2, 1.2);
  const double h = 1e-5;
  for (int s = 0; s < 15; ++s) {
    double c[3] = {dist(rng), dist(rng), dist(rng)};
    auto J = bulk_potential_jacobian(c[0], c[1], c[2], p);
    auto H2 = bulk_potential_hessian(c[0], c[1], c[2], p);
    for (int a = 0; a < 3; ++a) {
      double cp[3] = {c[0], c[1], c[2]}, cm[3] = {c[0], c[1], c[2]};
      cp[a] += h;
      cm[a] -= h;
      auto fp = bulk_potential(cp[0], cp[1], cp[2], p);
      auto fm = bulk_potential(cm[0], cm[1], cm[2], p);
      auto Jp = bulk_potential_jacobian(cp[0], cp[1], cp[2], p);
      auto Jm = bulk_potential_jacobian(cm[0], cm[1], cm[2], p);
      for (int i = 0; i < 3; ++i) {
        CHECK(J[i][a] ==
              doctest::Approx((fp[i] - fm[i]) / (2 * h)).epsilon(5e-7));
        for (int b = 0; b < 3; ++b)
          CHECK(H2[i][b][a] ==
                doctest::Approx((Jp[i][b] - Jm[i][b]) / (2 * h)).epsilon(5e-7));
      }
    }
  }
}

TEST_CASE("bulk potential collapses to the double well when one phase vanishes") {
  auto p = sample_params();
  for (double c : {-0.1, 0.0, 0.3, 0.5, 0.8, 1.0, 1.1}) {
    auto f = bulk_potential(c, 0.0, 1.0 - c, p);
    CHECK(f[0] == doctest::Approx(c * (1 - c) * (1 - 2 * c)).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("third chemical potential satisfies the algebraic constraint") {
  auto p = sample_params();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int s = 0; s < 20; ++s) {
    const double mu1 = dist(rng), mu2 = dist(rng);
    const double mu3 = mu3_from_constraint(mu1, mu2, p);
    CHECK(mu1 / p.Sigma[0] + mu2 / p.Sigma[1] + mu3 / p.Sigma[2] ==
          doctest::Approx(0.0).epsilon(1e-13));
  }
}

TEST_CASE("inviscid flux matches a hand-computed sample") {
  auto p = sample_params();
  const double c1 = 0.3, c2 = 0.2;
  const double rho = mixture_density(c1, c2, p);
  const Vec3 u{0.5, -0.25, 1.0};
  State q{c1, c2, rho * u[0], rho * u[1], rho * u[2], 2.5};
  auto f = inviscid_flux(q, p);
  for (int d = 0; d < 3; ++d) {
    CHECK(f[0][d] == doctest::Approx(c1 * u[d]).epsilon(1e-14));
    CHECK(f[1][d] == doctest::Approx(c2 * u[d]).epsilon(1e-14));
    for (int i = 0; i < 3; ++i)
      CHECK(f[2 + i][d] ==
            doctest::Approx(rho * u[i] * u[d] + (i == d ? 2.5 : 0.0))
                .epsilon(1e-14));
    CHECK(f[5][d] ==
          doctest::Approx(p.rho0 * p.c0 * p.c0 * u[d]).epsilon(1e-14));
  }
}

TEST_CASE("viscous flux recovers the symmetric stress from momentum gradients") {
  auto p = sample_params();
  const double c1 = 0.25, c2 = 0.35;
  const double rho = mixture_density(c1, c2, p);
  const double eta = mixture_viscosity(c1, c2, p);
  const Vec3 u{0.2, -0.4, 0.9};
  // Prescribe gradients of c and u, build consistent momentum gradients.
  std::array<Vec3, 2> grad_c{Vec3{0.1, -0.2, 0.05}, Vec3{-0.3, 0.15, 0.2}};
  std::array<Vec3, 3> grad_u{Vec3{1.0, 0.5, -0.2}, Vec3{0.3, -0.7, 0.1},
                             Vec3{-0.4, 0.2, 0.6}};
  Vec3 grad_rho{};
  for (int d = 0; d < 3; ++d)
    grad_rho[d] = (p.rho[0] - p.rho[2]) * grad_c[0][d] +
                  (p.rho[1] - p.rho[2]) * grad_c[1][d];
  std::array<Vec3, kNumVars> grad_w{};
  grad_w[0] = {0.7, 0.8, -0.1};  // grad(mu1/Sigma1)
  grad_w[1] = {0.2, -0.6, 0.4};
  for (int i = 0; i < 3; ++i)
    for (int d = 0; d < 3; ++d)
      grad_w[2 + i][d] = rho * grad_u[i][d] + u[i] * grad_rho[d];
  grad_w[5] = {9.0, -3.0, 1.0};  // pressure gradient: must not enter

  State q{c1, c2, rho * u[0], rho * u[1], rho * u[2], 1.0};
  auto f = viscous_flux(q, grad_w, grad_c, p);
  for (int d = 0; d < 3; ++d) {
    CHECK(f[0][d] == doctest::Approx(p.M0 * grad_w[0][d]).epsilon(1e-13));
    CHECK(f[1][d] == doctest::Approx(p.M0 * grad_w[1][d]).epsilon(1e-13));
    for (int i = 0; i < 3; ++i)
      CHECK(f[2 + i][d] ==
            doctest::Approx(eta * (grad_u[i][d] + grad_u[d][i]))
                .epsilon(1e-12));
    CHECK(f[5][d] == 0.0);
  }
}

TEST_CASE("source term combines gravity and capillary forces") {
  auto p = sample_params();
  const double c1 = 0.5, c2 = 0.25;
  const double rho = mixture_density(c1, c2, p);
  State q{c1, c2, 0.1, 0.2, 0.3, 1.0};
  std::array<Vec3, 2> grad_c{Vec3{1.0, 0.0, -2.0}, Vec3{0.5, -1.0, 0.0}};
  std::array<double, 2> mu{0.3, -0.8};
  const double mu3 = mu3_from_constraint(mu[0], mu[1], p);
  auto s = source_term(q, grad_c, mu, p);
  CHECK(s[0] == 0.0);
  CHECK(s[1] == 0.0);
  CHECK(s[5] == 0.0);
  for (int d = 0; d < 3; ++d) {
    const double dc3 = -grad_c[0][d] - grad_c[1][d];
    CHECK(s[2 + d] == doctest::Approx(rho * p.gravity[d] +
                                      mu[0] * grad_c[0][d] +
                                      mu[1] * grad_c[1][d] + mu3 * dc3)
                          .epsilon(1e-14));
  }
  // Uniform concentration: capillary force vanishes, gravity remains.
  std::array<Vec3, 2> flat{Vec3{0, 0, 0}, Vec3{0, 0, 0}};
  auto s2 = source_term(q, flat, mu, p);
  CHECK(s2[4] == doctest::Approx(rho * p.gravity[2]).epsilon(1e-14));
}
