#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "triflow/implicit_ch_system.hpp"

using namespace triflow;

namespace {

constexpr double kPi = std::numbers::pi;

PhaseParams params_with_mobility(double M0) {
  return derive_params({1.0, 3.0, 2.0}, {1e-3, 1e-3, 1e-3}, 6.236e-3, 7.265e-3,
                       8.165e-3, 0.1, M0, 10.0, {0, 0, 0});
}

Mesh closed_box(int nx, int order) {
  BoxSpec spec;
  spec.nx = nx;
  spec.ny = spec.nz = 1;
  return build_box_mesh(spec, order);
}

}  // namespace

TEST_CASE("implicit operator: zero mobility gives the identity over dt") {
  const Mesh mesh = closed_box(2, 2);
  const ScalarLaplacian lap(mesh);
  const double dt = 1e-3;
  const ImplicitOperator op(lap, params_with_mobility(0.0), dt, 8.0);
  const int n = op.ndof();
  Eigen::VectorXd x = Eigen::VectorXd::Random(n);
  Eigen::VectorXd Ax = op.matrix() * x;
  for (int i = 0; i < n; ++i)
    CHECK(Ax(i) == doctest::Approx(x(i) / dt).epsilon(1e-13));

  std::vector<double> chat(n), cn(n, 0.2), fn(n, 0.1);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& v : chat) v = dist(rng);
  const auto out = op.correction_solve(chat, cn, fn);
  for (int i = 0; i < n; ++i)
    CHECK(out[i] == doctest::Approx(chat[i]).epsilon(1e-12));
}

TEST_CASE("implicit operator: constants map to themselves over dt") {
  const Mesh mesh = closed_box(3, 3);
  const ScalarLaplacian lap(mesh);
  const double dt = 5e-4;
  const ImplicitOperator op(lap, params_with_mobility(1e-2), dt, 8.0);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.ndof());
  Eigen::VectorXd A1 = op.matrix() * ones;
  for (int i = 0; i < op.ndof(); ++i)
    CHECK(A1(i) == doctest::Approx(1.0 / dt).epsilon(1e-8));
}

TEST_CASE("implicit operator: matches the dense unit-vector oracle") {
  const Mesh mesh = closed_box(1, 2);  // single element
  const ScalarLaplacian lap(mesh);
  const PhaseParams p = params_with_mobility(1e-2);
  const double dt = 1e-3, S0 = 8.0;
  const ImplicitOperator op(lap, p, dt, S0);
  const int n = op.ndof();

  // Dense L from the global apply() code path, then the dense A.
  Eigen::MatrixXd Ld(n, n);
  std::vector<double> u(n, 0.0), out;
  for (int c = 0; c < n; ++c) {
    u.assign(n, 0.0);
    u[c] = 1.0;
    lap.apply(u, out);
    for (int r = 0; r < n; ++r) Ld(r, c) = out[r];
  }
  Eigen::MatrixXd Ad = Eigen::MatrixXd::Identity(n, n) / dt - p.M0 * S0 * Ld +
                       0.75 * p.eps * p.M0 * (Ld * Ld);
  Eigen::MatrixXd As(op.matrix());
  CHECK((As - Ad).cwiseAbs().maxCoeff() < 1e-9 * Ad.cwiseAbs().maxCoeff());

  // Backward-Euler pure biharmonic diffusion of a sine perturbation
  // (f = 0, S0 = 0 so only the fourth-order term acts implicitly).
  const ImplicitOperator op0(lap, p, dt, 0.0);
  Eigen::MatrixXd Ad0 = Eigen::MatrixXd::Identity(n, n) / dt +
                        0.75 * p.eps * p.M0 * (Ld * Ld);
  std::vector<double> chat(n), cn(n, 0.0), fn(n, 0.0);
  for (int e = 0; e < mesh.nelem; ++e)
    for (int q = 0; q < mesh.npts; ++q)
      chat[e * mesh.npts + q] =
          0.5 + 0.1 * std::sin(kPi * mesh.geom[e].x[q]);
  Eigen::Map<Eigen::VectorXd> vchat(chat.data(), n);
  Eigen::VectorXd expect = Ad0.fullPivLu().solve(vchat / dt);
  const auto got = op0.correction_solve(chat, cn, fn);
  for (int i = 0; i < n; ++i)
    CHECK(got[i] == doctest::Approx(expect(i)).epsilon(1e-10));
}

TEST_CASE("correction solve: conserves mass and is deterministic") {
  const Mesh mesh = closed_box(3, 3);
  const ScalarLaplacian lap(mesh);
  const PhaseParams p = params_with_mobility(1e-2);
  const ImplicitOperator op(lap, p, 2e-4, 8.0);
  const int n = op.ndof();
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> chat(n), cn(n), fn(n);
  for (int i = 0; i < n; ++i) {
    chat[i] = 0.3 + 0.2 * dist(rng);
    cn[i] = chat[i] + 0.01 * (dist(rng) - 0.5);
    fn[i] = 0.05 * (dist(rng) - 0.5);
  }
  const auto c1 = op.correction_solve(chat, cn, fn);
  const auto c2 = op.correction_solve(chat, cn, fn);
  CHECK(c1 == c2);  // bit-identical repeat solves

  auto integral = [&](const std::vector<double>& v) {
    GlobalField f(mesh.nelem, 1, mesh.npts);
    f.data = v;
    return field_integral(mesh, f, 0);
  };
  CHECK(integral(c1) == doctest::Approx(integral(chat)).epsilon(1e-10));
}

TEST_CASE("correction solve: uniform state is a fixed point") {
  const Mesh mesh = closed_box(2, 2);
  const ScalarLaplacian lap(mesh);
  const ImplicitOperator op(lap, params_with_mobility(1e-2), 1e-3, 8.0);
  const int n = op.ndof();
  std::vector<double> chat(n, 0.4), cn(n, 0.4), fn(n, 0.07);
  const auto out = op.correction_solve(chat, cn, fn);
  for (double v : out) CHECK(v == doctest::Approx(0.4).epsilon(1e-11));
}

TEST_CASE("implicit operator: rejects invalid configuration") {
  const Mesh mesh = closed_box(1, 2);
  const ScalarLaplacian lap(mesh);
  CHECK_THROWS_AS(ImplicitOperator(lap, params_with_mobility(1e-2), -1.0, 8.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ImplicitOperator(lap, params_with_mobility(1e-2), 1e-3, -1.0),
                  std::invalid_argument);
}
