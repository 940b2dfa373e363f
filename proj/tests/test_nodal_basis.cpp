#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "triflow/nodal_basis.hpp"

using namespace triflow;

namespace {

// Independent oracle: P_N' evaluated by the recurrence for the derivative of
// Legendre polynomials, with interior roots located by plain bisection.
double legendre_prime(int n, double x) {
  double p0 = 1.0, p1 = x, dp0 = 0.0, dp1 = 1.0;
  if (n == 0) return 0.0;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    const double dpk = dp0 + (2.0 * k - 1.0) * p1;
    p0 = p1;
    p1 = pk;
    dp0 = dp1;
    dp1 = dpk;
  }
  return dp1;
}

std::vector<double> bisection_interior_nodes(int n) {
  std::vector<double> roots;
  const int samples = 2000;
  double prev_x = -1.0 + 1e-12;
  double prev_f = legendre_prime(n, prev_x);
  for (int s = 1; s <= samples; ++s) {
    const double x = -1.0 + 2.0 * s / samples - 1e-12;
    const double f = legendre_prime(n, x);
    if (prev_f == 0.0) roots.push_back(prev_x);
    else if (prev_f * f < 0.0) {
      double a = prev_x, b = x, fa = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = legendre_prime(n, m);
        if (fa * fm <= 0.0) b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

}  // namespace

TEST_CASE("gauss_lobatto rejects invalid orders") {
  CHECK_THROWS_AS(gauss_lobatto(0), InvalidOrderError);
  CHECK_THROWS_AS(gauss_lobatto(-3), InvalidOrderError);
}

TEST_CASE("gauss_lobatto matches closed-form nodes and weights") {
  auto b1 = gauss_lobatto(1);
  CHECK(b1.nodes[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(b1.nodes[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  auto b2 = gauss_lobatto(2);
  CHECK(b2.nodes[1] == 0.0);
  CHECK(b2.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(b2.weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  auto b3 = gauss_lobatto(3);
  CHECK(b3.nodes[1] == doctest::Approx(-1.0 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK(b3.nodes[2] == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK(b3.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(b3.weights[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));

  auto b4 = gauss_lobatto(4);
  CHECK(b4.nodes[1] == doctest::Approx(-std::sqrt(3.0 / 7.0)).epsilon(1e-15));
  CHECK(b4.nodes[2] == 0.0);
  CHECK(b4.weights[0] == doctest::Approx(1.0 / 10.0).epsilon(1e-15));
  CHECK(b4.weights[1] == doctest::Approx(49.0 / 90.0).epsilon(1e-15));
  CHECK(b4.weights[2] == doctest::Approx(32.0 / 45.0).epsilon(1e-15));
}

TEST_CASE("interior nodes agree with a bisection oracle") {
  for (int n : {5, 7, 10}) {
    auto basis = gauss_lobatto(n);
    auto oracle = bisection_interior_nodes(n);
    REQUIRE(static_cast<int>(oracle.size()) == n - 1);
    for (int i = 1; i < n; ++i)
      CHECK(basis.nodes[i] == doctest::Approx(oracle[i - 1]).epsilon(1e-13));
  }
}

TEST_CASE("weights sum to the interval length and nodes are symmetric") {
  for (int n = 1; n <= 12; ++n) {
    auto basis = gauss_lobatto(n);
    double sum = 0.0;
    for (double w : basis.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    for (int i = 0; i <= n; ++i) {
      CHECK(basis.nodes[i] == -basis.nodes[n - i]);
      CHECK(basis.weights[i] == basis.weights[n - i]);
    }
    for (int i = 0; i < n; ++i) CHECK(basis.nodes[i] < basis.nodes[i + 1]);
  }
}

TEST_CASE("quadrature is exact for polynomials of degree 2N-1") {
  for (int n : {2, 4, 6}) {
    auto basis = gauss_lobatto(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      std::vector<double> f(n + 1), one(n + 1, 1.0);
      for (int i = 0; i <= n; ++i) f[i] = std::pow(basis.nodes[i], deg);
      const double exact = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1.0);
      CHECK(quadrature_inner_product(f, one, basis.weights) ==
            doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("differentiation matrix is exact on polynomials and rows sum to zero") {
  for (int n : {3, 5, 8}) {
    auto basis = gauss_lobatto(n);
    const int np = n + 1;
    for (int i = 0; i < np; ++i) {
      double row = 0.0;
      for (int j = 0; j < np; ++j) row += basis.d(i, j);
      CHECK(std::abs(row) < 1e-13);  // negative-sum diagonal
    }
    for (int deg = 1; deg <= n; ++deg) {
      for (int i = 0; i < np; ++i) {
        double der = 0.0;
        for (int j = 0; j < np; ++j)
          der += basis.d(i, j) * std::pow(basis.nodes[j], deg);
        CHECK(der == doctest::Approx(deg * std::pow(basis.nodes[i], deg - 1))
                         .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("summation-by-parts property of the LGL operator") {
  // Q + Q^T = B with Q = W D, B = diag(-1, 0, ..., 0, 1).
  for (int n : {2, 4, 7}) {
    auto basis = gauss_lobatto(n);
    const int np = n + 1;
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j) {
        const double q = basis.weights[i] * basis.d(i, j) +
                         basis.weights[j] * basis.d(j, i);
        double b = 0.0;
        if (i == 0 && j == 0) b = -1.0;
        if (i == n && j == n) b = 1.0;
        CHECK(q == doctest::Approx(b).epsilon(1e-13));
      }
  }
}

TEST_CASE("lagrange interpolation reproduces nodal polynomials") {
  auto basis = gauss_lobatto(5);
  std::vector<double> f(6);
  for (int i = 0; i < 6; ++i) {
    const double x = basis.nodes[i];
    f[i] = 1.0 + x * (2.0 + x * (-1.5 + x * (0.5 + x * (0.25 - 0.1 * x))));
  }
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    const double x = dist(rng);
    const double exact =
        1.0 + x * (2.0 + x * (-1.5 + x * (0.5 + x * (0.25 - 0.1 * x))));
    CHECK(lagrange_interpolate(basis, f, x) ==
          doctest::Approx(exact).epsilon(1e-13));
  }
  // Cardinal property at the nodes themselves.
  auto l = lagrange_values(basis, basis.nodes[2]);
  for (int i = 0; i < 6; ++i) CHECK(l[i] == (i == 2 ? 1.0 : 0.0));
}
