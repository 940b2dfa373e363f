#include "triflow/nodal_basis.hpp"

#include <cmath>
#include <limits>

namespace triflow {

namespace {

// Legendre polynomial P_N and derivative at x by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  double dp0 = 0.0, dp1 = 1.0;
  if (n == 0) {
    p = p0;
    dp = dp0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    const double dpk = dp0 + (2.0 * k - 1.0) * p1;
    p0 = p1;
    p1 = pk;
    dp0 = dp1;
    dp1 = dpk;
  }
  p = p1;
  dp = dp1;
}

}  // namespace

NodalBasis gauss_lobatto(int order) {
  if (order < 1) throw InvalidOrderError("gauss_lobatto: order must be >= 1");
  const int np = order + 1;
  NodalBasis basis;
  basis.order = order;
  basis.nodes.resize(np);
  basis.weights.resize(np);

  basis.nodes.front() = -1.0;
  basis.nodes.back() = 1.0;

  // Interior nodes are the roots of P_N'. Newton on q = P_N' with Chebyshev
  // Gauss-Lobatto initial guesses.
  const double eps = std::numeric_limits<double>::epsilon();
  for (int i = 1; i < order; ++i) {
    double x = -std::cos(M_PI * i / order);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(order, x, p, dp);
      // q = P_N', q' from the Legendre ODE: (1-x^2) P_N'' = 2x P_N' - N(N+1) P_N
      const double q = dp;
      const double dq = (2.0 * x * dp - order * (order + 1.0) * p) / (1.0 - x * x);
      const double dx = q / dq;
      x -= dx;
      if (std::abs(dx) <= 4.0 * eps * std::abs(x) + eps) break;
    }
    basis.nodes[i] = x;
  }

  // Symmetrize so that nodes are exactly antisymmetric about 0.
  for (int i = 0; i < np / 2; ++i) {
    const double s = 0.5 * (basis.nodes[np - 1 - i] - basis.nodes[i]);
    basis.nodes[i] = -s;
    basis.nodes[np - 1 - i] = s;
  }
  if (np % 2 == 1) basis.nodes[np / 2] = 0.0;

  // w_i = 2 / (N (N+1) P_N(x_i)^2)
  for (int i = 0; i < np; ++i) {
    double p, dp;
    legendre(order, basis.nodes[i], p, dp);
    basis.weights[i] = 2.0 / (order * (order + 1.0) * p * p);
  }
  for (int i = 0; i < np / 2; ++i) {
    const double w = 0.5 * (basis.weights[i] + basis.weights[np - 1 - i]);
    basis.weights[i] = w;
    basis.weights[np - 1 - i] = w;
  }

  // Differentiation matrix from barycentric weights.
  std::vector<double> bary(np, 1.0);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      if (j != i) bary[i] *= basis.nodes[i] - basis.nodes[j];
  for (auto& b : bary) b = 1.0 / b;

  basis.diff.assign(np * np, 0.0);
  for (int i = 0; i < np; ++i) {
    double diag = 0.0;
    for (int j = 0; j < np; ++j) {
      if (j == i) continue;
      const double dij = bary[j] / (bary[i] * (basis.nodes[i] - basis.nodes[j]));
      basis.diff[i * np + j] = dij;
      diag -= dij;
    }
    basis.diff[i * np + i] = diag;  // rows sum to zero exactly
  }
  return basis;
}

std::vector<double> lagrange_values(const NodalBasis& basis, double x) {
  const int np = basis.num_points();
  std::vector<double> vals(np, 0.0);
  // Barycentric form, with exact hit handling.
  for (int i = 0; i < np; ++i) {
    if (x == basis.nodes[i]) {
      vals[i] = 1.0;
      return vals;
    }
  }
  std::vector<double> bary(np, 1.0);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      if (j != i) bary[i] *= basis.nodes[i] - basis.nodes[j];
  double denom = 0.0;
  for (int i = 0; i < np; ++i) {
    vals[i] = 1.0 / (bary[i] * (x - basis.nodes[i]));
    denom += vals[i];
  }
  for (auto& v : vals) v /= denom;
  return vals;
}

double lagrange_interpolate(const NodalBasis& basis,
                            const std::vector<double>& values, double x) {
  const auto l = lagrange_values(basis, x);
  double s = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) s += l[i] * values[i];
  return s;
}

double quadrature_inner_product(const std::vector<double>& f,
                                const std::vector<double>& g,
                                const std::vector<double>& weights) {
  if (f.size() != g.size() || f.size() != weights.size())
    throw std::invalid_argument("quadrature_inner_product: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += weights[i] * f[i] * g[i];
  return s;
}

}  // namespace triflow
