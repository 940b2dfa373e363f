#ifndef TRIFLOW_NODAL_BASIS_HPP
#define TRIFLOW_NODAL_BASIS_HPP

#include <stdexcept>
#include <vector>

namespace triflow {

/// One-dimensional Legendre-Gauss-Lobatto collocation data for order N.
/// Immutable after construction; all 3D operators are tensor products of
/// these 1D blocks.
struct NodalBasis {
  int order = 0;                     ///< polynomial order N
  std::vector<double> nodes;         ///< N+1 points in [-1,1], increasing
  std::vector<double> weights;       ///< quadrature weights, sum = 2
  std::vector<double> diff;          ///< D(i,j) = l_j'(xi_i), row-major

  int num_points() const { return order + 1; }
  double d(int i, int j) const { return diff[i * (order + 1) + j]; }
};

struct InvalidOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Legendre-Gauss-Lobatto points, weights and differentiation matrix.
/// Throws InvalidOrderError for N < 1.
NodalBasis gauss_lobatto(int order);

/// Lagrange interpolation of nodal values to an arbitrary point.
double lagrange_interpolate(const NodalBasis& basis,
                            const std::vector<double>& values, double x);

/// Values of all N+1 Lagrange polynomials at x.
std::vector<double> lagrange_values(const NodalBasis& basis, double x);

/// Weighted inner product sum_i w_i f_i g_i. Throws on length mismatch.
double quadrature_inner_product(const std::vector<double>& f,
                                const std::vector<double>& g,
                                const std::vector<double>& weights);

}  // namespace triflow

#endif
