#ifndef TRIFLOW_IMPLICIT_CH_SYSTEM_HPP
#define TRIFLOW_IMPLICIT_CH_SYSTEM_HPP

#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "triflow/dg_operators.hpp"

namespace triflow {

struct ImplicitSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The constant linear operator of the IMEX concentration correction,
///   A = I/dt - M0 S0 L + (3/4) eps M0 L^2,
/// with L the homogeneous-Neumann SIP Laplacian, assembled sparsely and
/// LU-factorized exactly once. The scaled-potential formulation removes the
/// spreading-factor dependence from the implicit part, so the same
/// factorization serves both concentrations.
class ImplicitOperator {
 public:
  /// Assembles L column-by-column from the Laplacian's unit responses,
  /// forms A and factorizes it. dt > 0, S0 >= 0.
  ImplicitOperator(const ScalarLaplacian& laplacian, const PhaseParams& params,
                   double dt, double S0);

  int ndof() const { return ndof_; }
  double dt() const { return dt_; }
  double stabilization() const { return S0_; }
  const Eigen::SparseMatrix<double>& laplacian_matrix() const { return L_; }
  const Eigen::SparseMatrix<double>& matrix() const { return A_; }

  /// Solves A c^{n+1} = chat/dt + M0 L((12/eps) f^n - (3/4) eps bw^n)
  ///                    - M0 S0 L c^n
  /// for one concentration. All fields are element-major scalars of length
  /// ndof; fn holds the bulk-potential values f_i(c^n); bw (optional) the
  /// contact-angle wall-flux lift field. Throws ImplicitSolveError when the
  /// back-substituted residual exceeds 1e-10 relative to the right-hand side.
  std::vector<double> correction_solve(
      const std::vector<double>& chat, const std::vector<double>& cn,
      const std::vector<double>& fn,
      const std::vector<double>* bw = nullptr) const;

 private:
  int ndof_ = 0;
  double dt_ = 0.0, S0_ = 0.0;
  PhaseParams params_;
  Eigen::SparseMatrix<double> L_, A_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

}  // namespace triflow

#endif
