#include "triflow/implicit_ch_system.hpp"

#include <sstream>

namespace triflow {

ImplicitOperator::ImplicitOperator(const ScalarLaplacian& laplacian,
                                   const PhaseParams& params, double dt,
                                   double S0)
    : dt_(dt), S0_(S0), params_(params) {
  if (dt <= 0.0) throw std::invalid_argument("ImplicitOperator: dt must be > 0");
  if (S0 < 0.0) throw std::invalid_argument("ImplicitOperator: S0 must be >= 0");
  const Mesh& mesh = laplacian.mesh();
  const int npts = mesh.npts;
  ndof_ = mesh.nelem * npts;

  std::vector<Eigen::Triplet<double>> trips;
  std::map<int, std::vector<double>> cols;
  for (int e = 0; e < mesh.nelem; ++e)
    for (int q = 0; q < npts; ++q) {
      laplacian.apply_unit(e, q, cols);
      const int col = e * npts + q;
      for (const auto& [eo, vals] : cols)
        for (int qo = 0; qo < npts; ++qo)
          if (vals[qo] != 0.0)
            trips.emplace_back(eo * npts + qo, col, vals[qo]);
    }
  L_.resize(ndof_, ndof_);
  L_.setFromTriplets(trips.begin(), trips.end());
  L_.makeCompressed();

  Eigen::SparseMatrix<double> I(ndof_, ndof_);
  I.setIdentity();
  A_ = (1.0 / dt_) * I;
  if (params_.M0 != 0.0) {
    A_ -= (params_.M0 * S0_) * L_;
    A_ = A_ + (0.75 * params_.eps * params_.M0) * (L_ * L_).eval();
  }
  A_.makeCompressed();

  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(A_);
  if (lu_->info() != Eigen::Success)
    throw ImplicitSolveError("implicit correction operator factorization failed");
}

std::vector<double> ImplicitOperator::correction_solve(
    const std::vector<double>& chat, const std::vector<double>& cn,
    const std::vector<double>& fn, const std::vector<double>* bw) const {
  if (static_cast<int>(chat.size()) != ndof_ ||
      static_cast<int>(cn.size()) != ndof_ ||
      static_cast<int>(fn.size()) != ndof_ ||
      (bw && static_cast<int>(bw->size()) != ndof_))
    throw std::invalid_argument("correction_solve: field size mismatch");

  Eigen::Map<const Eigen::VectorXd> vchat(chat.data(), ndof_);
  Eigen::Map<const Eigen::VectorXd> vcn(cn.data(), ndof_);
  Eigen::VectorXd rhs = vchat / dt_;
  if (params_.M0 != 0.0) {
    Eigen::VectorXd g(ndof_);
    for (int i = 0; i < ndof_; ++i) {
      g(i) = (12.0 / params_.eps) * fn[i];
      if (bw) g(i) -= 0.75 * params_.eps * (*bw)[i];
    }
    rhs += params_.M0 * (L_ * g);
    rhs -= (params_.M0 * S0_) * (L_ * vcn);
  }

  Eigen::VectorXd x = lu_->solve(rhs);
  const double resid = (A_ * x - rhs).lpNorm<Eigen::Infinity>();
  const double scale = rhs.lpNorm<Eigen::Infinity>();
  if (resid > 1e-10 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "implicit correction solve residual " << resid
        << " exceeds tolerance (rhs scale " << scale << ")";
    throw ImplicitSolveError(msg.str());
  }
  return std::vector<double>(x.data(), x.data() + ndof_);
}

}  // namespace triflow
