#include "triflow/time_integration.hpp"

#include <cmath>
#include <sstream>

namespace triflow {

ImexIntegrator::ImexIntegrator(const SpatialOperator& op,
                               const ImplicitOperator* implicit,
                               const ImexConfig& config)
    : op_(&op), implicit_(implicit), config_(config) {
  if (config_.dt <= 0.0)
    throw std::invalid_argument("ImexIntegrator: dt must be > 0");
  if (config_.S0 < 0.0)
    throw std::invalid_argument("ImexIntegrator: S0 must be >= 0");
  if (implicit_ && std::abs(implicit_->dt() - config_.dt) >
                       1e-14 * std::max(1.0, config_.dt))
    throw std::invalid_argument(
        "ImexIntegrator: implicit operator was factorized for a different dt");
}

void ImexIntegrator::explicit_stage(GlobalField& Q, double t) const {
  ResidualOptions opt;
  opt.ch_diffusion = false;
  if (source_) opt.source = &source_;
  GlobalField g(Q.nelem, Q.nvar, Q.npts), Qt;
  for (int s = 0; s < 3; ++s) {
    op_->residual(Q, t + LowStorageRK3::c[s] * config_.dt, opt, Qt);
    for (std::size_t i = 0; i < Q.data.size(); ++i) {
      g.data[i] = LowStorageRK3::a[s] * g.data[i] + Qt.data[i];
      Q.data[i] += LowStorageRK3::b[s] * config_.dt * g.data[i];
    }
  }
}

StepMonitor ImexIntegrator::imex_step(GlobalField& Q, double t,
                                      int step) const {
  const Mesh& mesh = op_->mesh();
  const int npts = mesh.npts;
  const std::size_t ndof = static_cast<std::size_t>(mesh.nelem) * npts;

  // Explicit data frozen at t^n: concentrations, bulk potentials and the
  // contact-angle wall lift.
  std::array<std::vector<double>, 2> cn, fn;
  std::vector<double> bw[2];
  const bool correct = implicit_ && op_->params().M0 != 0.0;
  if (correct) {
    for (int i = 0; i < 2; ++i) {
      cn[i].resize(ndof);
      fn[i].resize(ndof);
    }
    for (int e = 0; e < mesh.nelem; ++e)
      for (int q = 0; q < npts; ++q) {
        const double c1 = Q.at(e, 0, q), c2 = Q.at(e, 1, q);
        const Vec3 f0 = bulk_potential(c1, c2, 1.0 - c1 - c2, op_->params());
        const std::size_t idx = static_cast<std::size_t>(e) * npts + q;
        cn[0][idx] = c1;
        cn[1][idx] = c2;
        fn[0][idx] = f0[0];
        fn[1][idx] = f0[1];
      }
    GlobalField lift;
    op_->wall_flux_lift(Q, lift);
    for (int i = 0; i < 2; ++i) {
      bw[i].resize(ndof);
      for (int e = 0; e < mesh.nelem; ++e)
        std::copy(lift.block(e, i), lift.block(e, i) + npts,
                  bw[i].begin() + static_cast<std::size_t>(e) * npts);
    }
  }
  std::vector<double> c1n(ndof);
  for (int e = 0; e < mesh.nelem; ++e)
    std::copy(Q.block(e, 0), Q.block(e, 0) + npts,
              c1n.begin() + static_cast<std::size_t>(e) * npts);

  explicit_stage(Q, t);

  if (correct) {
    std::vector<double> chat(ndof);
    for (int i = 0; i < 2; ++i) {
      for (int e = 0; e < mesh.nelem; ++e)
        std::copy(Q.block(e, i), Q.block(e, i) + npts,
                  chat.begin() + static_cast<std::size_t>(e) * npts);
      const std::vector<double> cnew =
          implicit_->correction_solve(chat, cn[i], fn[i], &bw[i]);
      for (int e = 0; e < mesh.nelem; ++e)
        std::copy(cnew.begin() + static_cast<std::size_t>(e) * npts,
                  cnew.begin() + static_cast<std::size_t>(e + 1) * npts,
                  Q.block(e, i));
    }
  }

  StepMonitor mon;
  mon.step = step;
  mon.time = t + config_.dt;
  for (int e = 0; e < mesh.nelem; ++e)
    for (int q = 0; q < npts; ++q) {
      const std::size_t idx = static_cast<std::size_t>(e) * npts + q;
      mon.max_c1_residual =
          std::max(mon.max_c1_residual,
                   std::abs(Q.at(e, 0, q) - c1n[idx]) / config_.dt);
    }
  mon.advective_cfl = cfl_number(Q, false);
  mon.acoustic_cfl = cfl_number(Q, true);
  return mon;
}

double ImexIntegrator::cfl_number(const GlobalField& Q, bool acoustic) const {
  const Mesh& mesh = op_->mesh();
  const int npts = mesh.npts;
  const PhaseParams& p = op_->params();
  const double a2 = p.rho0 * p.c0 * p.c0;
  double lam = 0.0;
  for (int e = 0; e < mesh.nelem; ++e) {
    const auto& g = mesh.geom[e];
    for (int q = 0; q < npts; ++q) {
      const double rho = recovery_density(Q.at(e, 0, q), Q.at(e, 1, q), p);
      const double u[3] = {Q.at(e, 2, q) / rho, Q.at(e, 3, q) / rho,
                           Q.at(e, 4, q) / rho};
      const double cart = acoustic ? std::sqrt(a2 / rho) : 0.0;
      double s = 0.0;
      for (int d = 0; d < 3; ++d) {
        double ut = 0.0, mn = 0.0;
        for (int n = 0; n < 3; ++n) {
          const double m = g.m[(d * 3 + n) * npts + q];
          ut += m * u[n];
          mn += m * m;
        }
        s += std::abs(ut) + std::sqrt(mn) * cart;
      }
      lam = std::max(lam, s / g.jac[q]);
    }
  }
  return config_.dt * (mesh.order + 1) * lam;
}

std::vector<StepMonitor> ImexIntegrator::run(GlobalField& Q, double t0,
                                             const CheckpointFn& checkpoint) const {
  const long nsteps =
      std::lround((config_.t_final - t0) / config_.dt);
  std::vector<StepMonitor> monitors;
  monitors.reserve(std::max<long>(nsteps, 0));
  double t = t0;
  for (long s = 0; s < nsteps; ++s) {
    try {
      monitors.push_back(imex_step(Q, t, static_cast<int>(s + 1)));
    } catch (const NonphysicalDensityError& err) {
      std::ostringstream msg;
      msg << "step " << s + 1 << " (t = " << t << "): " << err.what();
      throw TimeSteppingError(msg.str());
    }
    t = t0 + (s + 1) * config_.dt;
    if (checkpoint && (config_.checkpoint_cadence > 0 &&
                           (s + 1) % config_.checkpoint_cadence == 0))
      checkpoint(monitors.back(), Q);
  }
  if (checkpoint &&
      (nsteps == 0 || config_.checkpoint_cadence <= 0 ||
       nsteps % config_.checkpoint_cadence != 0)) {
    StepMonitor final_mon;
    final_mon.step = static_cast<int>(nsteps);
    final_mon.time = t;
    if (!monitors.empty()) final_mon = monitors.back();
    checkpoint(final_mon, Q);
  }
  return monitors;
}

}  // namespace triflow
