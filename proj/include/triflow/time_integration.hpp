#ifndef TRIFLOW_TIME_INTEGRATION_HPP
#define TRIFLOW_TIME_INTEGRATION_HPP

#include <array>
#include <functional>
#include <vector>

#include "triflow/dg_operators.hpp"
#include "triflow/implicit_ch_system.hpp"

namespace triflow {

struct TimeSteppingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Three-stage low-storage (2N) third-order Runge-Kutta coefficients.
struct LowStorageRK3 {
  static constexpr std::array<double, 3> a{0.0, -5.0 / 9.0, -153.0 / 128.0};
  static constexpr std::array<double, 3> b{1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0};
  static constexpr std::array<double, 3> c{0.0, 1.0 / 3.0, 3.0 / 4.0};
};

/// One low-storage RK3 step of y' = f(t, y). `rhs(t, y, dydt)` fills dydt;
/// y and the register are plain vectors.
template <class Rhs>
void rk3_step(std::vector<double>& y, double t, double dt, Rhs&& rhs) {
  std::vector<double> g(y.size(), 0.0), dydt(y.size());
  for (int s = 0; s < 3; ++s) {
    rhs(t + LowStorageRK3::c[s] * dt, y, dydt);
    for (std::size_t i = 0; i < y.size(); ++i) {
      g[i] = LowStorageRK3::a[s] * g[i] + dydt[i];
      y[i] += LowStorageRK3::b[s] * dt * g[i];
    }
  }
}

struct ImexConfig {
  double dt = 0.0;
  double S0 = 8.0;          ///< stabilization constant of the correction
  double t_final = 0.0;
  int checkpoint_cadence = 100;  ///< steps between checkpoint callbacks
};

/// Per-step diagnostics: the concentration residual monitor
/// max |(c1^{n+1} - c1^n)/dt| and the advective/acoustic CFL numbers.
struct StepMonitor {
  int step = 0;
  double time = 0.0;
  double max_c1_residual = 0.0;
  double advective_cfl = 0.0;
  double acoustic_cfl = 0.0;
};

/// IMEX driver: explicit low-storage RK3 for transport, viscous terms and
/// sources (concentration diffusion disabled), then the implicit correction
/// of both concentrations against the pre-factorized operator.
class ImexIntegrator {
 public:
  /// The implicit operator may be null, in which case steps are fully
  /// explicit (the diffusionless M0 = 0 limit).
  ImexIntegrator(const SpatialOperator& op, const ImplicitOperator* implicit,
                 const ImexConfig& config);

  /// Full RK3 advance of all equations with the concentration diffusion
  /// rows disabled; Q is updated in place.
  void explicit_stage(GlobalField& Q, double t) const;

  /// One complete IMEX step; returns the step monitor.
  StepMonitor imex_step(GlobalField& Q, double t, int step = 0) const;

  using CheckpointFn =
      std::function<void(const StepMonitor& monitor, const GlobalField& Q)>;

  /// Advances from t0 until t_final (steps of dt, the last step clamped is
  /// not needed: t_final is rounded to a whole number of steps). Invokes the
  /// checkpoint callback every `checkpoint_cadence` steps and at the end.
  /// Returns the monitor series.
  std::vector<StepMonitor> run(GlobalField& Q, double t0,
                               const CheckpointFn& checkpoint = {}) const;

  const ImexConfig& config() const { return config_; }

  /// Manufactured-solution forcing added to every residual evaluation.
  void set_source(ResidualOptions::SourceFunction source) {
    source_ = std::move(source);
  }

 private:
  const SpatialOperator* op_;
  const ImplicitOperator* implicit_;
  ImexConfig config_;
  ResidualOptions::SourceFunction source_;

  double cfl_number(const GlobalField& Q, bool acoustic) const;
};

}  // namespace triflow

#endif
