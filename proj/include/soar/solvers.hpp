#pragma once

#include <iosfwd>
#include <vector>

#include "soar/dense_operator.hpp"
#include "soar/solver_state.hpp"
#include "soar/stopping.hpp"

// Six iterative methods behind one stepping interface.
//
// The damped symplectic pair integrates x'' + eta x' = A^T(y - A x):
//
//   Stormer-Verlet (order 2):
//     v_half  = (v + dt/2 A^T(y - A x)) / (1 + dt eta / 2)   [implicit half step]
//     x_next  = x + dt v_half
//     v_next  = v_half + dt/2 (A^T(y - A x_next) - eta v_half)
//
//   damped symplectic Euler (order 1):
//     x_next = x + dt v
//     v_next = v + dt (A^T(y - A x_next) - eta v)
//   which telescopes into the three-term recurrence
//     x_next = x + (1 - dt eta)(x - x_prev) + dt^2 A^T(y - A x).
//
// Landweber, Nesterov, the Chebyshev nu-method (nu = 1/2) and conjugate
// gradients on the normal equation complete the comparison set.

namespace soar::solvers {

enum class Method {
  SoarStormerVerlet,
  SoarEuler,
  Landweber,
  Nesterov,
  Chebyshev,
  Cgne,
};

const char* method_name(Method m) noexcept;

struct SolverConfig {
  Method method = Method::SoarStormerVerlet;
  double dt = 0.0;   // 0 selects 0.9 * min(sqrt(2)/||A||, 2/eta)
  double eta = 0.0;  // damping, required by the symplectic methods
  double nesterov_alpha = 3.1;  // momentum offset, > 3
  Vector x0;
  Vector v0;
  std::size_t max_iter = 400000;
  /// The symplectic step bound dt <= min(sqrt(2)/||A||, 2/eta) and the
  /// gradient bound dt < 2/||A||^2 are enforced at validation unless set.
  bool override_step_size = false;
  // Trajectory thinning: every step up to thin_below, then every
  // thin_stride-th.
  std::size_t thin_below = 10000;
  std::size_t thin_stride = 10;
  std::size_t recompute_every = 64;
};

double default_dt(const DenseOperator& op, double eta);

/// Resolves dt (if 0) and checks the step-size preconditions.
/// Throws ConfigError when violated and override_step_size is unset.
SolverConfig validate(SolverConfig cfg, const DenseOperator& op);

/// Fresh state at k = 0 with norms computed.
SolverState init_state(const DenseOperator& op, const Vector& ydelta,
                       const SolverConfig& cfg);

/// One step of the configured method. Inputs are untouched; the returned
/// state has k incremented by exactly 1. Throws DivergenceError when the
/// iterate leaves the finite range and BreakdownError on conjugate-gradient
/// breakdown, both naming the step.
SolverState step(const SolverState& s, const DenseOperator& op,
                 const Vector& ydelta, const SolverConfig& cfg);

SolverState step_soar_sv(const SolverState& s, const DenseOperator& op,
                         const Vector& ydelta, const SolverConfig& cfg);
SolverState step_soar_euler(const SolverState& s, const DenseOperator& op,
                            const Vector& ydelta, const SolverConfig& cfg);
SolverState step_landweber(const SolverState& s, const DenseOperator& op,
                           const Vector& ydelta, const SolverConfig& cfg);
SolverState step_nesterov(const SolverState& s, const DenseOperator& op,
                          const Vector& ydelta, const SolverConfig& cfg);
SolverState step_chebyshev(const SolverState& s, const DenseOperator& op,
                           const Vector& ydelta, const SolverConfig& cfg);
SolverState step_cgne(const SolverState& s, const DenseOperator& op,
                      const Vector& ydelta, const SolverConfig& cfg);

/// Coefficients of the three-term form equivalent to the Euler scheme.
double semi_iterative_mu(const SolverConfig& cfg);     // 1 - dt * eta
double semi_iterative_omega(const SolverConfig& cfg);  // dt^2

/// Moduli of the eigenvalue pair of the one-step update map at each
/// spectral point lambda_i of A^T A (including lambda = 0 with multiplicity
/// n - rank):
///   mu+- = ((2 - dt^2 lambda) +- sqrt((2 - dt^2 lambda)^2
///           - (4 - dt^2 eta^2))) / (2 + dt eta).
struct ModeEigenvalues {
  double lambda;
  double mod_plus;
  double mod_minus;
};
std::vector<ModeEigenvalues> iteration_matrix_spectrum(const DenseOperator& op,
                                                       const SolverConfig& cfg);

struct TrajectoryPoint {
  std::size_t k;
  double t;
  double residual_norm;
  double velocity_norm;

  double energy() const {
    return residual_norm * residual_norm + velocity_norm * velocity_norm;
  }
};

struct RunResult {
  SolverState state;
  stopping::StoppingDecision decision;
  std::vector<TrajectoryPoint> trajectory;
};

/// Drives the configured method until the rule fires or max_iter is
/// reached (decision tagged MaxIterExceeded, no exception). Deterministic
/// given config and inputs.
RunResult run(const DenseOperator& op, const Vector& ydelta, SolverConfig cfg,
              const stopping::StoppingRule& rule);

/// CSV dump (k, t, residual_norm, velocity_norm, energy).
void write_trajectory(std::ostream& os,
                      const std::vector<TrajectoryPoint>& traj);

}  // namespace soar::solvers
