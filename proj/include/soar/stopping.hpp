#pragma once

#include <cstddef>
#include <optional>

#include "soar/solver_state.hpp"

namespace soar::stopping {

enum class RuleKind { MorozovDP, TotalEnergyDP, APriori, MaxIterOnly };

enum class StopReason {
  None,
  DiscrepancyCrossed,
  EnergyCrossed,
  APrioriReached,
  ImmediateStop,
  MaxIterExceeded,
};

const char* rule_name(RuleKind k) noexcept;
const char* reason_name(StopReason r) noexcept;

/// A-posteriori / a-priori stopping configuration.
///
/// MorozovDP fires at the first iterate with ||A x - y^d|| <= tau * delta.
/// TotalEnergyDP fires at the first iterate with
///   ||A x - y^d||^2 + ||v||^2 <= (tau_eff * delta)^2,
/// where tau_eff = tau by default; with table_mode set it is the empirical
/// multiplier 1.1 * delta^{4p/(4p+1)} instead (recorded either way).
/// Rules are evaluated on the discrete trajectory; no interpolation between
/// steps. delta is an input, never estimated from data.
struct StoppingRule {
  RuleKind kind = RuleKind::MorozovDP;
  double tau = 2.0;        // must exceed the bias bound gamma1 >= 1
  double delta = 0.0;      // noise level
  std::optional<double> t_star;  // a-priori terminating time
  bool table_mode = false;
  double p = 0.0;          // smoothness exponent for the table_mode multiplier
  double tau1 = 1.0 + 1e-6;  // monitored threshold for the residual at stop

  double effective_tau_te() const;
};

StoppingRule morozov(double tau, double delta);
StoppingRule total_energy(double tau, double delta, bool table_mode = false,
                          double p = 0.0);
StoppingRule a_priori(double t_star);
StoppingRule max_iter_only();

struct ChiEval {
  double chi;
  bool fired;
};

/// chi = residual_norm - tau * delta; fired at the first chi <= 0 (the
/// boundary counts as a root).
ChiEval eval_morozov(const solvers::SolverState& s, const StoppingRule& rule);

/// chi_te = residual^2 + velocity^2 - (tau_eff * delta)^2; fired at the
/// first nonpositive value.
ChiEval eval_total_energy(const solvers::SolverState& s,
                          const StoppingRule& rule);

/// Fires at the first k with k * dt >= t_star. Throws ConfigError when
/// t_star is unset.
bool eval_a_priori(const solvers::SolverState& s, const StoppingRule& rule);

struct StoppingDecision {
  bool fired = false;
  std::size_t k_star = 0;
  double t_star = 0.0;
  StopReason reason = StopReason::None;
  double chi_value = 0.0;
  /// Whether ||A x(T*) - y^d|| >= tau1 * delta held at an energy stop;
  /// diagnostic only, never enforced.
  bool thm12_hypothesis_held = true;
};

}  // namespace soar::stopping
