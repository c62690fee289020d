#include "soar/stopping.hpp"

#include <cmath>

#include "soar/errors.hpp"

namespace soar::stopping {

const char* rule_name(RuleKind k) noexcept {
  switch (k) {
    case RuleKind::MorozovDP: return "dp";
    case RuleKind::TotalEnergyDP: return "tedp";
    case RuleKind::APriori: return "apriori";
    case RuleKind::MaxIterOnly: return "maxiter";
  }
  return "?";
}

const char* reason_name(StopReason r) noexcept {
  switch (r) {
    case StopReason::None: return "None";
    case StopReason::DiscrepancyCrossed: return "DiscrepancyCrossed";
    case StopReason::EnergyCrossed: return "EnergyCrossed";
    case StopReason::APrioriReached: return "APrioriReached";
    case StopReason::ImmediateStop: return "ImmediateStop";
    case StopReason::MaxIterExceeded: return "MaxIterExceeded";
  }
  return "?";
}

double StoppingRule::effective_tau_te() const {
  if (!table_mode) return tau;
  return 1.1 * std::pow(delta, 4.0 * p / (4.0 * p + 1.0));
}

StoppingRule morozov(double tau, double delta) {
  if (!(tau > 1.0))
    throw ConfigError("discrepancy principle requires tau > 1");
  if (delta < 0.0) throw ConfigError("noise level must be nonnegative");
  StoppingRule r;
  r.kind = RuleKind::MorozovDP;
  r.tau = tau;
  r.delta = delta;
  return r;
}

StoppingRule total_energy(double tau, double delta, bool table_mode, double p) {
  if (!(tau > 1.0))
    throw ConfigError("total-energy discrepancy requires tau > 1");
  if (delta < 0.0) throw ConfigError("noise level must be nonnegative");
  if (table_mode && !(p > 0.0))
    throw ConfigError("table-mode threshold needs the smoothness exponent p");
  StoppingRule r;
  r.kind = RuleKind::TotalEnergyDP;
  r.tau = tau;
  r.delta = delta;
  r.table_mode = table_mode;
  r.p = p;
  return r;
}

StoppingRule a_priori(double t_star) {
  if (t_star < 0.0) throw ConfigError("a-priori time must be nonnegative");
  StoppingRule r;
  r.kind = RuleKind::APriori;
  r.t_star = t_star;
  return r;
}

StoppingRule max_iter_only() {
  StoppingRule r;
  r.kind = RuleKind::MaxIterOnly;
  return r;
}

ChiEval eval_morozov(const solvers::SolverState& s, const StoppingRule& rule) {
  const double chi = s.residual_norm - rule.tau * rule.delta;
  return {chi, chi <= 0.0};
}

ChiEval eval_total_energy(const solvers::SolverState& s,
                          const StoppingRule& rule) {
  const double th = rule.effective_tau_te() * rule.delta;
  const double chi = s.energy() - th * th;
  return {chi, chi <= 0.0};
}

bool eval_a_priori(const solvers::SolverState& s, const StoppingRule& rule) {
  if (!rule.t_star)
    throw ConfigError("a-priori rule evaluated without t_star");
  return s.t >= *rule.t_star;
}

}  // namespace soar::stopping
