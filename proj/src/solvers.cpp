#include "soar/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "soar/errors.hpp"
#include "soar/kernels.hpp"

namespace soar::solvers {

namespace {

// Chebyshev nu-method coefficients (nu = 1/2) of the three-term recurrence
//   x_k = x_{k-1} + mu_k (x_{k-1} - x_{k-2}) + omega_k A^T (y - A x_{k-1}),
// k = 1, 2, ...; mu_1 = 0, omega_1 = (4 nu + 2)/(4 nu + 1).
constexpr double kNu = 0.5;

double cheb_mu(std::size_t k) {
  if (k <= 1) return 0.0;
  const double kd = static_cast<double>(k);
  return (kd - 1.0) * (2.0 * kd - 3.0) * (2.0 * kd + 2.0 * kNu - 1.0) /
         ((kd + 2.0 * kNu - 1.0) * (2.0 * kd + 4.0 * kNu - 1.0) *
          (2.0 * kd + 2.0 * kNu - 3.0));
}

double cheb_omega(std::size_t k) {
  if (k <= 1) return (4.0 * kNu + 2.0) / (4.0 * kNu + 1.0);
  const double kd = static_cast<double>(k);
  return 4.0 * (2.0 * kd + 2.0 * kNu - 1.0) * (kd + kNu - 1.0) /
         ((kd + 2.0 * kNu - 1.0) * (2.0 * kd + 4.0 * kNu - 1.0));
}

bool is_soar(Method m) {
  return m == Method::SoarStormerVerlet || m == Method::SoarEuler;
}

// Working buffers shared across steps of one run.
struct Stepper {
  const DenseOperator& op;
  const Vector& y;
  const SolverConfig& cfg;
  Vector resid;  // y - A x for the current x
  Vector grad;   // A^T resid for the current x
  Vector tmp_m;
  Vector tmp_n;

  Stepper(const DenseOperator& o, const Vector& yd, const SolverConfig& c)
      : op(o), y(yd), cfg(c), resid(o.rows()), grad(o.cols()),
        tmp_m(o.rows()), tmp_n(o.cols()) {}

  void refresh_residual(SolverState& s) {
    op.apply(s.x, resid);
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = y[i] - resid[i];
    op.apply_adjoint(resid, grad);
    s.residual_norm = kernels::nrm2(resid);
  }

  void check_finite(const SolverState& s) const {
    if (!std::isfinite(s.residual_norm) || !std::isfinite(s.velocity_norm))
      throw DivergenceError(s.k, "iterate diverged at step " +
                                     std::to_string(s.k) + " (" +
                                     std::string(method_name(cfg.method)) + ")");
  }

  void advance(SolverState& s) {
    switch (cfg.method) {
      case Method::SoarStormerVerlet: sv(s); break;
      case Method::SoarEuler: euler(s); break;
      case Method::Landweber: landweber(s); break;
      case Method::Nesterov: nesterov(s); break;
      case Method::Chebyshev: chebyshev(s); break;
      case Method::Cgne: cgne(s); break;
    }
    s.k += 1;
    s.t = static_cast<double>(s.k) * cfg.dt;
    check_finite(s);
  }

  void sv(SolverState& s) {
    const double dt = cfg.dt, eta = cfg.eta;
    // implicit half step: v_half (1 + dt eta/2) = v + dt/2 grad
    const double denom = 1.0 + 0.5 * dt * eta;
    Vector& vh = tmp_n;
    for (std::size_t i = 0; i < vh.size(); ++i)
      vh[i] = (s.v[i] + 0.5 * dt * grad[i]) / denom;
    kernels::axpy(dt, vh, s.x);
    refresh_residual(s);
    for (std::size_t i = 0; i < vh.size(); ++i)
      s.v[i] = vh[i] + 0.5 * dt * (grad[i] - eta * vh[i]);
    s.velocity_norm = kernels::nrm2(s.v);
  }

  void euler(SolverState& s) {
    const double dt = cfg.dt, eta = cfg.eta;
    kernels::axpy(dt, s.v, s.x);
    refresh_residual(s);
    for (std::size_t i = 0; i < s.v.size(); ++i)
      s.v[i] = (1.0 - dt * eta) * s.v[i] + dt * grad[i];
    s.velocity_norm = kernels::nrm2(s.v);
  }

  void landweber(SolverState& s) {
    kernels::axpy(cfg.dt, grad, s.x);
    refresh_residual(s);
  }

  void nesterov(SolverState& s) {
    // Momentum factor of the step leaving iterate k: k/(k + alpha); zero on
    // the first step.
    const double m =
        static_cast<double>(s.k) / (static_cast<double>(s.k) + cfg.nesterov_alpha);
    Vector& z = tmp_n;
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] = s.x[i] + m * (s.x[i] - s.x_prev[i]);
    op.apply(z, tmp_m);
    for (std::size_t i = 0; i < tmp_m.size(); ++i) tmp_m[i] = y[i] - tmp_m[i];
    op.apply_adjoint(tmp_m, grad);
    s.x_prev = s.x;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      s.x[i] = z[i] + cfg.dt * grad[i];
    refresh_residual(s);
  }

  void chebyshev(SolverState& s) {
    const std::size_t k = s.k + 1;  // recurrence index of this step
    const double mu = cheb_mu(k), om = cheb_omega(k);
    Vector& xn = tmp_n;
    for (std::size_t i = 0; i < xn.size(); ++i)
      xn[i] = s.x[i] + mu * (s.x[i] - s.x_prev[i]) + om * grad[i];
    s.x_prev = s.x;
    s.x = xn;
    refresh_residual(s);
  }

  void cgne(SolverState& s) {
    Vector& q = tmp_m;
    op.apply(s.cg_direction, q);
    const double qq = kernels::dot(q, q);
    if (qq == 0.0)
      throw BreakdownError(s.k, "conjugate-gradient breakdown at step " +
                                    std::to_string(s.k) +
                                    ": zero direction curvature");
    const double alpha = s.cg_gamma / qq;
    kernels::axpy(alpha, s.cg_direction, s.x);
    if ((s.k + 1) % cfg.recompute_every == 0) {
      op.apply(s.x, s.cg_residual);
      for (std::size_t i = 0; i < s.cg_residual.size(); ++i)
        s.cg_residual[i] = y[i] - s.cg_residual[i];
    } else {
      kernels::axpy(-alpha, q, s.cg_residual);
    }
    op.apply_adjoint(s.cg_residual, grad);
    const double gamma_next = kernels::dot(grad, grad);
    const double beta = gamma_next / s.cg_gamma;
    for (std::size_t i = 0; i < s.cg_direction.size(); ++i)
      s.cg_direction[i] = grad[i] + beta * s.cg_direction[i];
    s.cg_gamma = gamma_next;
    s.residual_norm = kernels::nrm2(s.cg_residual);
  }
};

SolverState step_with(Method m, const SolverState& s, const DenseOperator& op,
                      const Vector& ydelta, const SolverConfig& cfg) {
  if (cfg.method != m)
    throw ContractViolation("step called with mismatched method tag");
  SolverState next = s;
  Stepper st(op, ydelta, cfg);
  // Rebuild the residual/gradient invariant for the incoming state; the
  // conjugate-gradient method carries its own working set in the state.
  if (m != Method::Cgne) st.refresh_residual(next);
  st.advance(next);
  return next;
}

}  // namespace

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::SoarStormerVerlet: return "soar_sv";
    case Method::SoarEuler: return "soar_euler";
    case Method::Landweber: return "landweber";
    case Method::Nesterov: return "nesterov";
    case Method::Chebyshev: return "chebyshev";
    case Method::Cgne: return "cgne";
  }
  return "?";
}

double default_dt(const DenseOperator& op, double eta) {
  const double norm = op.operator_norm();
  double bound = std::numeric_limits<double>::infinity();
  if (norm > 0.0) bound = std::sqrt(2.0) / norm;
  if (eta > 0.0) bound = std::min(bound, 2.0 / eta);
  if (!std::isfinite(bound)) return 1.0;
  return 0.9 * bound;
}

SolverConfig validate(SolverConfig cfg, const DenseOperator& op) {
  const std::size_t n = op.cols();
  if (cfg.x0.empty()) cfg.x0.assign(n, 0.0);
  if (cfg.v0.empty()) cfg.v0.assign(n, 0.0);
  if (cfg.x0.size() != n || cfg.v0.size() != n)
    throw ConfigError("initial data dimension does not match the operator");
  if (cfg.max_iter == 0) throw ConfigError("max_iter must be positive");

  const double norm = op.operator_norm();
  if (is_soar(cfg.method)) {
    if (!(cfg.eta > 0.0))
      throw ConfigError("symplectic methods need a positive damping eta");
    if (cfg.dt == 0.0) cfg.dt = default_dt(op, cfg.eta);
    const double bound =
        std::min(norm > 0.0 ? std::sqrt(2.0) / norm
                            : std::numeric_limits<double>::infinity(),
                 2.0 / cfg.eta);
    if (cfg.dt > bound * (1.0 + 1e-12) && !cfg.override_step_size)
      throw ConfigError(
          "step size violates dt <= min(sqrt(2)/||A||, 2/eta) = " +
          std::to_string(bound) + "; set override_step_size to force");
  } else if (cfg.method == Method::Landweber || cfg.method == Method::Nesterov) {
    if (cfg.dt == 0.0) cfg.dt = norm > 0.0 ? 1.0 / (norm * norm) : 1.0;
    if (norm > 0.0 && cfg.dt >= 2.0 / (norm * norm) && !cfg.override_step_size)
      throw ConfigError("step size violates dt < 2/||A||^2");
    if (cfg.method == Method::Nesterov && !(cfg.nesterov_alpha > 3.0))
      throw ConfigError("nesterov momentum offset must exceed 3");
  } else {
    // Chebyshev and CGNE choose their own step lengths; dt only scales the
    // reported pseudo-time.
    if (cfg.dt == 0.0) cfg.dt = 1.0;
  }
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (cfg.thin_stride == 0) cfg.thin_stride = 1;
  return cfg;
}

SolverState init_state(const DenseOperator& op, const Vector& ydelta,
                       const SolverConfig& cfg) {
  if (ydelta.size() != op.rows())
    throw ContractViolation("data dimension does not match the operator");
  SolverState s;
  s.x = cfg.x0;
  s.v = cfg.v0;
  s.x_prev = cfg.x0;
  s.k = 0;
  s.t = 0.0;
  Vector r = op.apply(s.x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ydelta[i] - r[i];
  s.residual_norm = kernels::nrm2(r);
  s.velocity_norm = is_soar(cfg.method) ? kernels::nrm2(s.v) : 0.0;
  if (!is_soar(cfg.method)) s.v.assign(op.cols(), 0.0);
  if (cfg.method == Method::Cgne) {
    s.cg_residual = std::move(r);
    s.cg_direction = op.apply_adjoint(s.cg_residual);
    s.cg_gamma = kernels::dot(s.cg_direction, s.cg_direction);
  }
  return s;
}

SolverState step(const SolverState& s, const DenseOperator& op,
                 const Vector& ydelta, const SolverConfig& cfg) {
  return step_with(cfg.method, s, op, ydelta, cfg);
}

SolverState step_soar_sv(const SolverState& s, const DenseOperator& op,
                         const Vector& ydelta, const SolverConfig& cfg) {
  return step_with(Method::SoarStormerVerlet, s, op, ydelta, cfg);
}
SolverState step_soar_euler(const SolverState& s, const DenseOperator& op,
                            const Vector& ydelta, const SolverConfig& cfg) {
  return step_with(Method::SoarEuler, s, op, ydelta, cfg);
}
SolverState step_landweber(const SolverState& s, const DenseOperator& op,
                           const Vector& ydelta, const SolverConfig& cfg) {
  return step_with(Method::Landweber, s, op, ydelta, cfg);
}
SolverState step_nesterov(const SolverState& s, const DenseOperator& op,
                          const Vector& ydelta, const SolverConfig& cfg) {
  return step_with(Method::Nesterov, s, op, ydelta, cfg);
}
SolverState step_chebyshev(const SolverState& s, const DenseOperator& op,
                           const Vector& ydelta, const SolverConfig& cfg) {
  return step_with(Method::Chebyshev, s, op, ydelta, cfg);
}
SolverState step_cgne(const SolverState& s, const DenseOperator& op,
                      const Vector& ydelta, const SolverConfig& cfg) {
  return step_with(Method::Cgne, s, op, ydelta, cfg);
}

double semi_iterative_mu(const SolverConfig& cfg) { return 1.0 - cfg.dt * cfg.eta; }
double semi_iterative_omega(const SolverConfig& cfg) { return cfg.dt * cfg.dt; }

std::vector<ModeEigenvalues> iteration_matrix_spectrum(const DenseOperator& op,
                                                       const SolverConfig& cfg) {
  if (!is_soar(cfg.method))
    throw ContractViolation("iteration matrix spectrum is defined for the "
                            "symplectic methods");
  SolverConfig c = validate(cfg, op);
  const double dt = c.dt, eta = c.eta;
  const SvdSystem& sys = op.svd();

  std::vector<double> lambdas;
  lambdas.reserve(sys.rank() + 1);
  for (double s : sys.singular_values) lambdas.push_back(s * s);
  for (std::size_t i = sys.rank(); i < op.cols(); ++i) lambdas.push_back(0.0);

  std::vector<ModeEigenvalues> out;
  out.reserve(lambdas.size());
  const double denom = 2.0 + dt * eta;
  for (double lam : lambdas) {
    const double b = 2.0 - dt * dt * lam;
    const double disc = b * b - (4.0 - dt * dt * eta * eta);
    double mp, mm;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      mp = std::abs((b + root) / denom);
      mm = std::abs((b - root) / denom);
    } else {
      // complex pair: |mu|^2 = (4 - dt^2 eta^2) / (2 + dt eta)^2
      const double mod = std::sqrt((4.0 - dt * dt * eta * eta)) / denom;
      mp = mm = mod;
    }
    out.push_back({lam, mp, mm});
  }
  return out;
}

namespace {

stopping::StoppingDecision evaluate_rule(const SolverState& s,
                                         const stopping::StoppingRule& rule) {
  using stopping::RuleKind;
  using stopping::StopReason;
  stopping::StoppingDecision d;
  d.k_star = s.k;
  d.t_star = s.t;
  switch (rule.kind) {
    case RuleKind::MorozovDP: {
      const auto e = stopping::eval_morozov(s, rule);
      d.chi_value = e.chi;
      if (e.fired) {
        d.fired = true;
        d.reason = (s.k == 0 && e.chi < 0.0) ? StopReason::ImmediateStop
                                             : StopReason::DiscrepancyCrossed;
      }
      break;
    }
    case RuleKind::TotalEnergyDP: {
      const auto e = stopping::eval_total_energy(s, rule);
      d.chi_value = e.chi;
      if (e.fired) {
        d.fired = true;
        d.reason = (s.k == 0 && e.chi < 0.0) ? StopReason::ImmediateStop
                                             : StopReason::EnergyCrossed;
        d.thm12_hypothesis_held = s.residual_norm >= rule.tau1 * rule.delta;
      }
      break;
    }
    case RuleKind::APriori: {
      if (stopping::eval_a_priori(s, rule)) {
        d.fired = true;
        d.reason = StopReason::APrioriReached;
      }
      break;
    }
    case RuleKind::MaxIterOnly:
      break;
  }
  return d;
}

}  // namespace

RunResult run(const DenseOperator& op, const Vector& ydelta, SolverConfig cfg,
              const stopping::StoppingRule& rule) {
  cfg = validate(cfg, op);
  RunResult res;
  SolverState s = init_state(op, ydelta, cfg);

  res.trajectory.push_back({s.k, s.t, s.residual_norm, s.velocity_norm});
  stopping::StoppingDecision d = evaluate_rule(s, rule);
  if (d.fired) {
    res.state = std::move(s);
    res.decision = d;
    return res;
  }

  Stepper st(op, ydelta, cfg);
  if (cfg.method != Method::Cgne) st.refresh_residual(s);
  while (s.k < cfg.max_iter) {
    st.advance(s);
    const bool record = s.k <= cfg.thin_below || s.k % cfg.thin_stride == 0;
    d = evaluate_rule(s, rule);
    if (record || d.fired)
      res.trajectory.push_back({s.k, s.t, s.residual_norm, s.velocity_norm});
    if (d.fired) {
      res.state = std::move(s);
      res.decision = d;
      return res;
    }
  }
  d.fired = false;
  d.reason = stopping::StopReason::MaxIterExceeded;
  d.k_star = s.k;
  d.t_star = s.t;
  res.state = std::move(s);
  res.decision = d;
  return res;
}

void write_trajectory(std::ostream& os,
                      const std::vector<TrajectoryPoint>& traj) {
  os << "k,t,residual_norm,velocity_norm,energy\n";
  os.precision(17);
  for (const auto& p : traj)
    os << p.k << ',' << p.t << ',' << p.residual_norm << ','
       << p.velocity_norm << ',' << p.energy() << '\n';
}

}  // namespace soar::solvers
