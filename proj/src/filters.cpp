#include "soar/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "soar/errors.hpp"
#include "soar/kernels.hpp"

namespace soar::filters {

namespace {

constexpr double kCriticalBand = 1e-9;  // relative half-width around 4*lambda = eta^2
constexpr double kE = 2.718281828459045235360287471352662498;

// Largest singular value strictly below eta/2, if any.
std::optional<double> sigma_below_half_eta(double eta,
                                           std::span<const double> sv) {
  std::optional<double> best;
  for (double s : sv) {
    if (s < eta / 2 && s > 0.0 && (!best || s > *best)) best = s;
  }
  return best;
}

bool spectrum_has_critical(double eta, std::span<const double> sv) {
  for (double s : sv)
    if (std::abs(2 * s - eta) <= kCriticalBand * eta) return true;
  return false;
}

}  // namespace

const char* regime_name(Regime r) noexcept {
  switch (r) {
    case Regime::Overdamped: return "overdamped";
    case Regime::Underdamped: return "underdamped";
    case Regime::Critical: return "critical";
  }
  return "?";
}

Regime classify(const DampingConfig& cfg, double lambda) {
  const double eta2 = cfg.eta * cfg.eta;
  const double d = eta2 - 4.0 * lambda;
  if (std::abs(d) <= kCriticalBand * eta2) return Regime::Critical;
  return d > 0.0 ? Regime::Overdamped : Regime::Underdamped;
}

ModeResponse mode_response(double eta, double lambda, double t) {
  const double eta2 = eta * eta;
  const double d = eta2 - 4.0 * lambda;
  ModeResponse out{};

  if (std::abs(d) <= kCriticalBand * eta2) {
    out.regime = Regime::Critical;
    const double x = 0.5 * eta * t;
    const double e = std::exp(-x);
    out.r = e * (x + 1.0);
    out.phi = t * e;
    // 1 - e^{-x}(x+1); the direct subtraction cancels for small x.
    double lg;
    if (x < 1e-4) {
      lg = x * x * (0.5 + x * (-1.0 / 3.0 + x * (0.125 + x * (-1.0 / 30.0 + x / 144.0))));
    } else {
      lg = -std::expm1(-x) - x * e;
    }
    out.g = lg / lambda;
    return out;
  }

  if (d > 0.0) {
    out.regime = Regime::Overdamped;
    const double omega = std::sqrt(d);
    // (eta - omega)/2 written as 2*lambda/(eta + omega): no cancellation for
    // lambda << eta^2.
    const double a = 2.0 * lambda / (eta + omega);
    const double em = std::exp(-a * t);                  // e^{-(eta-omega)t/2}
    const double s = -std::expm1(-omega * t);            // 1 - e^{-omega t}
    const double c = em * s * (a / omega);
    out.r = em + c;
    out.phi = em * s / omega;
    out.g = (-std::expm1(-a * t) - c) / lambda;          // (1 - r)/lambda, stably
    return out;
  }

  out.regime = Regime::Underdamped;
  const double w = std::sqrt(-d);
  const double e = std::exp(-0.5 * eta * t);
  const double sn = std::sin(0.5 * w * t);
  const double cs = std::cos(0.5 * w * t);
  out.phi = 2.0 * e * sn / w;
  const double lt2 = lambda * t * t;
  if (lt2 < 1e-7) {
    // Small-time series of 1 - r; here eta*t <= 2*sqrt(lambda)*t < 7e-4, so
    // five terms reach full precision.
    const double lg =
        lambda * t * t *
        (0.5 + t * (-eta / 6.0 +
                    t * ((eta * eta - lambda) / 24.0 -
                         t * eta * (eta * eta - 2.0 * lambda) / 120.0)));
    out.g = lg / lambda;
    out.r = 1.0 - lg;
  } else {
    // 1 - e cs assembled from 2 sin^2 and expm1 to keep accuracy when r ~ 1.
    const double half = std::sin(0.25 * w * t);
    const double one_minus_ecs = 2.0 * half * half + cs * (-std::expm1(-0.5 * eta * t));
    const double lg = one_minus_ecs - e * (eta / w) * sn;
    out.g = lg / lambda;
    out.r = e * ((eta / w) * sn + cs);
  }
  return out;
}

FilterEvaluation evaluate_filters(const DampingConfig& cfg, double alpha,
                                  double lambda) {
  if (!(alpha > 0.0)) throw DomainError("evaluate_filters: alpha must be > 0");
  if (!(lambda > 0.0)) throw DomainError("evaluate_filters: lambda must be > 0");
  const ModeResponse m = mode_response(cfg.eta, lambda, 1.0 / alpha);
  return FilterEvaluation{alpha, lambda, m.g, m.phi, m.r, m.regime};
}

FilterConstants filter_constants(const DampingConfig& cfg) {
  return filter_constants(cfg, {});
}

FilterConstants filter_constants(const DampingConfig& cfg,
                                 std::span<const double> singular_values) {
  const double eta = cfg.eta;
  const double norm = std::sqrt(cfg.operator_norm_sq);
  FilterConstants fc{};
  if (eta > 2.0 * norm) {
    const double root = std::sqrt(eta * eta - 4.0 * cfg.operator_norm_sq);
    fc.gamma1 = eta / (2.0 * root) + 0.5;
    fc.gamma2 = eta / (2.0 * root);
    fc.gamma_star = std::sqrt(eta / (eta * eta - 4.0 * cfg.operator_norm_sq));
    fc.alpha_bar = std::numeric_limits<double>::infinity();
    return fc;
  }
  fc.alpha_bar = eta * eta;
  fc.gamma1 = 1.0;
  fc.gamma2 = 2.0 / (kE * eta);
  fc.gamma_star = 4.0;
  if (auto s = sigma_below_half_eta(eta, singular_values)) {
    const double root2 = eta * eta - 4.0 * (*s) * (*s);
    fc.gamma1 = std::max(fc.gamma1, eta / (2.0 * std::sqrt(root2)) + 0.5);
    fc.gamma2 = std::max(fc.gamma2, eta / (2.0 * std::sqrt(root2)));
    fc.gamma_star = std::max(fc.gamma_star, std::sqrt(eta / root2));
  }
  return fc;
}

double qualification_constant(const DampingConfig& cfg, double p) {
  return qualification_constant(cfg, p, {});
}

double qualification_constant(const DampingConfig& cfg, double p,
                              std::span<const double> singular_values) {
  if (!(p > 0.0)) throw DomainError("qualification_constant: p must be > 0");
  const double eta = cfg.eta;
  const double nsq = cfg.operator_norm_sq;
  const double norm = std::sqrt(nsq);

  const auto monomial_factor = [&](double lam_bound_sq) {
    const double root = std::sqrt(eta * eta - 4.0 * lam_bound_sq);
    return std::pow(p * eta / kE, p) * (eta / (2.0 * root) + 0.5);
  };

  if (eta > 2.0 * norm * (1.0 + 1e-12)) return monomial_factor(nsq);

  // Oscillatory branch constant; valid on the spectral interval above
  // eta^2/4 for all alpha <= ||A||^2.
  const double gamma_b = 0.5 * (eta + 2.0 * nsq) *
                         std::pow(2.0 * (p + 1.0) / (kE * eta), p + 1.0) *
                         std::pow(nsq, p);
  double gamma = gamma_b;

  if (auto s = sigma_below_half_eta(eta, singular_values))
    gamma = std::max(gamma, monomial_factor((*s) * (*s)));

  const bool critical =
      spectrum_has_critical(eta, singular_values) ||
      std::abs(eta - 2.0 * norm) <= 1e-12 * eta;
  if (critical) {
    const double gamma_c = 0.5 * (eta + 2.0 * nsq) *
                           std::pow((p + 1.0) / kE, p + 1.0) *
                           std::pow(0.5 * eta, p - 2.0) *
                           std::max(0.5 * eta, 1.0);
    gamma = std::max(gamma, gamma_c);
  }
  return gamma;
}

std::pair<Vector, Vector> closed_form_solution(const DenseOperator& op,
                                               const DampingConfig& cfg,
                                               const Vector& x0,
                                               const Vector& v0,
                                               const Vector& y, double t) {
  if (t < 0.0) throw ContractViolation("closed_form_solution: t >= 0 required");
  const std::size_t n = op.cols();
  if (x0.size() != n || v0.size() != n || y.size() != op.rows())
    throw ContractViolation("closed_form_solution: dimension mismatch");

  const SvdSystem& sys = op.svd();
  const std::size_t r = sys.rank();
  const double eta = cfg.eta;

  // Coefficients in the singular basis.
  Vector xu(r), vu(r), yv(r);
  kernels::gemv_t(sys.right_vectors.data, n, r, x0, xu);
  kernels::gemv_t(sys.right_vectors.data, n, r, v0, vu);
  kernels::gemv_t(sys.left_vectors.data, op.rows(), r, y, yv);

  Vector xi(r), xidot(r);
  for (std::size_t j = 0; j < r; ++j) {
    const double sigma = sys.singular_values[j];
    const double lambda = sigma * sigma;
    const ModeResponse m = mode_response(eta, lambda, t);
    const double data = sigma * yv[j];
    xi[j] = m.r * xu[j] + m.phi * vu[j] + m.g * data;
    // d/dt of the responses: r' = -lambda*phi, phi' = r - eta*phi, g' = phi.
    xidot[j] = -lambda * m.phi * xu[j] + (m.r - eta * m.phi) * vu[j] +
               m.phi * data;
  }

  // Components orthogonal to every u_j feel no force: xi'' + eta xi' = 0.
  Vector x(n), v(n);
  kernels::gemv_n(sys.right_vectors.data, n, r, xi, x);
  kernels::gemv_n(sys.right_vectors.data, n, r, xidot, v);

  Vector proj_x(r), proj_v(r), px(n), pv(n);
  kernels::gemv_t(sys.right_vectors.data, n, r, x0, proj_x);
  kernels::gemv_t(sys.right_vectors.data, n, r, v0, proj_v);
  kernels::gemv_n(sys.right_vectors.data, n, r, proj_x, px);
  kernels::gemv_n(sys.right_vectors.data, n, r, proj_v, pv);

  const double decay = std::exp(-eta * t);
  const double ramp = -std::expm1(-eta * t) / eta;  // (1 - e^{-eta t})/eta
  for (std::size_t i = 0; i < n; ++i) {
    const double xp = x0[i] - px[i];
    const double vp = v0[i] - pv[i];
    x[i] += xp + vp * ramp;
    v[i] += vp * decay;
  }
  return {std::move(x), std::move(v)};
}

double a_priori_time(const SourceCondition& sc, const DampingConfig& cfg,
                     double delta) {
  return a_priori_time(sc, cfg, delta, {});
}

double a_priori_time(const SourceCondition& sc, const DampingConfig& cfg,
                     double delta, std::span<const double> singular_values) {
  if (!(delta > 0.0)) throw DomainError("a_priori_time: delta must be > 0");
  if (!(sc.p > 0.0)) throw DomainError("a_priori_time: p must be > 0");
  const double gamma = qualification_constant(cfg, sc.p, singular_values);
  const double expo = 2.0 / (2.0 * sc.p + 1.0);
  return std::pow(2.0 * gamma, expo) * std::pow(sc.rho, expo) *
         std::pow(delta, -expo);
}

void write_filter_curve(std::ostream& os, const DampingConfig& cfg,
                        std::span<const double> alphas,
                        std::span<const double> lambdas) {
  os << "alpha,lambda,g,phi,r,regime\n";
  os.precision(17);
  for (double a : alphas) {
    for (double l : lambdas) {
      const FilterEvaluation f = evaluate_filters(cfg, a, l);
      os << f.alpha << ',' << f.lambda << ',' << f.g << ',' << f.phi << ','
         << f.r << ',' << regime_name(f.regime) << '\n';
    }
  }
}

}  // namespace soar::filters
