#pragma once

#include <iosfwd>
#include <span>
#include <utility>

#include "soar/dense_operator.hpp"

// Spectral filter calculus of the damped second-order flow
//
//   x'' + eta x' + A^T A x = A^T y,   x(0) = x0, x'(0) = v0.
//
// Diagonalizing over the singular values sigma_j of A, each coefficient
// xi_j(t) = <x(t), u_j> solves the scalar oscillator
//
//   xi'' + eta xi' + lambda xi = sigma <y, v_j>,   lambda = sigma^2,
//
// whose solution is assembled from two fundamental responses:
//
//   r(t, lambda)   : xi(0) = 1, xi'(0) = 0   (bias: how much initial error
//                                             survives at time t)
//   phi(t, lambda) : xi(0) = 0, xi'(0) = 1   (velocity response)
//
// and the data multiplier g(t, lambda) = (1 - r(t, lambda)) / lambda.
// With alpha = 1/t these become the filter family {g_alpha, phi_alpha} and
// the bias r_alpha = 1 - lambda g_alpha of the induced regularization
//
//   x_alpha = (I - A^T A g_alpha(A^T A)) x0 + phi_alpha(A^T A) v0
//             + g_alpha(A^T A) A^T y.
//
// The character of a mode depends on the sign of eta^2 - 4 lambda:
//
//   overdamped  (4 lambda < eta^2):  omega = sqrt(eta^2 - 4 lambda),
//     r   = e^{-(eta-omega)t/2} (eta + omega - (eta - omega) e^{-omega t})
//           / (2 omega)
//     phi = e^{-(eta-omega)t/2} (1 - e^{-omega t}) / omega
//
//   underdamped (4 lambda > eta^2):  w = sqrt(4 lambda - eta^2),
//     r   = e^{-eta t/2} ((eta/w) sin(w t/2) + cos(w t/2))
//     phi = (2/w) e^{-eta t/2} sin(w t/2)
//
//   critical    (4 lambda = eta^2):
//     r   = e^{-eta t/2} (eta t/2 + 1),   phi = t e^{-eta t/2}
//
// All three branches are limits of one another; evaluation near the
// boundary is routed through cancellation-free forms (expm1-based products
// for the overdamped branch, short series for small lambda t^2) so that the
// branches agree to machine accuracy at the seam.

namespace soar::filters {

enum class Regime { Overdamped, Underdamped, Critical };

const char* regime_name(Regime r) noexcept;

struct DampingConfig {
  double eta;                // damping parameter, > 0
  double operator_norm_sq;   // ||A||^2, spectral interval is (0, ||A||^2]
};

struct FilterEvaluation {
  double alpha;
  double lambda;
  double g;
  double phi;
  double r;       // r = 1 - lambda * g holds to 1e-12 absolute
  Regime regime;
};

/// Uniform bounds of the filter family:
///   |r_alpha| <= gamma1, |phi_alpha| <= gamma2,
///   sqrt(lambda) |g_alpha| <= gamma_star / sqrt(alpha)
/// for all alpha in (0, alpha_bar]. In the overdamped configuration
/// alpha_bar is unconstrained (+infinity); otherwise alpha_bar = eta^2.
struct FilterConstants {
  double gamma1;
  double gamma2;
  double gamma_star;
  double alpha_bar;
};

/// Smoothness assumption x0 - x^+ = (A^T A)^p v, ||v|| <= rho.
struct SourceCondition {
  double p;
  double rho;
};

/// Regime of a single spectral point. The half-width 1e-9 * eta^2 around
/// 4 lambda = eta^2 is classified critical; exact equality has measure zero
/// in floating point and the critical formulas are the common limit.
Regime classify(const DampingConfig& cfg, double lambda);

/// r, phi, g of one mode at time t (alpha = 1/t form is evaluate_filters).
struct ModeResponse {
  double r;
  double phi;
  double g;
  Regime regime;
};
ModeResponse mode_response(double eta, double lambda, double t);

/// Filters at (alpha, lambda). Throws DomainError unless alpha > 0 and
/// lambda > 0.
FilterEvaluation evaluate_filters(const DampingConfig& cfg, double alpha,
                                  double lambda);

/// Constants without spectral information. In the non-overdamped case the
/// sharper bounds need the largest singular value below eta/2; without it
/// the constants degrade to the branch valid for spectra entirely above
/// eta/2 (gamma1 = 1, gamma2 = 2/(e eta), gamma_star = 4).
FilterConstants filter_constants(const DampingConfig& cfg);

/// Constants using sigma_{j0+1}, the largest singular value strictly below
/// eta/2 in the given (nonincreasing) spectrum.
FilterConstants filter_constants(const DampingConfig& cfg,
                                 std::span<const double> singular_values);

/// Qualification constant gamma(p): sup over the spectral interval of
/// |r_alpha(lambda)| lambda^p and |phi_alpha(lambda)| lambda^p is bounded by
/// gamma(p) alpha^p for all alpha in (0, ||A||^2]. Throws DomainError for
/// p <= 0.
double qualification_constant(const DampingConfig& cfg, double p);
double qualification_constant(const DampingConfig& cfg, double p,
                              std::span<const double> singular_values);

/// Exact trajectory of the flow at time t, expanded in the singular basis
/// of op; modes pick their damping branch individually and the orthogonal
/// complement of the singular directions evolves with the lambda = 0
/// formulas. Returns (x(t), x'(t)).
std::pair<Vector, Vector> closed_form_solution(const DenseOperator& op,
                                               const DampingConfig& cfg,
                                               const Vector& x0,
                                               const Vector& v0,
                                               const Vector& y, double t);

/// A-priori terminating time T* = (2 gamma)^{2/(2p+1)} rho^{2/(2p+1)}
/// delta^{-2/(2p+1)}. Throws DomainError for delta <= 0.
double a_priori_time(const SourceCondition& sc, const DampingConfig& cfg,
                     double delta);
double a_priori_time(const SourceCondition& sc, const DampingConfig& cfg,
                     double delta, std::span<const double> singular_values);

/// CSV dump (alpha, lambda, g, phi, r, regime), one row per pair.
void write_filter_curve(std::ostream& os, const DampingConfig& cfg,
                        std::span<const double> alphas,
                        std::span<const double> lambdas);

}  // namespace soar::filters
