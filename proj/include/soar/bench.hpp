#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "soar/filters.hpp"
#include "soar/problems.hpp"
#include "soar/solvers.hpp"

namespace soar::bench {

/// Cross-product experiment description. One run per
/// (method, rule, delta_prime, seed, repetition) tuple, executed in that
/// nesting order.
struct ExperimentSpec {
  problems::ExampleLabel problem = problems::ExampleLabel::Example1;
  std::size_t n = 400;
  std::vector<solvers::Method> methods{solvers::Method::SoarStormerVerlet};
  std::vector<stopping::RuleKind> rules{stopping::RuleKind::MorozovDP};
  std::vector<double> delta_primes{1e-3};
  std::vector<std::uint64_t> seeds{0};
  double dt = 0.0;          // 0 = step-size default
  double eta = 0.0;         // 0 = ||A|| of the assembled operator
  double x0_fill = 0.0;     // constant initial guess (nodal values)
  double v0_fill = 0.0;     // constant initial velocity (nodal values)
  double tau = 2.0;
  double p = 0.1125;
  double rho = 1.0;         // source norm bound for the a-priori rule
  bool table_mode = false;
  bool override_step_size = false;
  std::size_t max_iter = 400000;
  std::size_t cap = 10000;  // refuse matrices larger than this
  int workers = 1;
  int repetitions = 1;

  std::size_t total_runs() const {
    return methods.size() * rules.size() * delta_primes.size() * seeds.size() *
           static_cast<std::size_t>(repetitions);
  }

  bool operator==(const ExperimentSpec&) const = default;
};

struct ExperimentRecord {
  // spec coordinates
  std::string problem;
  std::size_t n = 0;
  std::string method;
  std::string rule;
  double delta_prime = 0.0;
  std::uint64_t seed = 0;
  int repetition = 0;
  double dt = 0.0;
  double eta = 0.0;
  double x0_fill = 0.0;
  double v0_fill = 0.0;
  double tau = 2.0;
  double p = 0.0;
  bool table_mode = false;
  // realized quantities
  double delta = 0.0;        // coefficient (L2) norm of the perturbation
  double delta_nodal = 0.0;  // unweighted nodal-sample norm, for comparison
  std::size_t k_star = 0;
  double t_star = 0.0;
  double wall_time_seconds = 0.0;
  double l2err = 0.0;
  std::string stop_reason;
  bool thm12_hypothesis_held = true;
  bool energy_monotone = true;
  bool tau_above_gamma1 = true;
  std::string failure;  // empty | Diverged | Breakdown | MaxIterExceeded | ConfigError
};

/// Runs the whole matrix. Individual run failures are recorded, never
/// propagated; a cap violation throws ConfigError before any run starts.
/// Deterministic in (spec, seeds) up to wall_time_seconds.
std::vector<ExperimentRecord> run_matrix(const ExperimentSpec& spec);

void write_records_csv(std::ostream& os,
                       const std::vector<ExperimentRecord>& records);
const std::vector<std::string>& record_columns();

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t excluded = 0;  // nonpositive pairs dropped before the log fit
};

/// Least-squares slope of log y against log x. Throws FitError with fewer
/// than 3 usable points or fewer than 3 distinct x values.
RateFit fit_rate(std::span<const double> x, std::span<const double> y);

/// Field-based variant over records; recognized fields: delta, delta_prime,
/// k_star, t_star, l2err, wall_time_seconds.
RateFit fit_rate(const std::vector<ExperimentRecord>& records,
                 const std::string& x_field, const std::string& y_field);

/// One discrepancy trace chi(t) = ||A x(t) - y^d|| - tau delta per damping
/// value, all on the same time grid.
struct DiscrepancyTrace {
  double eta = 0.0;
  std::vector<solvers::TrajectoryPoint> points;
  std::vector<double> chi;
};

struct TraceResult {
  std::vector<DiscrepancyTrace> traces;
  double delta = 0.0;
  double tau = 2.0;
  /// fraction[i][j]: share of sampled t beyond 10 dt where the trace of
  /// eta[j] lies at or below the trace of eta[i]; the qualitative
  /// expectation is a majority whenever eta[j] > eta[i].
  std::vector<std::vector<double>> dominance_fraction;
  bool majority_pass = true;
};

TraceResult discrepancy_trace(const problems::IntegralProblem& problem,
                              const solvers::SolverConfig& base,
                              double delta_prime, std::uint64_t seed,
                              std::span<const double> etas, double tau,
                              std::size_t steps);

void write_trace_csv(std::ostream& os, const TraceResult& result,
                     std::size_t trace_index);

/// Synthetic diagonal family with a planted power-type source: v has equal
/// weight rho/sqrt(modes) in every mode, the exact solution is
/// x^+_j = -lambda_j^p v_j (so x0 = 0 satisfies the source condition), and
/// y = A x^+. Singular values are log-spaced over [sigma_min, sigma_max].
struct PlantedDiagonal {
  DenseOperator op;
  Vector x_dagger;
  Vector y;
  double p = 1.0;
  double rho = 1.0;
  double eta = 2.5;

  filters::DampingConfig damping() const;
};

PlantedDiagonal make_planted_diagonal(double p, double rho, std::size_t modes,
                                      double sigma_max = 1.0,
                                      double sigma_min = 0.01,
                                      double eta = 2.5);

/// y + e with a deterministic alternating-sign perturbation of Euclidean
/// norm exactly delta.
Vector planted_noisy(const PlantedDiagonal& f, double delta);

}  // namespace soar::bench
