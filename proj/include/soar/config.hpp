#pragma once

#include <iosfwd>
#include <string>

#include "soar/bench.hpp"

// Flat key = value configuration with one [section] per subcommand.
// Unknown sections or keys are rejected by name; parse errors carry line
// numbers. An empty document yields the defaults (a solve of Example 1).
// Manifests are written in the same syntax, so a spec echoed to a manifest
// reloads to an equal spec.

namespace soar::config {

struct SolveSpec {
  problems::ExampleLabel problem = problems::ExampleLabel::Example1;
  std::size_t n = 400;
  solvers::Method method = solvers::Method::SoarStormerVerlet;
  stopping::RuleKind rule = stopping::RuleKind::MorozovDP;
  double delta_prime = 1e-3;
  std::uint64_t seed = 0;
  double dt = 19.4946;
  double eta = 2.5648e-4;
  double x0_fill = 1.0;
  double v0_fill = 0.0;
  double tau = 2.0;
  double p = 0.1125;
  double rho = 1.0;
  bool table_mode = false;
  bool override_step_size = true;
  std::size_t max_iter = 400000;

  bool operator==(const SolveSpec&) const = default;
};

struct TraceSpec {
  problems::ExampleLabel problem = problems::ExampleLabel::Example1;
  std::size_t n = 400;
  double delta_prime = 1e-3;
  std::uint64_t seed = 0;
  std::vector<double> etas{2.5648e-4, 2.5648e-3};
  double dt = 19.4946;
  double tau = 2.0;
  std::size_t steps = 2000;
  double x0_fill = 1.0;
  double v0_fill = 0.0;
  bool override_step_size = true;

  bool operator==(const TraceSpec&) const = default;
};

struct FilterCurveSpec {
  double eta = 4.0;
  double norm = 1.0;  // ||A||
  std::vector<double> alphas{1e-3, 1e-2, 1e-1};
  std::size_t lambdas = 64;        // log grid size on (lambda_min, norm^2]
  double lambda_min_factor = 1e-6;  // lambda_min = factor * norm^2

  bool operator==(const FilterCurveSpec&) const = default;
};

/// Parsed document: section -> ordered key/value pairs.
struct Document {
  struct Entry {
    std::string key;
    std::string value;
    int line;
  };
  std::string origin;  // path or "<stdin>", used in error messages
  std::vector<std::pair<std::string, std::vector<Entry>>> sections;

  const std::vector<Entry>* section(const std::string& name) const;
};

Document parse_document(std::istream& is, const std::string& origin);
Document load_document(const std::string& path);

bench::ExperimentSpec bench_from(const Document& doc);
SolveSpec solve_from(const Document& doc);
TraceSpec trace_from(const Document& doc);
FilterCurveSpec filters_from(const Document& doc);

/// Applies one "key=value" override to the given section's spec.
void apply_override(bench::ExperimentSpec& spec, const std::string& kv);
void apply_override(SolveSpec& spec, const std::string& kv);
void apply_override(TraceSpec& spec, const std::string& kv);
void apply_override(FilterCurveSpec& spec, const std::string& kv);

void write_manifest(std::ostream& os, const bench::ExperimentSpec& spec);
void write_manifest(std::ostream& os, const SolveSpec& spec);
void write_manifest(std::ostream& os, const TraceSpec& spec);
void write_manifest(std::ostream& os, const FilterCurveSpec& spec);

/// Table-caption parameter sets; name is "example1" or "example2".
bench::ExperimentSpec bench_preset(const std::string& name);
SolveSpec solve_preset(const std::string& name);

solvers::Method parse_method(const std::string& s);
stopping::RuleKind parse_rule(const std::string& s);
problems::ExampleLabel parse_problem(const std::string& s);

}  // namespace soar::config
