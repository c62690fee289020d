// Command-line front end: solve one problem instance, run an experiment
// matrix, dump filter curves, or emit discrepancy traces. Configuration
// comes from a sectioned key = value file (or a built-in preset), with
// repeatable --override key=value flags layered on top.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "soar/bench.hpp"
#include "soar/config.hpp"
#include "soar/errors.hpp"
#include "soar/kernels.hpp"

namespace fs = std::filesystem;
using namespace soar;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  std::string output_dir = "out";
  long long seed = -1;
  long long max_iter = -1;
  int workers = 0;
  bool table_mode = false;
  int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_workers) {
  cmd->add_option("--config", a.config_path,
                  "Config file; the [" + cmd->get_name() +
                      "] section applies (missing file section = defaults)");
  cmd->add_option("--preset", a.preset,
                  "Built-in parameter set: example1 | example2");
  cmd->add_option("--override", a.overrides,
                  "key=value override applied after the config (repeatable)");
  cmd->add_option("--output-dir", a.output_dir,
                  "Directory for result files (created if missing)")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Noise seed (unitless; default 0)");
  cmd->add_option("--max-iter", a.max_iter, "Iteration cap per run");
  cmd->add_flag("--table-mode", a.table_mode,
                "Use the empirical total-energy threshold multiplier "
                "1.1*delta^(4p/(4p+1)) instead of tau");
  if (with_workers)
    cmd->add_option("--workers", a.workers,
                    "Worker threads for the experiment matrix (default 1)");
  cmd->add_flag("-v,--verbose", a.verbosity, "Print a line per completed run");
}

config::Document load_doc(const CommonArgs& a) {
  if (a.config_path.empty()) return {};
  return config::load_document(a.config_path);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw ConfigError("cannot write " + (dir / name).string());
  return f;
}

int cmd_solve(const CommonArgs& a) {
  config::SolveSpec spec = a.preset.empty()
                               ? config::solve_from(load_doc(a))
                               : config::solve_preset(a.preset);
  if (!a.preset.empty() && !a.config_path.empty())
    throw ConfigError("--preset and --config are mutually exclusive");
  for (const auto& kv : a.overrides) config::apply_override(spec, kv);
  if (a.seed >= 0) spec.seed = static_cast<std::uint64_t>(a.seed);
  if (a.max_iter > 0) spec.max_iter = static_cast<std::size_t>(a.max_iter);
  if (a.table_mode) spec.table_mode = true;

  const auto problem = problems::build_integral_problem(spec.n, spec.problem);
  const double norm = problem.op.operator_norm();
  const double eta = spec.eta > 0 ? spec.eta : norm;
  const auto noisy = problems::add_noise(problem, spec.delta_prime, spec.seed);

  solvers::SolverConfig cfg;
  cfg.method = spec.method;
  cfg.dt = spec.dt;
  cfg.eta = eta;
  cfg.x0 = problem.to_coeff(Vector(spec.n, spec.x0_fill));
  cfg.v0 = problem.to_coeff(Vector(spec.n, spec.v0_fill));
  cfg.max_iter = spec.max_iter;
  cfg.override_step_size = spec.override_step_size;

  stopping::StoppingRule rule;
  switch (spec.rule) {
    case stopping::RuleKind::MorozovDP:
      rule = stopping::morozov(spec.tau, noisy.delta);
      break;
    case stopping::RuleKind::TotalEnergyDP:
      rule = stopping::total_energy(spec.tau, noisy.delta, spec.table_mode,
                                    spec.p);
      break;
    case stopping::RuleKind::APriori: {
      filters::DampingConfig damping{eta, norm * norm};
      rule = stopping::a_priori(filters::a_priori_time(
          {spec.p, spec.rho}, damping, noisy.delta,
          problem.op.svd().singular_values));
      break;
    }
    case stopping::RuleKind::MaxIterOnly:
      rule = stopping::max_iter_only();
      break;
  }

  const auto run = solvers::run(problem.op, noisy.y_delta, cfg, rule);
  const double err = problems::l2_relative_error(run.state.x, problem);

  const fs::path dir(a.output_dir);
  {
    auto f = open_out(dir, "trajectory.csv");
    solvers::write_trajectory(f, run.trajectory);
  }
  {
    auto f = open_out(dir, "solution.csv");
    f << "s,x\n";
    f.precision(17);
    const Vector xn = problem.to_nodal(run.state.x);
    for (std::size_t i = 0; i < xn.size(); ++i)
      f << problem.nodes[i] << ',' << xn[i] << '\n';
  }
  {
    auto f = open_out(dir, "manifest.txt");
    config::write_manifest(f, spec);
    f << "# realized delta = " << noisy.delta << '\n';
    f << "# realized delta (nodal norm) = " << noisy.delta_nodal << '\n';
    f << "# kernel backend = " << kernels::backend_name() << '\n';
  }

  std::cout << "method=" << solvers::method_name(spec.method)
            << " rule=" << stopping::rule_name(spec.rule)
            << " delta=" << noisy.delta << " k_star=" << run.decision.k_star
            << " t_star=" << run.decision.t_star
            << " reason=" << stopping::reason_name(run.decision.reason)
            << " l2err=" << err << '\n';
  return 0;
}

int cmd_bench(const CommonArgs& a) {
  bench::ExperimentSpec spec = a.preset.empty()
                                   ? config::bench_from(load_doc(a))
                                   : config::bench_preset(a.preset);
  if (!a.preset.empty() && !a.config_path.empty())
    throw ConfigError("--preset and --config are mutually exclusive");
  for (const auto& kv : a.overrides) config::apply_override(spec, kv);
  if (a.seed >= 0) spec.seeds = {static_cast<std::uint64_t>(a.seed)};
  if (a.max_iter > 0) spec.max_iter = static_cast<std::size_t>(a.max_iter);
  if (a.table_mode) spec.table_mode = true;
  if (a.workers > 0) spec.workers = a.workers;

  const auto records = bench::run_matrix(spec);

  const fs::path dir(a.output_dir);
  {
    auto f = open_out(dir, "records.csv");
    bench::write_records_csv(f, records);
  }
  {
    auto f = open_out(dir, "manifest.txt");
    config::write_manifest(f, spec);
    f << "# runs = " << records.size() << '\n';
    f << "# kernel backend = " << kernels::backend_name() << '\n';
  }
  if (a.verbosity > 0) {
    for (const auto& r : records)
      std::cout << r.method << '/' << r.rule << " delta'=" << r.delta_prime
                << " seed=" << r.seed << " k*=" << r.k_star
                << " l2err=" << r.l2err
                << (r.failure.empty() ? "" : (" [" + r.failure + "]")) << '\n';
  }
  bool config_failure = false;
  for (const auto& r : records) config_failure |= r.failure == "ConfigError";
  std::cout << "wrote " << records.size() << " records to "
            << (dir / "records.csv").string() << '\n';
  return config_failure ? 1 : 0;
}

int cmd_filters(const CommonArgs& a, const config::FilterCurveSpec& flags,
                bool eta_set) {
  config::FilterCurveSpec spec = config::filters_from(load_doc(a));
  if (eta_set) spec = flags;
  for (const auto& kv : a.overrides) config::apply_override(spec, kv);

  if (spec.alphas.empty()) throw ConfigError("filters: empty alpha list");
  if (spec.lambdas == 0) throw ConfigError("filters: lambdas must be positive");
  const double nsq = spec.norm * spec.norm;
  std::vector<double> lambdas(spec.lambdas);
  const double lmin = spec.lambda_min_factor * nsq;
  for (std::size_t i = 0; i < spec.lambdas; ++i) {
    const double f = spec.lambdas == 1
                         ? 1.0
                         : static_cast<double>(i) /
                               static_cast<double>(spec.lambdas - 1);
    lambdas[i] = lmin * std::pow(nsq / lmin, f);
  }
  const fs::path dir(a.output_dir);
  auto f = open_out(dir, "filters.csv");
  filters::write_filter_curve(f, {spec.eta, nsq}, spec.alphas, lambdas);
  std::cout << "wrote " << spec.alphas.size() * spec.lambdas << " rows to "
            << (dir / "filters.csv").string() << '\n';
  return 0;
}

int cmd_trace(const CommonArgs& a, const std::vector<double>& etas_flag) {
  config::TraceSpec spec = config::trace_from(load_doc(a));
  for (const auto& kv : a.overrides) config::apply_override(spec, kv);
  if (!etas_flag.empty()) spec.etas = etas_flag;
  if (a.seed >= 0) spec.seed = static_cast<std::uint64_t>(a.seed);

  const auto problem = problems::build_integral_problem(spec.n, spec.problem);
  solvers::SolverConfig base;
  base.dt = spec.dt;
  base.x0 = problem.to_coeff(Vector(spec.n, spec.x0_fill));
  base.v0 = problem.to_coeff(Vector(spec.n, spec.v0_fill));
  base.override_step_size = spec.override_step_size;

  const auto result = bench::discrepancy_trace(
      problem, base, spec.delta_prime, spec.seed, spec.etas, spec.tau,
      spec.steps);

  const fs::path dir = fs::path(a.output_dir) / "trace";
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    auto f = open_out(dir, "chi_eta" + std::to_string(i) + ".csv");
    bench::write_trace_csv(f, result, i);
  }
  {
    auto f = open_out(fs::path(a.output_dir), "manifest.txt");
    config::write_manifest(f, spec);
    f << "# realized delta = " << result.delta << '\n';
    f << "# larger-eta majority dominance = "
      << (result.majority_pass ? "pass" : "fail") << '\n';
  }
  std::cout << "wrote " << result.traces.size() << " traces to "
            << dir.string() << " (majority dominance: "
            << (result.majority_pass ? "pass" : "fail") << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Iterative regularization of linear ill-posed problems by a damped "
      "second-order flow, with discrepancy-principle stopping and a "
      "comparison bench of classical methods"};
  app.require_subcommand(0, 1);

  CommonArgs sa, ba, fa, ta;
  auto* solve = app.add_subcommand("solve", "Run one solver on one instance");
  add_common(solve, sa, false);
  auto* bench_cmd =
      app.add_subcommand("bench", "Run an experiment matrix, write records.csv");
  add_common(bench_cmd, ba, true);

  auto* filt = app.add_subcommand("filters", "Dump filter curves as CSV");
  add_common(filt, fa, false);
  config::FilterCurveSpec fspec;
  auto* eta_opt = filt->add_option("--eta", fspec.eta, "Damping parameter");
  filt->add_option("--norm", fspec.norm, "Operator norm ||A||");
  filt->add_option("--alphas", fspec.alphas,
                   "Comma list of regularization parameters")
      ->delimiter(',');
  filt->add_option("--lambdas", fspec.lambdas,
                   "Size of the log-spaced spectral grid");
  filt->add_option("--lambda-min-factor", fspec.lambda_min_factor,
                   "Grid start as a fraction of ||A||^2");

  auto* trace = app.add_subcommand(
      "trace", "Discrepancy traces chi(t) for a list of damping values");
  add_common(trace, ta, false);
  std::vector<double> etas_flag;
  trace->add_option("--etas", etas_flag, "Comma list of damping values")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error[1]: " << e.what() << '\n';
    return 1;
  }

  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  try {
    if (solve->parsed()) return cmd_solve(sa);
    if (bench_cmd->parsed()) return cmd_bench(ba);
    if (filt->parsed()) return cmd_filters(fa, fspec, eta_opt->count() > 0);
    if (trace->parsed()) return cmd_trace(ta, etas_flag);
  } catch (const ConfigError& e) {
    std::cerr << "error[1]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[2]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
