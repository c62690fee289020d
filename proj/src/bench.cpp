#include "soar/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "soar/errors.hpp"
#include "soar/kernels.hpp"

namespace soar::bench {

namespace {

struct RunCoord {
  std::size_t method_i, rule_i, dp_i, seed_i;
  int rep;
};

bool energy_monotone_from(const std::vector<solvers::TrajectoryPoint>& traj) {
  if (traj.empty()) return true;
  const double slack = 1e-8 * traj.front().energy();
  double prev = traj.front().energy();
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double e = traj[i].energy();
    if (e > prev + slack) return false;
    prev = e;
  }
  return true;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "problem", "n", "method", "rule", "delta_prime", "seed", "repetition",
      "dt", "eta", "x0_fill", "v0_fill", "tau", "p", "table_mode", "delta",
      "delta_nodal", "k_star", "t_star", "wall_time_seconds", "l2err",
      "stop_reason", "thm12_hypothesis_held", "energy_monotone",
      "tau_above_gamma1", "failure"};
  return cols;
}

std::vector<ExperimentRecord> run_matrix(const ExperimentSpec& spec) {
  if (spec.methods.empty() || spec.rules.empty() || spec.delta_primes.empty() ||
      spec.seeds.empty() || spec.repetitions < 1)
    return {};
  const std::size_t total = spec.total_runs();
  if (total > spec.cap)
    throw ConfigError("experiment matrix has " + std::to_string(total) +
                      " runs, above the cap of " + std::to_string(spec.cap));

  const problems::IntegralProblem problem =
      problems::build_integral_problem(spec.n, spec.problem);
  const double op_norm = problem.op.operator_norm();
  const double eta = spec.eta > 0.0 ? spec.eta : op_norm;

  const filters::DampingConfig damping{eta, op_norm * op_norm};
  const filters::FilterConstants constants =
      filters::filter_constants(damping, problem.op.svd().singular_values);
  const bool tau_ok = spec.tau > constants.gamma1;

  const Vector x0 = problem.to_coeff(Vector(spec.n, spec.x0_fill));
  const Vector v0 = problem.to_coeff(Vector(spec.n, spec.v0_fill));

  std::vector<RunCoord> coords;
  coords.reserve(total);
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi)
    for (std::size_t ri = 0; ri < spec.rules.size(); ++ri)
      for (std::size_t di = 0; di < spec.delta_primes.size(); ++di)
        for (std::size_t si = 0; si < spec.seeds.size(); ++si)
          for (int rep = 0; rep < spec.repetitions; ++rep)
            coords.push_back({mi, ri, di, si, rep});

  std::vector<ExperimentRecord> records(coords.size());

  auto execute = [&](std::size_t idx) {
    const RunCoord c = coords[idx];
    ExperimentRecord& r = records[idx];
    r.problem = problems::example_name(spec.problem);
    r.n = spec.n;
    r.method = solvers::method_name(spec.methods[c.method_i]);
    r.rule = stopping::rule_name(spec.rules[c.rule_i]);
    r.delta_prime = spec.delta_primes[c.dp_i];
    r.seed = spec.seeds[c.seed_i];
    r.repetition = c.rep;
    r.eta = eta;
    r.x0_fill = spec.x0_fill;
    r.v0_fill = spec.v0_fill;
    r.tau = spec.tau;
    r.p = spec.p;
    r.table_mode = spec.table_mode;
    r.tau_above_gamma1 = tau_ok;
    r.l2err = std::numeric_limits<double>::quiet_NaN();

    const auto t0 = std::chrono::steady_clock::now();
    try {
      // Repetitions re-roll the generator deterministically.
      const std::uint64_t run_seed =
          r.seed + 1000003ULL * static_cast<std::uint64_t>(c.rep);
      const problems::NoisyData noisy =
          problems::add_noise(problem, r.delta_prime, run_seed);
      r.delta = noisy.delta;
      r.delta_nodal = noisy.delta_nodal;

      solvers::SolverConfig cfg;
      cfg.method = spec.methods[c.method_i];
      cfg.dt = spec.dt;
      cfg.eta = eta;
      cfg.x0 = x0;
      cfg.v0 = v0;
      cfg.max_iter = spec.max_iter;
      cfg.override_step_size = spec.override_step_size;
      cfg = solvers::validate(cfg, problem.op);
      r.dt = cfg.dt;

      stopping::StoppingRule rule;
      switch (spec.rules[c.rule_i]) {
        case stopping::RuleKind::MorozovDP:
          rule = stopping::morozov(spec.tau, noisy.delta);
          break;
        case stopping::RuleKind::TotalEnergyDP:
          rule = stopping::total_energy(spec.tau, noisy.delta, spec.table_mode,
                                        spec.p);
          rule.tau1 = constants.gamma1 + 1e-6;
          break;
        case stopping::RuleKind::APriori: {
          const filters::SourceCondition sc{spec.p, spec.rho};
          rule = stopping::a_priori(filters::a_priori_time(
              sc, damping, std::max(noisy.delta,
                                    std::numeric_limits<double>::min()),
              problem.op.svd().singular_values));
          break;
        }
        case stopping::RuleKind::MaxIterOnly:
          rule = stopping::max_iter_only();
          break;
      }

      const solvers::RunResult run =
          solvers::run(problem.op, noisy.y_delta, cfg, rule);
      r.k_star = run.decision.k_star;
      r.t_star = run.decision.t_star;
      r.stop_reason = stopping::reason_name(run.decision.reason);
      r.thm12_hypothesis_held = run.decision.thm12_hypothesis_held;
      r.energy_monotone = energy_monotone_from(run.trajectory);
      r.l2err = problems::l2_relative_error(run.state.x, problem);
      if (!run.decision.fired) r.failure = "MaxIterExceeded";
    } catch (const DivergenceError& e) {
      r.failure = "Diverged";
      r.stop_reason = e.what();
    } catch (const BreakdownError& e) {
      r.failure = "Breakdown";
      r.stop_reason = e.what();
    } catch (const ConfigError& e) {
      r.failure = "ConfigError";
      r.stop_reason = e.what();
    }
    r.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  };

  const int workers = std::max(1, spec.workers);
  if (workers == 1 || coords.size() <= 1) {
    for (std::size_t i = 0; i < coords.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= coords.size()) return;
        execute(i);
      }
    };
    std::vector<std::thread> pool;
    const int nw = std::min<std::size_t>(workers, coords.size());
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

void write_records_csv(std::ostream& os,
                       const std::vector<ExperimentRecord>& records) {
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    os << (i ? "," : "") << cols[i];
  os << '\n';
  os.precision(17);
  for (const auto& r : records) {
    os << csv_escape(r.problem) << ',' << r.n << ',' << csv_escape(r.method)
       << ',' << csv_escape(r.rule) << ',' << r.delta_prime << ',' << r.seed
       << ',' << r.repetition << ',' << r.dt << ',' << r.eta << ','
       << r.x0_fill << ',' << r.v0_fill << ',' << r.tau << ',' << r.p << ','
       << (r.table_mode ? 1 : 0) << ',' << r.delta << ',' << r.delta_nodal
       << ',' << r.k_star << ',' << r.t_star << ',' << r.wall_time_seconds
       << ',' << r.l2err << ',' << csv_escape(r.stop_reason) << ','
       << (r.thm12_hypothesis_held ? 1 : 0) << ','
       << (r.energy_monotone ? 1 : 0) << ',' << (r.tau_above_gamma1 ? 1 : 0)
       << ',' << csv_escape(r.failure) << '\n';
  }
}

RateFit fit_rate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ContractViolation("fit_rate: length mismatch");
  std::vector<double> lx, ly;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    } else {
      ++excluded;
    }
  }
  std::vector<double> distinct = lx;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (lx.size() < 3 || distinct.size() < 3)
    throw FitError("rate fit needs at least 3 points with distinct positive x (" +
                   std::to_string(excluded) + " excluded)");

  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  const double vxx = sxx - sx * sx / n;
  const double vxy = sxy - sx * sy / n;
  const double vyy = syy - sy * sy / n;
  RateFit fit;
  fit.excluded = excluded;
  fit.slope = vxy / vxx;
  fit.r2 = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

RateFit fit_rate(const std::vector<ExperimentRecord>& records,
                 const std::string& x_field, const std::string& y_field) {
  using Getter = double (*)(const ExperimentRecord&);
  static const std::map<std::string, Getter> getters = {
      {"delta", [](const ExperimentRecord& r) { return r.delta; }},
      {"delta_prime", [](const ExperimentRecord& r) { return r.delta_prime; }},
      {"k_star",
       [](const ExperimentRecord& r) { return static_cast<double>(r.k_star); }},
      {"t_star", [](const ExperimentRecord& r) { return r.t_star; }},
      {"l2err", [](const ExperimentRecord& r) { return r.l2err; }},
      {"wall_time_seconds",
       [](const ExperimentRecord& r) { return r.wall_time_seconds; }},
  };
  const auto gx = getters.find(x_field);
  const auto gy = getters.find(y_field);
  if (gx == getters.end()) throw FitError("unknown fit field: " + x_field);
  if (gy == getters.end()) throw FitError("unknown fit field: " + y_field);
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (!r.failure.empty()) continue;
    x.push_back(gx->second(r));
    y.push_back(gy->second(r));
  }
  return fit_rate(x, y);
}

TraceResult discrepancy_trace(const problems::IntegralProblem& problem,
                              const solvers::SolverConfig& base,
                              double delta_prime, std::uint64_t seed,
                              std::span<const double> etas, double tau,
                              std::size_t steps) {
  if (etas.empty()) throw ConfigError("trace needs at least one eta");
  const problems::NoisyData noisy =
      problems::add_noise(problem, delta_prime, seed);
  TraceResult out;
  out.delta = noisy.delta;
  out.tau = tau;

  for (double eta : etas) {
    solvers::SolverConfig cfg = base;
    cfg.method = solvers::Method::SoarStormerVerlet;
    cfg.eta = eta;
    cfg.max_iter = steps;
    cfg.thin_below = steps;  // dense sampling keeps the time grids matched
    cfg = solvers::validate(cfg, problem.op);
    const auto run = solvers::run(problem.op, noisy.y_delta, cfg,
                                  stopping::max_iter_only());
    DiscrepancyTrace tr;
    tr.eta = eta;
    tr.points = run.trajectory;
    tr.chi.reserve(tr.points.size());
    for (const auto& pt : tr.points)
      tr.chi.push_back(pt.residual_norm - tau * noisy.delta);
    out.traces.push_back(std::move(tr));
  }

  // Pairwise: how often does the larger eta sit at or below the smaller one
  // past the initial transient t <= 10 dt.
  const std::size_t m = out.traces.size();
  out.dominance_fraction.assign(m, std::vector<double>(m, 1.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto& a = out.traces[i];
      const auto& b = out.traces[j];
      const std::size_t len = std::min(a.points.size(), b.points.size());
      const double transient = len > 1 ? 10.0 * a.points[1].t : 0.0;
      std::size_t count = 0, hits = 0;
      for (std::size_t s = 0; s < len; ++s) {
        if (a.points[s].t <= transient) continue;
        ++count;
        if (b.chi[s] <= a.chi[s]) ++hits;
      }
      out.dominance_fraction[i][j] =
          count ? static_cast<double>(hits) / static_cast<double>(count) : 1.0;
      if (out.traces[j].eta > out.traces[i].eta &&
          out.dominance_fraction[i][j] < 0.5)
        out.majority_pass = false;
    }
  }
  return out;
}

void write_trace_csv(std::ostream& os, const TraceResult& result,
                     std::size_t trace_index) {
  const DiscrepancyTrace& tr = result.traces.at(trace_index);
  os << "eta,k,t,chi,residual_norm,velocity_norm\n";
  os.precision(17);
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    const auto& p = tr.points[i];
    os << tr.eta << ',' << p.k << ',' << p.t << ',' << tr.chi[i] << ','
       << p.residual_norm << ',' << p.velocity_norm << '\n';
  }
}

filters::DampingConfig PlantedDiagonal::damping() const {
  const double norm = op.operator_norm();
  return {eta, norm * norm};
}

PlantedDiagonal make_planted_diagonal(double p, double rho, std::size_t modes,
                                      double sigma_max, double sigma_min,
                                      double eta) {
  if (modes < 2) throw ConfigError("planted family needs at least 2 modes");
  Vector sigma(modes);
  const double ratio = std::log(sigma_min / sigma_max);
  for (std::size_t j = 0; j < modes; ++j)
    sigma[j] = sigma_max *
               std::exp(ratio * static_cast<double>(j) /
                        static_cast<double>(modes - 1));
  PlantedDiagonal f{DenseOperator::diagonal(sigma), Vector(modes),
                    Vector(modes), p, rho, eta};
  const double v = rho / std::sqrt(static_cast<double>(modes));
  for (std::size_t j = 0; j < modes; ++j) {
    const double lambda = sigma[j] * sigma[j];
    f.x_dagger[j] = -std::pow(lambda, p) * v;
    f.y[j] = sigma[j] * f.x_dagger[j];
  }
  return f;
}

Vector planted_noisy(const PlantedDiagonal& f, double delta) {
  Vector y = f.y;
  const std::size_t m = y.size();
  const double e = delta / std::sqrt(static_cast<double>(m));
  for (std::size_t j = 0; j < m; ++j) y[j] += (j % 2 == 0 ? e : -e);
  return y;
}

}  // namespace soar::bench
