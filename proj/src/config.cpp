#include "soar/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "soar/errors.hpp"

namespace soar::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const Document::Entry& e, const std::string& origin) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    fail(origin, e.line, "key '" + e.key + "': expected a number, got '" +
                             e.value + "'");
  }
}

std::uint64_t parse_u64(const Document::Entry& e, const std::string& origin) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    fail(origin, e.line, "key '" + e.key + "': expected a nonnegative integer, got '" +
                             e.value + "'");
  }
}

bool parse_bool(const Document::Entry& e, const std::string& origin) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail(origin, e.line, "key '" + e.key + "': expected true/false, got '" +
                           e.value + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

std::vector<double> parse_double_list(const Document::Entry& e,
                                      const std::string& origin) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) {
    Document::Entry sub{e.key, item, e.line};
    out.push_back(parse_double(sub, origin));
  }
  if (out.empty()) fail(origin, e.line, "key '" + e.key + "': empty list");
  return out;
}

// Key dispatch table for one section; unknown keys are rejected by name.
template <typename Spec>
using Setter = std::function<void(Spec&, const Document::Entry&, const std::string&)>;

template <typename Spec>
void apply_entries(Spec& spec, const std::vector<Document::Entry>& entries,
                   const std::map<std::string, Setter<Spec>>& table,
                   const std::string& origin) {
  for (const auto& e : entries) {
    auto it = table.find(e.key);
    if (it == table.end())
      fail(origin, e.line, "unknown key '" + e.key + "'");
    it->second(spec, e, origin);
  }
}

const std::string kInline = "<override>";

template <typename Spec>
void apply_override_kv(Spec& spec, const std::string& kv,
                       const std::map<std::string, Setter<Spec>>& table) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like key=value, got '" + kv + "'");
  Document::Entry e{trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), 0};
  auto it = table.find(e.key);
  if (it == table.end())
    throw ConfigError("unknown override key '" + e.key + "'");
  it->second(spec, e, kInline);
}

}  // namespace

solvers::Method parse_method(const std::string& s) {
  if (s == "soar_sv") return solvers::Method::SoarStormerVerlet;
  if (s == "soar_euler") return solvers::Method::SoarEuler;
  if (s == "landweber") return solvers::Method::Landweber;
  if (s == "nesterov") return solvers::Method::Nesterov;
  if (s == "chebyshev") return solvers::Method::Chebyshev;
  if (s == "cgne") return solvers::Method::Cgne;
  throw ConfigError("unknown method '" + s +
                    "' (soar_sv, soar_euler, landweber, nesterov, chebyshev, cgne)");
}

stopping::RuleKind parse_rule(const std::string& s) {
  if (s == "dp") return stopping::RuleKind::MorozovDP;
  if (s == "tedp") return stopping::RuleKind::TotalEnergyDP;
  if (s == "apriori") return stopping::RuleKind::APriori;
  if (s == "maxiter") return stopping::RuleKind::MaxIterOnly;
  throw ConfigError("unknown rule '" + s + "' (dp, tedp, apriori, maxiter)");
}

problems::ExampleLabel parse_problem(const std::string& s) {
  if (s == "example1") return problems::ExampleLabel::Example1;
  if (s == "example2") return problems::ExampleLabel::Example2;
  throw ConfigError("unknown problem '" + s + "' (example1, example2)");
}

const std::vector<Document::Entry>* Document::section(
    const std::string& name) const {
  for (const auto& s : sections)
    if (s.first == name) return &s.second;
  return nullptr;
}

Document parse_document(std::istream& is, const std::string& origin) {
  Document doc;
  doc.origin = origin;
  std::string line;
  int lineno = 0;
  std::vector<Document::Entry>* current = nullptr;
  static const char* known_sections[] = {"solve", "bench", "trace", "filters"};
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(origin, lineno, "unterminated section header");
      const std::string name = trim(t.substr(1, t.size() - 2));
      if (std::find_if(std::begin(known_sections), std::end(known_sections),
                       [&](const char* s) { return name == s; }) ==
          std::end(known_sections))
        fail(origin, lineno, "unknown section '" + name + "'");
      doc.sections.emplace_back(name, std::vector<Document::Entry>{});
      current = &doc.sections.back().second;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(origin, lineno, "expected 'key = value', got '" + t + "'");
    if (!current)
      fail(origin, lineno, "key outside of any [section]");
    current->push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno});
  }
  return doc;
}

Document load_document(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_document(f, path);
}

namespace {

std::map<std::string, Setter<bench::ExperimentSpec>> bench_table() {
  using S = bench::ExperimentSpec;
  std::map<std::string, Setter<S>> t;
  t["problem"] = [](S& s, const Document::Entry& e, const std::string& o) {
    try { s.problem = parse_problem(e.value); }
    catch (const ConfigError& err) { fail(o, e.line, err.what()); }
  };
  t["n"] = [](S& s, const Document::Entry& e, const std::string& o) {
    s.n = static_cast<std::size_t>(parse_u64(e, o));
  };
  auto methods = [](S& s, const Document::Entry& e, const std::string& o) {
    s.methods.clear();
    for (const auto& m : split_list(e.value)) {
      try { s.methods.push_back(parse_method(m)); }
      catch (const ConfigError& err) { fail(o, e.line, err.what()); }
    }
  };
  t["methods"] = methods;
  t["method"] = methods;
  auto rules = [](S& s, const Document::Entry& e, const std::string& o) {
    s.rules.clear();
    for (const auto& r : split_list(e.value)) {
      try { s.rules.push_back(parse_rule(r)); }
      catch (const ConfigError& err) { fail(o, e.line, err.what()); }
    }
  };
  t["rules"] = rules;
  t["rule"] = rules;
  auto dps = [](S& s, const Document::Entry& e, const std::string& o) {
    s.delta_primes = parse_double_list(e, o);
  };
  t["delta_primes"] = dps;
  t["delta_prime"] = dps;
  auto seeds = [](S& s, const Document::Entry& e, const std::string& o) {
    s.seeds.clear();
    for (const auto& v : split_list(e.value)) {
      Document::Entry sub{e.key, v, e.line};
      s.seeds.push_back(parse_u64(sub, o));
    }
    if (s.seeds.empty()) fail(o, e.line, "empty seed list");
  };
  t["seeds"] = seeds;
  t["seed"] = seeds;
  t["dt"] = [](S& s, const Document::Entry& e, const std::string& o) { s.dt = parse_double(e, o); };
  t["eta"] = [](S& s, const Document::Entry& e, const std::string& o) { s.eta = parse_double(e, o); };
  t["x0"] = [](S& s, const Document::Entry& e, const std::string& o) { s.x0_fill = parse_double(e, o); };
  t["v0"] = [](S& s, const Document::Entry& e, const std::string& o) { s.v0_fill = parse_double(e, o); };
  t["tau"] = [](S& s, const Document::Entry& e, const std::string& o) { s.tau = parse_double(e, o); };
  t["p"] = [](S& s, const Document::Entry& e, const std::string& o) { s.p = parse_double(e, o); };
  t["rho"] = [](S& s, const Document::Entry& e, const std::string& o) { s.rho = parse_double(e, o); };
  t["table_mode"] = [](S& s, const Document::Entry& e, const std::string& o) { s.table_mode = parse_bool(e, o); };
  t["override_step_size"] = [](S& s, const Document::Entry& e, const std::string& o) { s.override_step_size = parse_bool(e, o); };
  t["max_iter"] = [](S& s, const Document::Entry& e, const std::string& o) { s.max_iter = static_cast<std::size_t>(parse_u64(e, o)); };
  t["cap"] = [](S& s, const Document::Entry& e, const std::string& o) { s.cap = static_cast<std::size_t>(parse_u64(e, o)); };
  t["workers"] = [](S& s, const Document::Entry& e, const std::string& o) { s.workers = static_cast<int>(parse_u64(e, o)); };
  t["repetitions"] = [](S& s, const Document::Entry& e, const std::string& o) { s.repetitions = static_cast<int>(parse_u64(e, o)); };
  return t;
}

std::map<std::string, Setter<SolveSpec>> solve_table() {
  using S = SolveSpec;
  std::map<std::string, Setter<S>> t;
  t["problem"] = [](S& s, const Document::Entry& e, const std::string& o) {
    try { s.problem = parse_problem(e.value); }
    catch (const ConfigError& err) { fail(o, e.line, err.what()); }
  };
  t["n"] = [](S& s, const Document::Entry& e, const std::string& o) { s.n = static_cast<std::size_t>(parse_u64(e, o)); };
  t["method"] = [](S& s, const Document::Entry& e, const std::string& o) {
    try { s.method = parse_method(e.value); }
    catch (const ConfigError& err) { fail(o, e.line, err.what()); }
  };
  t["rule"] = [](S& s, const Document::Entry& e, const std::string& o) {
    try { s.rule = parse_rule(e.value); }
    catch (const ConfigError& err) { fail(o, e.line, err.what()); }
  };
  t["delta_prime"] = [](S& s, const Document::Entry& e, const std::string& o) { s.delta_prime = parse_double(e, o); };
  t["seed"] = [](S& s, const Document::Entry& e, const std::string& o) { s.seed = parse_u64(e, o); };
  t["dt"] = [](S& s, const Document::Entry& e, const std::string& o) { s.dt = parse_double(e, o); };
  t["eta"] = [](S& s, const Document::Entry& e, const std::string& o) { s.eta = parse_double(e, o); };
  t["x0"] = [](S& s, const Document::Entry& e, const std::string& o) { s.x0_fill = parse_double(e, o); };
  t["v0"] = [](S& s, const Document::Entry& e, const std::string& o) { s.v0_fill = parse_double(e, o); };
  t["tau"] = [](S& s, const Document::Entry& e, const std::string& o) { s.tau = parse_double(e, o); };
  t["p"] = [](S& s, const Document::Entry& e, const std::string& o) { s.p = parse_double(e, o); };
  t["rho"] = [](S& s, const Document::Entry& e, const std::string& o) { s.rho = parse_double(e, o); };
  t["table_mode"] = [](S& s, const Document::Entry& e, const std::string& o) { s.table_mode = parse_bool(e, o); };
  t["override_step_size"] = [](S& s, const Document::Entry& e, const std::string& o) { s.override_step_size = parse_bool(e, o); };
  t["max_iter"] = [](S& s, const Document::Entry& e, const std::string& o) { s.max_iter = static_cast<std::size_t>(parse_u64(e, o)); };
  return t;
}

std::map<std::string, Setter<TraceSpec>> trace_table() {
  using S = TraceSpec;
  std::map<std::string, Setter<S>> t;
  t["problem"] = [](S& s, const Document::Entry& e, const std::string& o) {
    try { s.problem = parse_problem(e.value); }
    catch (const ConfigError& err) { fail(o, e.line, err.what()); }
  };
  t["n"] = [](S& s, const Document::Entry& e, const std::string& o) { s.n = static_cast<std::size_t>(parse_u64(e, o)); };
  t["delta_prime"] = [](S& s, const Document::Entry& e, const std::string& o) { s.delta_prime = parse_double(e, o); };
  t["seed"] = [](S& s, const Document::Entry& e, const std::string& o) { s.seed = parse_u64(e, o); };
  t["etas"] = [](S& s, const Document::Entry& e, const std::string& o) { s.etas = parse_double_list(e, o); };
  t["dt"] = [](S& s, const Document::Entry& e, const std::string& o) { s.dt = parse_double(e, o); };
  t["tau"] = [](S& s, const Document::Entry& e, const std::string& o) { s.tau = parse_double(e, o); };
  t["steps"] = [](S& s, const Document::Entry& e, const std::string& o) { s.steps = static_cast<std::size_t>(parse_u64(e, o)); };
  t["x0"] = [](S& s, const Document::Entry& e, const std::string& o) { s.x0_fill = parse_double(e, o); };
  t["v0"] = [](S& s, const Document::Entry& e, const std::string& o) { s.v0_fill = parse_double(e, o); };
  t["override_step_size"] = [](S& s, const Document::Entry& e, const std::string& o) { s.override_step_size = parse_bool(e, o); };
  return t;
}

std::map<std::string, Setter<FilterCurveSpec>> filters_table() {
  using S = FilterCurveSpec;
  std::map<std::string, Setter<S>> t;
  t["eta"] = [](S& s, const Document::Entry& e, const std::string& o) { s.eta = parse_double(e, o); };
  t["norm"] = [](S& s, const Document::Entry& e, const std::string& o) { s.norm = parse_double(e, o); };
  t["alphas"] = [](S& s, const Document::Entry& e, const std::string& o) { s.alphas = parse_double_list(e, o); };
  t["lambdas"] = [](S& s, const Document::Entry& e, const std::string& o) { s.lambdas = static_cast<std::size_t>(parse_u64(e, o)); };
  t["lambda_min_factor"] = [](S& s, const Document::Entry& e, const std::string& o) { s.lambda_min_factor = parse_double(e, o); };
  return t;
}

// A missing section means defaults; other sections are syntax-checked by the
// parser and key-validated when built for their own subcommand.
template <typename Spec>
Spec build_from(const Document& doc, const std::string& section,
                const std::map<std::string, Setter<Spec>>& table, Spec defaults) {
  if (const auto* entries = doc.section(section))
    apply_entries(defaults, *entries, table, doc.origin);
  return defaults;
}

}  // namespace

bench::ExperimentSpec bench_from(const Document& doc) {
  return build_from(doc, "bench", bench_table(), bench::ExperimentSpec{});
}
SolveSpec solve_from(const Document& doc) {
  return build_from(doc, "solve", solve_table(), SolveSpec{});
}
TraceSpec trace_from(const Document& doc) {
  return build_from(doc, "trace", trace_table(), TraceSpec{});
}
FilterCurveSpec filters_from(const Document& doc) {
  return build_from(doc, "filters", filters_table(), FilterCurveSpec{});
}

void apply_override(bench::ExperimentSpec& spec, const std::string& kv) {
  apply_override_kv(spec, kv, bench_table());
}
void apply_override(SolveSpec& spec, const std::string& kv) {
  apply_override_kv(spec, kv, solve_table());
}
void apply_override(TraceSpec& spec, const std::string& kv) {
  apply_override_kv(spec, kv, trace_table());
}
void apply_override(FilterCurveSpec& spec, const std::string& kv) {
  apply_override_kv(spec, kv, filters_table());
}

namespace {

void write_list(std::ostream& os, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
}

}  // namespace

void write_manifest(std::ostream& os, const bench::ExperimentSpec& spec) {
  os.precision(17);
  os << "[bench]\n";
  os << "problem = " << problems::example_name(spec.problem) << '\n';
  os << "n = " << spec.n << '\n';
  os << "methods = ";
  for (std::size_t i = 0; i < spec.methods.size(); ++i)
    os << (i ? "," : "") << solvers::method_name(spec.methods[i]);
  os << '\n';
  os << "rules = ";
  for (std::size_t i = 0; i < spec.rules.size(); ++i)
    os << (i ? "," : "") << stopping::rule_name(spec.rules[i]);
  os << '\n';
  os << "delta_primes = ";
  write_list(os, spec.delta_primes);
  os << '\n';
  os << "seeds = ";
  for (std::size_t i = 0; i < spec.seeds.size(); ++i)
    os << (i ? "," : "") << spec.seeds[i];
  os << '\n';
  os << "dt = " << spec.dt << '\n';
  os << "eta = " << spec.eta << '\n';
  os << "x0 = " << spec.x0_fill << '\n';
  os << "v0 = " << spec.v0_fill << '\n';
  os << "tau = " << spec.tau << '\n';
  os << "p = " << spec.p << '\n';
  os << "rho = " << spec.rho << '\n';
  os << "table_mode = " << (spec.table_mode ? "true" : "false") << '\n';
  os << "override_step_size = " << (spec.override_step_size ? "true" : "false")
     << '\n';
  os << "max_iter = " << spec.max_iter << '\n';
  os << "cap = " << spec.cap << '\n';
  os << "workers = " << spec.workers << '\n';
  os << "repetitions = " << spec.repetitions << '\n';
}

void write_manifest(std::ostream& os, const SolveSpec& spec) {
  os.precision(17);
  os << "[solve]\n";
  os << "problem = " << problems::example_name(spec.problem) << '\n';
  os << "n = " << spec.n << '\n';
  os << "method = " << solvers::method_name(spec.method) << '\n';
  os << "rule = " << stopping::rule_name(spec.rule) << '\n';
  os << "delta_prime = " << spec.delta_prime << '\n';
  os << "seed = " << spec.seed << '\n';
  os << "dt = " << spec.dt << '\n';
  os << "eta = " << spec.eta << '\n';
  os << "x0 = " << spec.x0_fill << '\n';
  os << "v0 = " << spec.v0_fill << '\n';
  os << "tau = " << spec.tau << '\n';
  os << "p = " << spec.p << '\n';
  os << "rho = " << spec.rho << '\n';
  os << "table_mode = " << (spec.table_mode ? "true" : "false") << '\n';
  os << "override_step_size = " << (spec.override_step_size ? "true" : "false")
     << '\n';
  os << "max_iter = " << spec.max_iter << '\n';
}

void write_manifest(std::ostream& os, const TraceSpec& spec) {
  os.precision(17);
  os << "[trace]\n";
  os << "problem = " << problems::example_name(spec.problem) << '\n';
  os << "n = " << spec.n << '\n';
  os << "delta_prime = " << spec.delta_prime << '\n';
  os << "seed = " << spec.seed << '\n';
  os << "etas = ";
  write_list(os, spec.etas);
  os << '\n';
  os << "dt = " << spec.dt << '\n';
  os << "tau = " << spec.tau << '\n';
  os << "steps = " << spec.steps << '\n';
  os << "x0 = " << spec.x0_fill << '\n';
  os << "v0 = " << spec.v0_fill << '\n';
  os << "override_step_size = " << (spec.override_step_size ? "true" : "false")
     << '\n';
}

void write_manifest(std::ostream& os, const FilterCurveSpec& spec) {
  os.precision(17);
  os << "[filters]\n";
  os << "eta = " << spec.eta << '\n';
  os << "norm = " << spec.norm << '\n';
  os << "alphas = ";
  write_list(os, spec.alphas);
  os << '\n';
  os << "lambdas = " << spec.lambdas << '\n';
  os << "lambda_min_factor = " << spec.lambda_min_factor << '\n';
}

bench::ExperimentSpec bench_preset(const std::string& name) {
  bench::ExperimentSpec s;
  if (name == "example1") {
    s.problem = problems::ExampleLabel::Example1;
    s.dt = 19.4946;
    s.eta = 2.5648e-4;
    s.x0_fill = 1.0;
    s.v0_fill = 0.0;
    s.tau = 2.0;
    s.p = 0.1125;
  } else if (name == "example2") {
    s.problem = problems::ExampleLabel::Example2;
    s.dt = 19.4946;
    s.eta = 0.0051;
    s.x0_fill = 0.0;
    s.v0_fill = 0.0;
    s.tau = 2.0;
    s.p = 0.5625;
  } else {
    throw ConfigError("unknown preset '" + name + "' (example1, example2)");
  }
  s.n = 400;
  // The table step size exceeds the conservative bound for this
  // discretization (it sits just inside the stability region), so the
  // presets carry the explicit override.
  s.override_step_size = true;
  s.max_iter = 400000;
  return s;
}

SolveSpec solve_preset(const std::string& name) {
  const bench::ExperimentSpec b = bench_preset(name);
  SolveSpec s;
  s.problem = b.problem;
  s.n = b.n;
  s.dt = b.dt;
  s.eta = b.eta;
  s.x0_fill = b.x0_fill;
  s.v0_fill = b.v0_fill;
  s.tau = b.tau;
  s.p = b.p;
  s.table_mode = b.table_mode;
  s.override_step_size = b.override_step_size;
  s.max_iter = b.max_iter;
  return s;
}

}  // namespace soar::config
