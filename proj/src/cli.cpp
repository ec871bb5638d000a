#include "ctstat/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ctstat/error.hpp"
#include "ctstat/laplace.hpp"
#include "ctstat/mc.hpp"
#include "ctstat/relax.hpp"
#include "ctstat/renewal.hpp"
#include "ctstat/special.hpp"
#include "ctstat/stats.hpp"

namespace ctstat::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kThreadsVariable = "CTSTAT_THREADS";

// ---------------------------------------------------------------- flags

enum class Kind { Number, Integer, Text, Numbers, Switch };

struct FlagSpec {
  std::string name;
  Kind kind;
  std::string fallback;  // empty: optional with no default
  std::string help;
  bool required = false;
};

double to_number(const std::string& text, const std::string& flag) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw DomainError("invalid number '" + text + "' for --" + flag);
  return value;
}

long long to_integer(const std::string& text, const std::string& flag) {
  long long value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw DomainError("invalid integer '" + text + "' for --" + flag);
  return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class Params {
 public:
  explicit Params(const json& values) : values_(values) {}

  bool has(const std::string& name) const { return values_.contains(name) && !values_.at(name).is_null(); }
  const json& raw(const std::string& name) const {
    if (!has(name)) throw DomainError("missing --" + name);
    return values_.at(name);
  }
  double number(const std::string& name) const { return raw(name).get<double>(); }
  long long integer(const std::string& name) const { return raw(name).get<long long>(); }
  std::string text(const std::string& name) const { return raw(name).get<std::string>(); }
  bool flag(const std::string& name) const { return has(name) && values_.at(name).get<bool>(); }
  std::vector<double> numbers(const std::string& name) const { return raw(name).get<std::vector<double>>(); }

 private:
  const json& values_;
};

// ---------------------------------------------------------------- output

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  bool record = false;  // a single result object rather than rows

  void add(std::vector<json> row) { rows.push_back(std::move(row)); }
};

std::string format_cell(const json& cell) {
  if (cell.is_number_float()) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", cell.get<double>());
    return buffer;
  }
  if (cell.is_string()) return cell.get<std::string>();
  return cell.dump();
}

std::string render(const RunConfig& config, const Table& table) {
  std::ostringstream os;
  if (config.format == OutputFormat::Csv) {
    os << "# " << config.to_json().dump() << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_cell(row[c]);
      os << '\n';
    }
    return os.str();
  }
  json doc;
  doc["config"] = config.to_json();
  if (table.record && table.rows.size() == 1) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) doc[table.columns[c]] = table.rows[0][c];
  } else {
    doc["columns"] = table.columns;
    doc["rows"] = json::array();
    for (const auto& row : table.rows) doc["rows"].push_back(row);
  }
  os << doc.dump(2) << '\n';
  return os.str();
}

// ---------------------------------------------------------------- helpers

InterEventLaw waits_from(const Params& p) {
  if (p.has("alpha")) return InterEventLaw::mittag_leffler(p.number("alpha"));
  return InterEventLaw::parse(p.text("waits"));
}

InversionConfig inversion_from(const Params& p) {
  const std::string method = p.text("method");
  InversionConfig config;
  if (method == "talbot")
    config = InversionConfig::talbot();
  else if (method == "gaver-stehfest" || method == "gs")
    config = InversionConfig::gaver_stehfest();
  else
    throw DomainError("unknown inversion method '" + method + "' (talbot, gaver-stehfest)");
  if (p.has("order")) config.order = static_cast<int>(p.integer("order"));
  config.validate();
  return config;
}

StatisticKind statistic_from(const Params& p) {
  const std::string s = p.text("stat");
  if (s == "sum") return StatisticKind::Sum;
  if (s == "max") return StatisticKind::Max;
  throw DomainError("unknown statistic '" + s + "' (sum, max)");
}

std::size_t positive_count(const Params& p, const std::string& name) {
  const long long n = p.integer(name);
  if (n < 1) throw DomainError("--" + name + " must be at least 1");
  return static_cast<std::size_t>(n);
}

std::vector<double> spatial_grid(const Params& p) {
  if (p.has("u")) return p.numbers("u");
  if (!p.has("u-max")) throw DomainError("give --u or --u-max");
  const double u_max = p.number("u-max");
  const long long points = p.integer("points");
  if (!(u_max > 0.0) || points < 2) throw DomainError("--u-max must be positive and --points at least 2");
  std::vector<double> us(points);
  for (long long i = 0; i < points; ++i) us[i] = u_max * static_cast<double>(i) / static_cast<double>(points - 1);
  return us;
}

// CDF of S(t) at every u, by the closed form when one exists.
std::vector<double> analytic_cdf(const Params& p, std::span<const double> us) {
  const StatisticKind kind = statistic_from(p);
  const JumpLaw jumps = JumpLaw::parse(p.text("jumps"));
  const InterEventLaw waits = waits_from(p);
  const double t = p.number("t");
  const double tol = p.number("tol");
  const std::string route = p.text("route");
  if (route != "auto" && route != "closed" && route != "mixture")
    throw DomainError("unknown route '" + route + "' (auto, closed, mixture)");
  ConvolutionOptions conv;
  conv.cells = static_cast<int>(p.integer("cells"));
  conv.max_error = p.number("max-error");

  if (route != "mixture") {
    const auto* exp_waits = std::get_if<InterEventLaw::Exponential>(&waits.variant());
    if (kind == StatisticKind::Max) {
      // Exponential(rate) waits are the alpha = 1 case on the time scale rate * t.
      const MlOrder order =
          exp_waits ? MlOrder(1.0) : std::get<InterEventLaw::MittagLeffler>(waits.variant()).order;
      const double scaled_t = exp_waits ? exp_waits->rate * t : t;
      std::vector<double> out(us.size());
      for (std::size_t k = 0; k < us.size(); ++k) out[k] = max_cdf(order, jumps, scaled_t, us[k]);
      return out;
    }
    if (exp_waits) return sum_cdf_series(jumps, exp_waits->rate, t, us, tol, conv);
    if (route == "closed") throw DomainError("no closed form for the sum under Mittag-Leffler waits; use --route mixture");
  }
  return mixture_cdf(kind, jumps, waits, t, us, tol, InversionConfig{}, conv);
}

// ---------------------------------------------------------------- commands

Table cmd_ml(const Params& p, const RunConfig&) {
  const MlOrder order(p.number("alpha"));
  Table table{{"z", "value", "regime", "est_error"}, {}};
  for (double z : p.numbers("z")) {
    const MlEvaluation e = ml_one_param(order, z);
    table.add({z, e.value, std::string(to_string(e.regime)), e.est_error});
  }
  return table;
}

Table cmd_pmf(const Params& p, const RunConfig&) {
  const InterEventLaw law = waits_from(p);
  const InversionConfig config = inversion_from(p);
  Table table{{"t", "n", "probability", "tail_bound"}, {}};
  for (double t : p.numbers("t")) {
    const CountingPmfTable pmf = p.has("nmax") ? counting_pmf(law, t, static_cast<int>(p.integer("nmax")), config)
                                               : counting_pmf_auto(law, t, p.number("tail-tol"), config);
    for (int n = 0; n <= pmf.truncation; ++n) table.add({t, n, pmf[n], pmf.tail_bound});
  }
  return table;
}

Table cmd_epochs(const Params& p, const RunConfig& config) {
  const InterEventLaw law = waits_from(p);
  const double horizon = p.number("horizon");
  const std::size_t paths = positive_count(p, "paths");
  Table table{{"path", "index", "epoch"}, {}};
  for (std::size_t path = 0; path < paths; ++path) {
    RandomSource rng(stream_seed(config.seed, path));
    const EpochSequence seq = generate_epochs(law, horizon, rng);
    for (std::size_t i = 0; i < seq.epochs.size(); ++i) table.add({path, i + 1, seq.epochs[i]});
  }
  return table;
}

LaplaceSymbol named_symbol(const Params& p) {
  const std::string name = p.text("symbol");
  using cplx = std::complex<double>;
  if (name == "unit") return {[](cplx s) { return 1.0 / s; }, "unit"};
  if (name == "exp-decay") {
    const double rate = p.number("rate");
    return {[rate](cplx s) { return 1.0 / (s + rate); }, "exp-decay"};
  }
  const InterEventLaw law = waits_from(p);
  const int n = static_cast<int>(p.integer("n"));
  if (name == "density") return density_symbol(law);
  if (name == "survival") return survival_symbol(law);
  if (name == "pmf") return counting_pmf_symbol(law, n);
  if (name == "epoch-cdf") return epoch_cdf_symbol(law, n);
  if (name == "mw") return mw_symbol(p.number("v"), law);
  throw DomainError("unknown symbol '" + name + "' (unit, exp-decay, density, survival, pmf, epoch-cdf, mw)");
}

Table cmd_invert(const Params& p, const RunConfig&) {
  const LaplaceSymbol symbol = named_symbol(p);
  const InversionConfig config = inversion_from(p);
  Table table{{"t", "value", "cross_check", "disagreement"}, {}};
  for (double t : p.numbers("t")) {
    const InversionResult r = invert_checked(symbol, t, config);
    table.add({t, r.value, r.cross_check, r.disagreement});
  }
  return table;
}

Table cmd_analytic(const Params& p, const RunConfig&) {
  const std::vector<double> us = spatial_grid(p);
  const std::vector<double> cdf = analytic_cdf(p, us);
  Table table{{"u", "cdf"}, {}};
  for (std::size_t k = 0; k < us.size(); ++k) table.add({us[k], cdf[k]});
  return table;
}

TransitionMatrix matrix_from(const Params& p) {
  std::vector<std::string> states = split(p.text("states"), ',');
  std::vector<std::vector<double>> rows;
  for (const std::string& row : split(p.text("matrix"), ';')) {
    std::vector<double> values;
    for (const std::string& cell : split(row, ',')) values.push_back(to_number(cell, "matrix"));
    rows.push_back(std::move(values));
  }
  return TransitionMatrix(std::move(states), std::move(rows));
}

Table cmd_chain(const Params& p, const RunConfig& config) {
  const TransitionMatrix q = matrix_from(p);
  const std::size_t start = q.index_of(p.text("start"));
  const InterEventLaw law = waits_from(p);
  const std::vector<double> ts = p.numbers("t");
  const double tol = p.number("tol");
  const long long paths = p.integer("paths");
  if (paths < 0) throw DomainError("--paths must be non-negative");

  Table table;
  table.columns.push_back("t");
  for (const auto& s : q.states()) table.columns.push_back("p_" + s);
  OccupancyTable occupancy;
  if (paths > 0) {
    for (const auto& s : q.states()) table.columns.push_back("mc_" + s);
    occupancy = simulate_chain(q, start, law, ts, static_cast<std::size_t>(paths), config.seed, config.threads);
  }
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::vector<json> row{ts[k]};
    for (double v : semi_markov_row(q, start, law, ts[k], tol)) row.emplace_back(v);
    if (paths > 0)
      for (std::size_t s = 0; s < q.size(); ++s) row.emplace_back(occupancy.fraction[s][k]);
    table.add(std::move(row));
  }
  return table;
}

Table cmd_solve(const Params& p, const RunConfig& config) {
  const std::string kernel = p.text("kernel");
  RelaxationProblem problem;
  if (kernel == "delta")
    problem.kernel = KernelSpec::delta();
  else if (kernel == "powerlaw")
    problem.kernel = KernelSpec::power_law(p.number("alpha"));
  else
    throw DomainError("unknown kernel '" + kernel + "' (delta, powerlaw)");
  problem.c = p.number("c");
  problem.t_max = p.number("tmax");
  problem.step = p.number("h");
  SolverOptions options;
  options.threads = config.threads;
  options.corrections = static_cast<int>(p.integer("corrections"));
  const std::size_t every = positive_count(p, "every");

  const RelaxationSolution solution = solve_relaxation(problem, options);
  Table table{{"t", "Q", "est_error"}, {}};
  for (std::size_t i = 0; i < solution.grid.size(); ++i)
    if (i % every == 0 || i + 1 == solution.grid.size())
      table.add({solution.grid[i], solution.values[i], solution.est_error});
  return table;
}

SimulationPlan plan_from(const Params& p, const RunConfig& config) {
  SimulationPlan plan;
  plan.kind = statistic_from(p);
  plan.jump_law = JumpLaw::parse(p.text("jumps"));
  plan.ie_law = waits_from(p);
  plan.t = p.number("t");
  plan.n_paths = positive_count(p, "paths");
  plan.master_seed = config.seed;
  return plan;
}

Table cmd_simulate(const Params& p, const RunConfig& config) {
  const std::vector<double> samples = simulate_statistic(plan_from(p, config), config.threads);
  Table table{{"value"}, {}};
  for (double x : samples) table.add({x});
  return table;
}

Table cmd_compare(const Params& p, const RunConfig& config) {
  const SimulationPlan plan = plan_from(p, config);
  const Ecdf ecdf(simulate_statistic(plan, config.threads));
  const std::vector<double> points = ecdf.support();
  const std::vector<double> values = analytic_cdf(p, points);
  // Left limits: continuous on (0, inf) except for point-mass jumps.
  std::vector<double> lefts(points.size(), 0.0);
  if (std::holds_alternative<JumpLaw::Degenerate>(plan.jump_law.variant())) {
    std::vector<double> before(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) before[k] = points[k] > 0.0 ? std::nextafter(points[k], 0.0) : 0.0;
    const std::vector<double> at_before = analytic_cdf(p, before);
    for (std::size_t k = 0; k < points.size(); ++k) lefts[k] = points[k] > 0.0 ? at_before[k] : 0.0;
  } else {
    for (std::size_t k = 0; k < points.size(); ++k) lefts[k] = points[k] > 0.0 ? values[k] : 0.0;
  }
  const KsReport report = ks_from_values(ecdf, values, lefts, p.number("threshold"));
  Table table{{"d", "n", "threshold", "pass"}, {}, true};
  table.add({report.d, report.n, report.threshold, report.pass});
  return table;
}

// ---------------------------------------------------------------- registry

struct Command {
  std::string name;
  std::string help;
  std::vector<FlagSpec> flags;
  std::function<Table(const Params&, const RunConfig&)> handler;
  OutputFormat default_format = OutputFormat::Csv;
};

std::vector<FlagSpec> statistic_flags() {
  return {
      {"stat", Kind::Text, "", "statistic: sum or max", true},
      {"jumps", Kind::Text, "exp:1", "jump law: exp:RATE, uniform:B, pareto:SCALE,EXP, degenerate:C"},
      {"waits", Kind::Text, "exp:1", "waiting-time law: exp:RATE or ml:ALPHA"},
      {"alpha", Kind::Number, "", "shorthand for --waits ml:ALPHA"},
      {"t", Kind::Number, "", "time", true},
      {"tol", Kind::Number, "1e-8", "series truncation tolerance"},
      {"route", Kind::Text, "auto", "analytic route: auto, closed or mixture"},
      {"cells", Kind::Integer, "2048", "grid cells for numeric convolutions"},
      {"max-error", Kind::Number, "1e-3", "error budget for numeric convolutions"},
  };
}

std::vector<FlagSpec> inversion_flags() {
  return {
      {"method", Kind::Text, "talbot", "inversion: talbot or gaver-stehfest"},
      {"order", Kind::Integer, "", "inversion order (talbot 24, gaver-stehfest 14)"},
  };
}

template <typename... Lists>
std::vector<FlagSpec> concat(std::vector<FlagSpec> first, Lists... rest) {
  (first.insert(first.end(), rest.begin(), rest.end()), ...);
  return first;
}

const std::vector<Command>& commands() {
  static const std::vector<Command> registry = [] {
    std::vector<Command> c;
    c.push_back({"ml",
                 "Mittag-Leffler function E_alpha(z)",
                 {{"alpha", Kind::Number, "", "order in (0, 1]", true},
                  {"z", Kind::Numbers, "", "arguments (comma separated or repeated)", true}},
                 cmd_ml});
    c.push_back({"pmf",
                 "counting pmf P(N(t) = n)",
                 concat({{"waits", Kind::Text, "exp:1", "waiting-time law: exp:RATE or ml:ALPHA"},
                         {"alpha", Kind::Number, "", "shorthand for --waits ml:ALPHA"},
                         {"t", Kind::Numbers, "", "times", true},
                         {"nmax", Kind::Integer, "", "fixed truncation (default: automatic)"},
                         {"tail-tol", Kind::Number, "1e-6", "tail bound for automatic truncation"}},
                        inversion_flags()),
                 cmd_pmf});
    c.push_back({"epochs",
                 "simulated renewal epochs",
                 {{"waits", Kind::Text, "exp:1", "waiting-time law: exp:RATE or ml:ALPHA"},
                  {"alpha", Kind::Number, "", "shorthand for --waits ml:ALPHA"},
                  {"horizon", Kind::Number, "", "time horizon", true},
                  {"paths", Kind::Integer, "1", "number of independent sequences"}},
                 cmd_epochs});
    c.push_back({"invert",
                 "numeric inverse Laplace transform of a named symbol",
                 concat({{"symbol", Kind::Text, "", "unit, exp-decay, density, survival, pmf, epoch-cdf, mw", true},
                         {"waits", Kind::Text, "exp:1", "waiting-time law: exp:RATE or ml:ALPHA"},
                         {"alpha", Kind::Number, "", "shorthand for --waits ml:ALPHA"},
                         {"t", Kind::Numbers, "", "times", true},
                         {"n", Kind::Integer, "0", "count for pmf and epoch-cdf"},
                         {"v", Kind::Number, "0.5", "statistic transform value for mw"},
                         {"rate", Kind::Number, "1", "rate for exp-decay"}},
                        inversion_flags()),
                 cmd_invert});
    c.push_back({"analytic",
                 "analytic CDF of the continuous-time statistic",
                 concat(statistic_flags(),
                        std::vector<FlagSpec>{{"u", Kind::Numbers, "", "spatial points"},
                                              {"u-max", Kind::Number, "", "upper end of a uniform grid from 0"},
                                              {"points", Kind::Integer, "101", "grid points with --u-max"}}),
                 cmd_analytic});
    c.push_back({"chain",
                 "semi-Markov marginals p_ij(t)",
                 {{"states", Kind::Text, "A,B", "state labels"},
                  {"matrix", Kind::Text, "0,1;0,1", "transition matrix rows separated by ';'"},
                  {"start", Kind::Text, "A", "initial state"},
                  {"waits", Kind::Text, "exp:1", "waiting-time law: exp:RATE or ml:ALPHA"},
                  {"alpha", Kind::Number, "", "shorthand for --waits ml:ALPHA"},
                  {"t", Kind::Numbers, "", "times", true},
                  {"tol", Kind::Number, "1e-8", "pmf tail tolerance"},
                  {"paths", Kind::Integer, "0", "also simulate this many trajectories"}},
                 cmd_chain});
    c.push_back({"solve",
                 "relaxation equation with a delta or power-law memory kernel",
                 {{"kernel", Kind::Text, "powerlaw", "delta or powerlaw"},
                  {"alpha", Kind::Number, "", "power-law order in (0, 1)"},
                  {"c", Kind::Number, "1", "relaxation coefficient"},
                  {"tmax", Kind::Number, "", "final time", true},
                  {"h", Kind::Number, "", "time step", true},
                  {"corrections", Kind::Integer, "-1", "L1 starting corrections (-1: automatic, 0: plain L1)"},
                  {"every", Kind::Integer, "1", "print every k-th grid point"}},
                 cmd_solve});
    c.push_back({"simulate",
                 "Monte Carlo samples of the statistic",
                 concat(statistic_flags(), std::vector<FlagSpec>{{"paths", Kind::Integer, "100000", "paths"}}),
                 cmd_simulate});
    c.push_back({"compare",
                 "KS distance between simulation and the analytic CDF",
                 concat(statistic_flags(),
                        std::vector<FlagSpec>{{"paths", Kind::Integer, "100000", "paths"},
                                              {"threshold", Kind::Number, "0", "KS threshold (0: 1.63/sqrt(n))"}}),
                 cmd_compare, OutputFormat::Json});
    return c;
  }();
  return registry;
}

const Command& find_command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw DomainError("unknown subcommand '" + name + "'");
}

json convert(const FlagSpec& spec, const std::vector<std::string>& values, bool switched) {
  if (spec.kind == Kind::Switch) return switched;
  if (values.empty()) {
    if (spec.fallback.empty()) return nullptr;
    return convert(spec, {spec.fallback}, false);
  }
  switch (spec.kind) {
    case Kind::Number:
      return to_number(values.back(), spec.name);
    case Kind::Integer:
      return to_integer(values.back(), spec.name);
    case Kind::Text:
      return values.back();
    case Kind::Numbers: {
      json out = json::array();
      for (const auto& v : values) out.push_back(to_number(v, spec.name));
      return out;
    }
    case Kind::Switch:
      break;
  }
  return nullptr;
}

int default_threads() {
  if (const char* env = std::getenv(kThreadsVariable)) {
    long long n = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec == std::errc() && ptr == text.data() + text.size() && n >= 0 && n <= 1024) return static_cast<int>(n);
  }
  return 1;
}

int resolve_threads(long long requested) {
  if (requested < 0 || requested > 1024) throw DomainError("--threads must lie in [0, 1024]");
  if (requested == 0) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(requested);
}

RunConfig config_from_json(const json& doc) {
  RunConfig config;
  config.subcommand = doc.at("subcommand").get<std::string>();
  config.parameters = doc.at("parameters");
  config.seed = doc.at("seed").get<std::uint64_t>();
  config.threads = doc.value("threads", 1);
  config.format = doc.value("format", std::string("csv")) == "json" ? OutputFormat::Json : OutputFormat::Csv;
  find_command(config.subcommand);
  return config;
}

RunConfig load_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::string first;
  std::getline(in, first);
  json doc;
  if (first.rfind("# ", 0) == 0) {
    doc = json::parse(first.substr(2), nullptr, false);
  } else {
    in.seekg(0);
    doc = json::parse(in, nullptr, false);
    if (!doc.is_discarded() && doc.contains("config")) doc = doc["config"];
  }
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("subcommand"))
    throw DomainError("'" + path + "' carries no run header");
  return config_from_json(doc);
}

}  // namespace

json RunConfig::to_json() const {
  json doc;
  doc["subcommand"] = subcommand;
  doc["parameters"] = parameters;
  doc["seed"] = seed;
  doc["threads"] = threads;
  doc["format"] = format == OutputFormat::Json ? "json" : "csv";
  return doc;
}

std::variant<RunConfig, int> parse_arguments(int argc, const char* const* argv, std::ostream& out,
                                             std::ostream& err) {
  CLI::App app("Continuous-time statistics of convolution type: analytic CDFs, relaxation solver, Monte Carlo");
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string output = "-";
  std::string format;
  std::string seed_text = "42";
  std::string threads_text;
  std::string replay;
  app.add_option("-o,--output", output, "output file ('-' for standard output)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed_text, "master seed for simulations");
  app.add_option("--threads", threads_text, std::string("worker threads (0: all cores; default from ") +
                                                kThreadsVariable + " or 1)");
  app.add_option("--replay", replay, "re-run the computation recorded in an output file's header");

  struct Storage {
    std::vector<std::string> values;
    bool switched = false;
  };
  std::map<std::string, std::map<std::string, Storage>> storage;
  std::map<std::string, CLI::App*> subcommands;
  for (const auto& command : commands()) {
    CLI::App* sub = app.add_subcommand(command.name, command.help);
    sub->set_help_flag("--help", "print this help and exit");  // keeps -h free for --h
    subcommands[command.name] = sub;
    for (const auto& flag : command.flags) {
      Storage& slot = storage[command.name][flag.name];
      std::string help = flag.help;
      if (!flag.fallback.empty()) help += " [" + flag.fallback + "]";
      if (flag.kind == Kind::Switch) {
        sub->add_flag("--" + flag.name, slot.switched, help);
        continue;
      }
      CLI::Option* opt = sub->add_option("--" + flag.name, slot.values, help);
      if (flag.kind == Kind::Numbers)
        opt->delimiter(',');
      else
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
      if (flag.required) opt->required();
    }
  }

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kDomain;
  }

  try {
    RunConfig config;
    if (!replay.empty()) {
      config = load_replay(replay);
    } else {
      const auto parsed = app.get_subcommands();
      if (parsed.empty()) {
        err << app.help();
        return kDomain;
      }
      const Command& command = find_command(parsed.front()->get_name());
      config.subcommand = command.name;
      config.format = command.default_format;
      for (const auto& flag : command.flags) {
        const Storage& slot = storage[command.name][flag.name];
        config.parameters[flag.name] = convert(flag, slot.values, slot.switched);
      }
      // record the law --alpha actually selects
      auto& params = config.parameters;
      if (params.contains("waits") && params.contains("alpha") && params["alpha"].is_number())
        params["waits"] = "ml:" + params["alpha"].dump();
      const long long seed = to_integer(seed_text, "seed");
      config.seed = static_cast<std::uint64_t>(seed);
    }
    if (!format.empty()) config.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    config.threads = threads_text.empty() ? default_threads() : resolve_threads(to_integer(threads_text, "threads"));
    config.output_path = output;
    return config;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed run header: " << e.what() << '\n';
    return kDomain;
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    const Command& command = find_command(config.subcommand);
    const Params params(config.parameters);
    text = render(config, command.handler(params, config));
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const CapabilityError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const nlohmann::json::exception& e) {
    err << "domain error: bad parameter: " << e.what() << '\n';
    return kDomain;
  }

  if (config.output_path == "-") {
    out << text;
    out.flush();
    if (!out) {
      err << "I/O error: cannot write output\n";
      return kIo;
    }
    return kSuccess;
  }
  std::ofstream file(config.output_path, std::ios::binary);
  if (!file) {
    err << "I/O error: cannot open '" << config.output_path << "' for writing\n";
    return kIo;
  }
  file << text;
  file.close();
  if (!file) {
    err << "I/O error: failed writing '" << config.output_path << "'\n";
    return kIo;
  }
  return kSuccess;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto parsed = parse_arguments(argc, argv, out, err);
  if (const int* code = std::get_if<int>(&parsed)) return *code;
  return run(std::get<RunConfig>(parsed), out, err);
}

}  // namespace ctstat::cli
