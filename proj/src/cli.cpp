#include "survmap/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include "survmap/chansim.hpp"
#include "survmap/errors.hpp"
#include "survmap/format.hpp"
#include "survmap/fsmc.hpp"
#include "survmap/reliability.hpp"
#include "survmap/trace.hpp"
#include "survmap/translate.hpp"

namespace survmap::cli {
namespace {

using Json = nlohmann::ordered_json;

// Options shared by every command plus each command's own parameters. CLI11
// binds directly into these.
struct CommonOptions {
  std::string format = "json";
  std::string out_path;
};

struct MapOptions {
  double per = 0.0;
  std::string tau_dn;
  std::optional<double> tau_dn_cycles;
  std::optional<int> nsv;
  std::string survival;
  std::optional<double> cycle_ms;
  std::string fsmc_dump;
};

struct InvertOptions {
  std::optional<double> availability;
  std::optional<int> nines;
  std::optional<double> reliability_cycles;
  std::string reliability;
  std::optional<double> cycle_ms;
  std::optional<double> per;
  std::optional<double> tau_dn_cycles;
  int nsv = 0;
  double tau_cap = IntervalSearchOptions{}.tau_cap;
};

struct SimulateOptions {
  double per = 0.0;
  std::optional<double> tau_dn_cycles;
  bool independent = false;
  std::uint64_t cycles = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  int nsv = 0;
  unsigned threads = 0;
  std::optional<double> cycle_ms;
  std::string trace_out;
};

struct AnalyzeOptions {
  std::string trace;
  std::string packet_log;
  std::optional<std::uint64_t> expected;
  std::optional<double> delay_bound_ms;
  std::optional<double> cycle_ms;
  int nsv = 0;
  std::string cdf_out;
  bool strict_runs = false;
  bool no_initial_up = false;
};

struct SweepOptions {
  std::string var;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  std::string metric = "availability";
  double per = 0.0;
  std::optional<double> tau_dn_cycles;
  std::optional<int> nsv;
  bool independent = false;
  bool monte_carlo = false;
  std::uint64_t cycles = 1'000'000;
  std::uint64_t reps = 10;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct Output {
  std::string body;
  int status = kOk;
};

// "2ms", "0.5 s", "150us" -> seconds. Bare numbers are rejected.
Seconds parse_duration(std::string_view text) {
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  struct Unit {
    std::string_view suffix;
    double scale;
  };
  static constexpr Unit kUnits[] = {{"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
  for (const auto& unit : kUnits) {
    if (text.size() > unit.suffix.size() && text.ends_with(unit.suffix)) {
      auto number = text.substr(0, text.size() - unit.suffix.size());
      while (!number.empty() && number.back() == ' ') number.remove_suffix(1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
      if (ec != std::errc{} || ptr != number.data() + number.size()) break;
      return value * unit.scale;
    }
  }
  throw InvalidInput("duration '" + std::string(text) + "' needs a unit suffix (us, ms or s)");
}

Seconds cycle_period_from_ms(double ms) {
  if (!(ms > 0.0) || !std::isfinite(ms)) throw InvalidInput("--cycle-ms must be > 0");
  return ms * 1e-3;
}

std::optional<Seconds> optional_cycle_period(const std::optional<double>& ms) {
  if (!ms) return std::nullopt;
  return cycle_period_from_ms(*ms);
}

void put(Json& j, const std::string& key, double value, const char* unit) {
  j[key] = value;
  j[key + "_unit"] = unit;
}

void put_count(Json& j, const std::string& key, std::uint64_t value, const char* unit) {
  j[key] = value;
  j[key + "_unit"] = unit;
}

Json meta_json(const std::string& command, std::optional<std::uint64_t> seed = std::nullopt) {
  Json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["command"] = command;
  if (seed) {
    meta["rng"] = {{"algorithm", std::string(kRngAlgorithm)}, {"seed", *seed}};
  }
  return meta;
}

Json network_json(const NetworkParams& params) {
  Json j;
  put(j, "per", params.per(), "probability");
  put(j, "up_exit_probability", params.up_exit(), "per_cycle");
  put(j, "down_exit_probability", params.down_exit(), "per_cycle");
  put(j, "tau_un_cycles", params.mean_up(), "cycles");
  put(j, "tau_dn_cycles", params.mean_down(), "cycles");
  return j;
}

Json report_json(const ReliabilityReport& report) {
  Json j;
  put_count(j, "survival_cycles", static_cast<std::uint64_t>(report.survival_cycles), "cycles");
  put(j, "app_availability", report.app_availability, "probability");
  put(j, "app_unavailability", report.app_unavailability, "probability");
  j["app_reliability_kind"] = to_string(report.app_reliability.kind());
  if (report.app_reliability.is_finite()) {
    put(j, "app_reliability_cycles", report.app_reliability.cycles(), "cycles");
    if (const auto s = report.app_reliability_seconds()) put(j, "app_reliability_seconds", *s, "s");
  }
  put(j, "network_availability", report.network_availability, "probability");
  put(j, "transition_rate", report.transition_rate, "events_per_cycle");
  if (report.app_mean_downtime) {
    put(j, "app_mean_downtime_cycles", *report.app_mean_downtime, "cycles");
    if (const auto s = report.app_mean_downtime_seconds()) put(j, "app_mean_downtime_seconds", *s, "s");
  }
  if (report.network_mean_downtime) {
    put(j, "network_mean_downtime_cycles", *report.network_mean_downtime, "cycles");
    if (const auto s = report.network_mean_downtime_seconds()) put(j, "network_mean_downtime_seconds", *s, "s");
  }
  if (report.cycle_period) put(j, "cycle_period_seconds", *report.cycle_period, "s");
  return j;
}

Json feasibility_json(const FeasibilityResult& result, const char* quantity, const char* unit) {
  Json j;
  j["kind"] = to_string(result.kind);
  j["quantity"] = quantity;
  if (result.kind == FeasibilityResult::Kind::bound) put(j, "value", result.value, unit);
  if (result.kind == FeasibilityResult::Kind::interval_set) {
    Json intervals = Json::array();
    for (const auto& interval : result.intervals) {
      Json item;
      put(item, "low", interval.low, unit);
      put(item, "high", interval.high, unit);
      intervals.push_back(item);
    }
    j["intervals"] = intervals;
  }
  if (!result.diagnostic.empty()) j["diagnostic"] = result.diagnostic;
  return j;
}

void flatten_csv(const Json& j, const std::string& prefix, std::ostringstream& csv) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key.ends_with("_unit")) continue;
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (it->is_object()) {
      flatten_csv(*it, name, csv);
      continue;
    }
    if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) flatten_csv((*it)[i], name + "." + std::to_string(i), csv);
      continue;
    }
    std::string value;
    if (it->is_number_float()) {
      value = format_number(it->get<double>());
    } else if (it->is_string()) {
      value = it->get<std::string>();
      if (value.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (const char c : value) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
        value = quoted + "\"";
      }
    } else {
      value = it->dump();
    }
    const auto unit = j.find(key + "_unit");
    csv << name << ',' << value << ',' << (unit != j.end() ? unit->get<std::string>() : "") << '\n';
  }
}

std::string render(const Json& document, const std::string& format) {
  if (format == "csv") {
    std::ostringstream csv;
    csv << "field,value,unit\n";
    flatten_csv(document.at("results"), "", csv);
    return csv.str();
  }
  return document.dump(2) + "\n";
}

Json document(Json meta, Json inputs, Json results) {
  Json doc;
  doc["meta"] = std::move(meta);
  doc["inputs"] = std::move(inputs);
  doc["results"] = std::move(results);
  return doc;
}

template <typename Writer>
void write_file(const std::string& path, Writer writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  writer(out);
  if (!out.flush()) throw IoError("write error on " + path);
}

// Commands ------------------------------------------------------------------

Output run_map(const MapOptions& o, const CommonOptions& common, const std::string& command) {
  const auto cycle_period = optional_cycle_period(o.cycle_ms);
  double tau_dn = 0.0;
  if (o.tau_dn_cycles) {
    tau_dn = *o.tau_dn_cycles;
  } else {
    if (!cycle_period) throw InvalidInput("--tau-dn with a time unit needs --cycle-ms");
    tau_dn = parse_duration(o.tau_dn) / *cycle_period;
  }
  int nsv = 0;
  if (o.nsv) {
    nsv = *o.nsv;
  } else {
    if (!cycle_period) throw InvalidInput("--survival needs --cycle-ms");
    nsv = survival_cycles(parse_duration(o.survival), *cycle_period);
  }
  const auto params = NetworkParams::from_per(o.per, tau_dn);
  const auto report = full_report(params, nsv, cycle_period);

  Json inputs;
  put(inputs, "per", o.per, "probability");
  put(inputs, "tau_dn_cycles", tau_dn, "cycles");
  put_count(inputs, "survival_cycles", static_cast<std::uint64_t>(nsv), "cycles");
  if (cycle_period) put(inputs, "cycle_period_seconds", *cycle_period, "s");

  Json results;
  results["network"] = network_json(params);
  results["application"] = report_json(report);
  put(results, "independent_model_app_availability", independent_app_availability(o.per, nsv), "probability");

  if (!o.fsmc_dump.empty()) {
    const auto model = build_chain(params, nsv);
    const auto steady = steady_state(model);
    write_file(o.fsmc_dump, [&](std::ostream& out) { write_chain_csv(out, model, steady); });
  }
  return {render(document(meta_json(command), inputs, results), common.format), kOk};
}

Output run_invert(const InvertOptions& o, const CommonOptions& common, const std::string& command) {
  double availability = 0.0;
  if (o.nines) {
    if (*o.nines < 1 || *o.nines > 15) throw InvalidInput("--nines must lie in [1, 15]");
    availability = 1.0 - std::pow(10.0, -*o.nines);
  } else {
    availability = *o.availability;
  }
  const auto cycle_period = optional_cycle_period(o.cycle_ms);
  std::optional<double> reliability = o.reliability_cycles;
  if (!o.reliability.empty()) {
    if (!cycle_period) throw InvalidInput("--reliability with a time unit needs --cycle-ms");
    reliability = parse_duration(o.reliability) / *cycle_period;
  }
  AppRequirements requirements{availability, reliability, o.nsv};
  requirements.validate();
  if (!reliability && !o.per && !o.tau_dn_cycles) {
    throw InvalidInput("invert needs --reliability-cycles, --per or --tau-dn-cycles besides the availability");
  }

  Json inputs;
  put(inputs, "availability", availability, "probability");
  if (reliability) put(inputs, "reliability_cycles", *reliability, "cycles");
  if (o.per) put(inputs, "per", *o.per, "probability");
  if (o.tau_dn_cycles) put(inputs, "tau_dn_cycles", *o.tau_dn_cycles, "cycles");
  put_count(inputs, "survival_cycles", static_cast<std::uint64_t>(o.nsv), "cycles");

  Json results;
  bool infeasible = false;
  auto note = [&](const char* key, const FeasibilityResult& r, const char* quantity, const char* unit) {
    infeasible = infeasible || r.kind == FeasibilityResult::Kind::infeasible;
    results[key] = feasibility_json(r, quantity, unit);
  };

  if (o.tau_dn_cycles) {
    note("availability_bound", max_per_for_availability(availability, *o.tau_dn_cycles, o.nsv), "per",
         "probability");
    if (reliability) {
      note("reliability_bound", max_per_for_reliability(*reliability, *o.tau_dn_cycles, o.nsv), "per",
           "probability");
    }
  } else if (o.per) {
    note("availability_bound", max_tau_dn_for_availability(availability, *o.per, o.nsv), "tau_dn", "cycles");
    if (reliability) {
      IntervalSearchOptions search;
      search.tau_cap = o.tau_cap;
      note("reliability_bound", tau_dn_intervals_for_reliability(*reliability, *o.per, o.nsv, search), "tau_dn",
           "cycles");
    }
  } else {
    Json joint;
    try {
      const auto solution = joint_solve(availability, *reliability, o.nsv);
      joint["kind"] = "solution";
      put(joint, "per", solution.per, "probability");
      put(joint, "tau_dn_cycles", solution.mean_down_cycles, "cycles");
      put(joint, "tau_un_cycles", solution.mean_down_cycles * (1.0 - solution.per) / solution.per, "cycles");
    } catch (const InfeasibleRequirement& e) {
      joint["kind"] = "infeasible";
      joint["diagnostic"] = e.what();
      infeasible = true;
    }
    results["joint"] = joint;
  }
  return {render(document(meta_json(command), inputs, results), common.format), infeasible ? kInfeasible : kOk};
}

Output run_simulate(const SimulateOptions& o, const CommonOptions& common, const std::string& command) {
  const auto cycle_period = optional_cycle_period(o.cycle_ms);
  MonteCarloOptions mc;
  mc.threads = o.threads;

  Json inputs;
  put(inputs, "per", o.per, "probability");
  Json analytic;
  MonteCarloResult result;
  if (o.independent) {
    inputs["channel"] = "independent";
    result = monte_carlo_validate_independent(o.per, o.nsv, o.cycles, o.reps, o.seed, mc);
    put(analytic, "app_availability", independent_app_availability(o.per, o.nsv), "probability");
    if (o.per > 0.0) {
      // Independent losses are the chain with r_u = p and r_d = 1 - p.
      const auto r = app_reliability(NetworkParams::from_rates(o.per, 1.0 - o.per), o.nsv);
      analytic["app_reliability_kind"] = to_string(r.kind());
      if (r.is_finite()) put(analytic, "app_reliability_cycles", r.cycles(), "cycles");
    } else {
      analytic["app_reliability_kind"] = to_string(Reliability::Kind::unbounded);
    }
    if (!o.trace_out.empty()) {
      const auto trace = bernoulli(o.per, o.cycles, derive_seed(o.seed, 0), cycle_period);
      write_file(o.trace_out, [&](std::ostream& out) { write_trace(out, trace); });
    }
  } else {
    if (!o.tau_dn_cycles) throw InvalidInput("simulate needs --tau-dn-cycles unless --independent is given");
    inputs["channel"] = "gilbert";
    put(inputs, "tau_dn_cycles", *o.tau_dn_cycles, "cycles");
    const auto params = NetworkParams::from_per(o.per, *o.tau_dn_cycles);
    result = monte_carlo_validate(params, o.nsv, o.cycles, o.reps, o.seed, mc);
    const auto report = full_report(params, o.nsv, cycle_period);
    put(analytic, "app_availability", report.app_availability, "probability");
    analytic["app_reliability_kind"] = to_string(report.app_reliability.kind());
    if (report.app_reliability.is_finite()) {
      put(analytic, "app_reliability_cycles", report.app_reliability.cycles(), "cycles");
    }
    if (!o.trace_out.empty()) {
      const auto trace = generate(gilbert_from_network_params(params), o.cycles, derive_seed(o.seed, 0),
                                  StartState::stationary, cycle_period);
      write_file(o.trace_out, [&](std::ostream& out) { write_trace(out, trace); });
    }
  }
  put_count(inputs, "survival_cycles", static_cast<std::uint64_t>(o.nsv), "cycles");
  put_count(inputs, "cycles_per_replication", o.cycles, "cycles");
  put_count(inputs, "replications", o.reps, "count");
  if (cycle_period) put(inputs, "cycle_period_seconds", *cycle_period, "s");

  Json empirical;
  put_count(empirical, "replications", result.replications, "count");
  put_count(empirical, "cycles_per_replication", result.cycles_per_rep, "cycles");
  put(empirical, "mean_app_availability", result.mean_availability, "probability");
  put(empirical, "stderr_app_availability", result.stderr_availability, "probability");
  put(empirical, "mean_app_unavailability", result.mean_unavailability, "probability");
  if (result.mean_reliability) {
    put(empirical, "mean_app_reliability_cycles", *result.mean_reliability, "cycles");
    put(empirical, "stderr_app_reliability_cycles", *result.stderr_reliability, "cycles");
    if (cycle_period) {
      put(empirical, "mean_app_reliability_seconds", *result.mean_reliability * *cycle_period, "s");
    }
  }
  put_count(empirical, "unbounded_replications", result.unbounded_replications, "count");
  put_count(empirical, "failure_event_count", result.failure_event_count, "count");
  put(empirical, "mean_network_availability", result.mean_network_availability, "probability");

  Json results;
  results["monte_carlo"] = empirical;
  results["analytic"] = analytic;
  return {render(document(meta_json(command, o.seed), inputs, results), common.format), kOk};
}

Output run_analyze(const AnalyzeOptions& o, const CommonOptions& common, const std::string& command) {
  const auto cycle_period = optional_cycle_period(o.cycle_ms);
  Json inputs;
  std::optional<BinaryTrace> trace;
  if (!o.packet_log.empty()) {
    if (!o.expected || !o.delay_bound_ms || !cycle_period) {
      throw InvalidInput("--packet-log needs --expected, --delay-bound-ms and --cycle-ms");
    }
    const auto records = read_packet_log_file(o.packet_log);
    trace = from_packet_log(records, *o.expected, *o.delay_bound_ms * 1e-3, *cycle_period);
    inputs["packet_log"] = o.packet_log;
    put_count(inputs, "expected_packets", *o.expected, "count");
    put(inputs, "delay_bound_seconds", *o.delay_bound_ms * 1e-3, "s");
  } else {
    trace = read_trace_file(o.trace, cycle_period);
    inputs["trace"] = o.trace;
  }
  put_count(inputs, "survival_cycles", static_cast<std::uint64_t>(o.nsv), "cycles");
  if (cycle_period) put(inputs, "cycle_period_seconds", *cycle_period, "s");
  inputs["boundary_runs"] = o.strict_runs ? "excluded" : "included";
  inputs["leading_burst"] = o.no_initial_up ? "unfiltered" : "filtered";

  TraceAnalysisOptions options;
  options.runs.include_boundary_runs = !o.strict_runs;
  options.filter.assume_up_before_start = !o.no_initial_up;
  const auto report = app_metrics_from_trace(*trace, o.nsv, options);
  const auto stats = run_stats(*trace, options.runs);

  Json network;
  put_count(network, "n_total", stats.n_total, "cycles");
  put_count(network, "n_failed", stats.n_failed, "cycles");
  put(network, "per", stats.per, "probability");
  put_count(network, "up_run_count", stats.up_runs.size(), "count");
  put_count(network, "down_run_count", stats.down_runs.size(), "count");
  if (stats.mean_up) put(network, "tau_un_cycles", *stats.mean_up, "cycles");
  if (stats.mean_down) put(network, "tau_dn_cycles", *stats.mean_down, "cycles");

  Json results;
  results["network"] = network;
  results["application"] = report_json(report);

  if (!o.cdf_out.empty()) {
    const auto cdf = downtime_cdf(*trace);
    write_file(o.cdf_out, [&](std::ostream& out) { write_cdf(out, cdf); });
  }
  return {render(document(meta_json(command), inputs, results), common.format), kOk};
}

std::vector<double> sweep_grid(const SweepOptions& o) {
  if (o.steps < 1) throw InvalidInput("sweep grid is empty (--steps must be >= 1)");
  if (!(o.from <= o.to)) throw InvalidInput("sweep needs --from <= --to");
  std::vector<double> grid;
  for (int i = 0; i < o.steps; ++i) {
    const double t = o.steps == 1 ? 0.0 : static_cast<double>(i) / (o.steps - 1);
    grid.push_back(i > 0 && i + 1 == o.steps ? o.to : o.from + t * (o.to - o.from));
  }
  return grid;
}

std::string reliability_cell(const Reliability& r) {
  return r.is_finite() ? format_number(r.cycles()) : std::string(to_string(r.kind()));
}

Output run_sweep(const SweepOptions& o, const CommonOptions& common) {
  if (common.format != "csv" && common.format != "json") throw InvalidInput("unknown format");
  if (o.var != "tau_dn" && o.var != "nsv") throw InvalidInput("--var must be tau_dn or nsv");
  if (o.metric != "availability" && o.metric != "unavailability" && o.metric != "reliability") {
    throw InvalidInput("--metric must be availability, unavailability or reliability");
  }
  const bool sweep_tau = o.var == "tau_dn";
  if (sweep_tau && !o.nsv) throw InvalidInput("sweeping tau_dn needs --nsv");
  if (sweep_tau && o.independent) throw InvalidInput("the independent model has no tau_dn to sweep");
  if (!sweep_tau && !o.tau_dn_cycles && !o.independent) throw InvalidInput("sweeping nsv needs --tau-dn-cycles");

  const auto grid = sweep_grid(o);
  MonteCarloOptions mc;
  mc.threads = o.threads;

  std::ostringstream csv;
  csv << "swept_value,analytic_value";
  if (o.monte_carlo) csv << ",mc_mean,mc_stderr";
  csv << '\n';
  for (const double x : grid) {
    int nsv = 0;
    double tau = 0.0;
    if (sweep_tau) {
      nsv = *o.nsv;
      tau = x;
    } else {
      if (x < 0.0 || x != std::floor(x)) throw InvalidInput("nsv grid point " + format_number(x) + " is not an integer");
      nsv = static_cast<int>(x);
      tau = o.tau_dn_cycles.value_or(0.0);
    }

    std::string analytic;
    MonteCarloResult result;
    if (o.independent) {
      const double a = independent_app_availability(o.per, nsv);
      if (o.metric == "reliability") {
        analytic = reliability_cell(app_reliability(NetworkParams::from_rates(o.per, 1.0 - o.per), nsv));
      } else {
        analytic = format_number(o.metric == "availability" ? a : std::pow(o.per, nsv + 1));
      }
      if (o.monte_carlo) result = monte_carlo_validate_independent(o.per, nsv, o.cycles, o.reps, o.seed, mc);
    } else {
      const auto params = NetworkParams::from_per(o.per, tau);
      if (o.metric == "reliability") {
        analytic = reliability_cell(app_reliability(params, nsv));
      } else if (o.metric == "availability") {
        analytic = format_number(app_availability(params, nsv));
      } else {
        analytic = format_number(app_unavailability(params, nsv));
      }
      if (o.monte_carlo) result = monte_carlo_validate(params, nsv, o.cycles, o.reps, o.seed, mc);
    }

    csv << format_number(x) << ',' << analytic;
    if (o.monte_carlo) {
      if (o.metric == "reliability") {
        if (result.mean_reliability) {
          csv << ',' << format_number(*result.mean_reliability) << ',' << format_number(*result.stderr_reliability);
        } else {
          csv << ",unbounded,";
        }
      } else {
        const double mean = o.metric == "availability" ? result.mean_availability : result.mean_unavailability;
        csv << ',' << format_number(mean) << ',' << format_number(result.stderr_availability);
      }
    }
    csv << '\n';
  }
  return {csv.str(), kOk};
}

std::string join(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", common.out_path, "Write the report here instead of standard output");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Map application dependability targets to network parameters and back", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOptions common;

  MapOptions map;
  auto* map_cmd = app.add_subcommand("map", "Network parameters -> application metrics");
  map_cmd->add_option("--per", map.per, "Packet error ratio")->required();
  auto* tau_time = map_cmd->add_option("--tau-dn", map.tau_dn, "Mean burst duration with unit, e.g. 4ms");
  auto* tau_cycles = map_cmd->add_option("--tau-dn-cycles", map.tau_dn_cycles, "Mean burst length in cycles");
  tau_time->excludes(tau_cycles);
  auto* map_nsv = map_cmd->add_option("--nsv", map.nsv, "Survival time in cycles");
  auto* map_sv = map_cmd->add_option("--survival", map.survival, "Survival time with unit, e.g. 6ms");
  map_nsv->excludes(map_sv);
  map_cmd->add_option("--cycle-ms", map.cycle_ms, "Cycle period in milliseconds");
  map_cmd->add_option("--fsmc-dump", map.fsmc_dump, "Write the chain's transition matrix and steady state as CSV");
  add_common(map_cmd, common);

  InvertOptions inv;
  auto* inv_cmd = app.add_subcommand("invert", "Application targets -> network parameter bounds");
  auto* inv_a = inv_cmd->add_option("--availability", inv.availability, "Availability target");
  auto* inv_nines = inv_cmd->add_option("--nines", inv.nines, "Availability target as a count of nines");
  inv_a->excludes(inv_nines);
  auto* inv_rc = inv_cmd->add_option("--reliability-cycles", inv.reliability_cycles, "Reliability target in cycles");
  auto* inv_rt = inv_cmd->add_option("--reliability", inv.reliability, "Reliability target with unit, e.g. 10s");
  inv_rc->excludes(inv_rt);
  inv_cmd->add_option("--cycle-ms", inv.cycle_ms, "Cycle period in milliseconds");
  auto* inv_per = inv_cmd->add_option("--per", inv.per, "Fix the packet error ratio");
  auto* inv_tau = inv_cmd->add_option("--tau-dn-cycles", inv.tau_dn_cycles, "Fix the mean burst length");
  inv_per->excludes(inv_tau);
  inv_cmd->add_option("--nsv", inv.nsv, "Survival time in cycles")->required();
  inv_cmd->add_option("--tau-cap", inv.tau_cap, "Upper end of the tau_dn search domain in cycles");
  add_common(inv_cmd, common);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the closed forms");
  sim_cmd->add_option("--per", sim.per, "Packet error ratio")->required();
  auto* sim_tau = sim_cmd->add_option("--tau-dn-cycles", sim.tau_dn_cycles, "Mean burst length in cycles");
  auto* sim_ind = sim_cmd->add_flag("--independent", sim.independent, "Independent losses instead of bursts");
  sim_tau->excludes(sim_ind);
  sim_cmd->add_option("--cycles", sim.cycles, "Cycles per replication")->required();
  sim_cmd->add_option("--reps", sim.reps, "Replications")->required();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->required();
  sim_cmd->add_option("--nsv", sim.nsv, "Survival time in cycles")->required();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--cycle-ms", sim.cycle_ms, "Cycle period in milliseconds");
  sim_cmd->add_option("--trace-out", sim.trace_out, "Write replication 0's trace in trace-file format");
  add_common(sim_cmd, common);

  AnalyzeOptions ana;
  auto* ana_cmd = app.add_subcommand("analyze", "Metrics from a recorded trace or packet log");
  auto* ana_trace = ana_cmd->add_option("--trace", ana.trace, "Binary trace file");
  auto* ana_log = ana_cmd->add_option("--packet-log", ana.packet_log, "Packet log CSV (seq,delay_us)");
  ana_trace->excludes(ana_log);
  ana_cmd->add_option("--expected", ana.expected, "Number of transmitted packets");
  ana_cmd->add_option("--delay-bound-ms", ana.delay_bound_ms, "Delay bound in milliseconds");
  ana_cmd->add_option("--cycle-ms", ana.cycle_ms, "Cycle period in milliseconds");
  ana_cmd->add_option("--nsv", ana.nsv, "Survival time in cycles")->required();
  ana_cmd->add_option("--cdf-out", ana.cdf_out, "Write the packet-weighted downtime CDF as CSV");
  ana_cmd->add_flag("--strict-runs", ana.strict_runs, "Exclude the first and last runs from run statistics");
  ana_cmd->add_flag("--no-initial-up", ana.no_initial_up, "Do not filter a burst that starts the trace");
  add_common(ana_cmd, common);

  SweepOptions sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Plot-ready metric curves over tau_dn or nsv");
  sw_cmd->add_option("--var", sw.var, "Swept variable: tau_dn or nsv")->required();
  sw_cmd->add_option("--from", sw.from, "First grid value")->required();
  sw_cmd->add_option("--to", sw.to, "Last grid value")->required();
  sw_cmd->add_option("--steps", sw.steps, "Number of grid points")->required();
  sw_cmd->add_option("--metric", sw.metric, "availability, unavailability or reliability");
  sw_cmd->add_option("--per", sw.per, "Packet error ratio")->required();
  sw_cmd->add_option("--tau-dn-cycles", sw.tau_dn_cycles, "Fixed mean burst length (nsv sweeps)");
  sw_cmd->add_option("--nsv", sw.nsv, "Fixed survival cycles (tau_dn sweeps)");
  sw_cmd->add_flag("--independent", sw.independent, "Use the independent-loss model");
  sw_cmd->add_flag("--monte-carlo", sw.monte_carlo, "Add simulated mean and standard error columns");
  sw_cmd->add_option("--cycles", sw.cycles, "Monte Carlo cycles per replication");
  sw_cmd->add_option("--reps", sw.reps, "Monte Carlo replications");
  sw_cmd->add_option("--seed", sw.seed, "Monte Carlo master seed (shared by all grid points)");
  sw_cmd->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");
  add_common(sw_cmd, common);

  // CLI11 consumes the argument vector from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << kToolName << ": " << e.what() << '\n';
    return kInvalidInput;
  }

  const std::string command = join(args);
  try {
    Output output;
    if (*map_cmd) {
      if (!map.tau_dn_cycles && map.tau_dn.empty()) throw InvalidInput("map needs --tau-dn or --tau-dn-cycles");
      if (!map.nsv && map.survival.empty()) throw InvalidInput("map needs --nsv or --survival");
      output = run_map(map, common, command);
    } else if (*inv_cmd) {
      if (!inv.availability && !inv.nines) throw InvalidInput("invert needs --availability or --nines");
      output = run_invert(inv, common, command);
    } else if (*sim_cmd) {
      output = run_simulate(sim, common, command);
    } else if (*ana_cmd) {
      if (ana.trace.empty() && ana.packet_log.empty()) throw InvalidInput("analyze needs --trace or --packet-log");
      output = run_analyze(ana, common, command);
    } else if (*sw_cmd) {
      output = run_sweep(sw, common);
    }

    if (common.out_path.empty()) {
      out << output.body;
      out.flush();
    } else {
      write_file(common.out_path, [&](std::ostream& file) { file << output.body; });
    }
    if (output.status == kInfeasible) err << kToolName << ": requirement is infeasible\n";
    return output.status;
  } catch (const InfeasibleRequirement& e) {
    err << kToolName << ": infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const IoError& e) {
    err << kToolName << ": I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << kToolName << ": " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace survmap::cli
