#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "metricbundle/error.hpp"
#include "metricbundle/representations.hpp"
#include "metricbundle/scenario_json.hpp"
#include "metricbundle/trajectory_io.hpp"
#include "metricbundle/verify.hpp"

namespace metricbundle::cli {

namespace {

using nlohmann::json;

enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("METRICBUNDLE_LOG");
  if (!env) return LogLevel::Info;
  const std::string v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err), level_(log_level()) {}

  void info(const std::string& msg) const {
    if (level_ != LogLevel::Quiet) err_ << "info: " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ == LogLevel::Debug) err_ << "debug: " << msg << '\n';
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

// Usage problems that are not CLI11 parse errors (unwritable output, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(std::ostream& err, int code, const std::string& msg) {
  err << "error[" << code << "]: " << msg << '\n';
  return code;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON in '") + path + "': " + e.what());
  }
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write '" + path + "'");
  write(file);
  if (!file) throw UsageError("failed writing '" + path + "'");
}

struct RunOverrides {
  std::optional<double> step;
  std::optional<double> t0;
  std::optional<double> t1;

  bool any() const { return step || t0 || t1; }

  void apply(Scenario& s) const {
    if (step) s.integrator.step = *step;
    if (t0) s.t0 = *t0;
    if (t1) s.t1 = *t1;
    if (any()) validate(s);
  }
};

void add_run_overrides(CLI::App* cmd, RunOverrides& o) {
  cmd->add_option("--step", o.step, "Integrator step (time units)");
  cmd->add_option("--t0", o.t0, "Start time");
  cmd->add_option("--t1", o.t1, "End time");
}

Input prepare(const std::string& source, const RunOverrides& overrides) {
  Input input = load_input(source);
  if (input.bundle) {
    if (overrides.any()) {
      throw UsageError("--step/--t0/--t1 cannot be applied to an exported trajectory");
    }
    return input;
  }
  overrides.apply(input.scenario);
  return input;
}

EvolutionBundle evolve_or_reuse(Input& input, const Logger& log) {
  if (input.bundle) {
    log.info("using stored trajectory with " + std::to_string(input.bundle->size()) +
             " nodes");
    return std::move(*input.bundle);
  }
  log.info("integrating '" + input.scenario.name.value_or("scenario") + "' over [" +
           std::to_string(input.scenario.t0) + ", " + std::to_string(input.scenario.t1) +
           "] with step " + std::to_string(input.scenario.integrator.step));
  EvolutionBundle bundle = integrate(input.scenario);
  log.debug("integration finished: " + std::to_string(bundle.size()) + " nodes, " +
            std::to_string(bundle.substeps) + " substeps");
  return bundle;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Input load_input(const std::string& source) {
  Input input;
  const std::string prefix = "demo:";
  if (source.rfind(prefix, 0) == 0) {
    input.scenario = builtin_model(source.substr(prefix.size()));
  } else {
    const json doc = read_json_file(source);
    if (is_trajectory_document(doc)) {
      Trajectory tr = trajectory_from_json(doc);
      input.scenario = std::move(tr.scenario);
      input.bundle = std::move(tr.bundle);
      return input;
    }
    input.scenario = scenario_from_json(doc);
  }
  if (input.scenario.metric.mode == MetricInit::Mode::Stationary) {
    try {
      (void)initial_metric(input.scenario);
    } catch (const StationaryMetricError& e) {
      const std::string hint =
          e.degenerate()
              ? "system at an exceptional point; supply explicit metric or use identity"
              : "system in broken phase; supply explicit metric or use identity";
      throw StationaryMetricError(e.degenerate(), std::string(e.what()) + " (hint: " +
                                                      hint + ")");
    }
  }
  return input;
}

Scenario load_scenario(const std::string& source) {
  return load_input(source).scenario;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-Hermitian quantum dynamics with metric, propagators and vielbein"};
  app.require_subcommand(1);
  const Logger log(err);

  // evolve
  std::string evolve_source;
  std::string evolve_output;
  std::string evolve_format;
  std::string evolve_quantities;
  RunOverrides evolve_overrides;
  auto* evolve = app.add_subcommand("evolve", "Integrate a scenario and export the trajectory");
  evolve->add_option("scenario", evolve_source, "Scenario file or demo:<name>")->required();
  evolve->add_option("-o,--output", evolve_output, "Output path (default stdout)");
  evolve->add_option("--format", evolve_format, "csv or json (default from extension, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  evolve->add_option("--quantities", evolve_quantities,
                     "Comma-separated CSV columns: observable names, norm, psi, G, U_R, U_L, E");
  add_run_overrides(evolve, evolve_overrides);

  // verify
  std::string verify_source;
  std::string verify_output;
  std::size_t node_stride = 10;
  double tolerance_scale = 1.0;
  unsigned threads = 1;
  RunOverrides verify_overrides;
  auto* verify = app.add_subcommand("verify", "Run the identity suite and report residuals");
  verify->add_option("scenario", verify_source, "Scenario, trajectory file or demo:<name>")
      ->required();
  verify->add_option("-o,--output", verify_output, "JSON report path");
  verify->add_option("--node-stride", node_stride, "Check every n-th node")
      ->check(CLI::PositiveNumber);
  verify->add_option("--tolerance-scale", tolerance_scale, "Multiply every budget")
      ->check(CLI::PositiveNumber);
  verify->add_option("--threads", threads, "Worker threads for node checks")
      ->check(CLI::PositiveNumber);
  add_run_overrides(verify, verify_overrides);

  // spectrum
  std::string spectrum_source;
  std::string spectrum_observable;
  std::string spectrum_times;
  std::string spectrum_output;
  RunOverrides spectrum_overrides;
  auto* spectrum = app.add_subcommand(
      "spectrum", "Eigenvalues of an observable in the S, H and HL pictures");
  spectrum->add_option("scenario", spectrum_source, "Scenario, trajectory file or demo:<name>")
      ->required();
  spectrum->add_option("--observable", spectrum_observable, "Observable name")->required();
  spectrum->add_option("--times", spectrum_times, "Comma-separated times (nearest node)")
      ->required();
  spectrum->add_option("-o,--output", spectrum_output, "Output path (default stdout)");
  add_run_overrides(spectrum, spectrum_overrides);

  // demo
  std::string demo_name;
  std::vector<std::string> demo_sets;
  std::string demo_output;
  bool demo_list = false;
  auto* demo = app.add_subcommand("demo", "Write a built-in model as a scenario document");
  demo->add_option("model", demo_name, "Model name");
  demo->add_option("--set", demo_sets, "Parameter override key=value (s, gamma, t0, t1, step)");
  demo->add_option("-o,--output", demo_output, "Output path (default stdout)");
  demo->add_flag("--list", demo_list, "List built-in models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kUsage, e.what());
  }

  try {
    if (*evolve) {
      Input input = prepare(evolve_source, evolve_overrides);
      const EvolutionBundle bundle = evolve_or_reuse(input, log);
      std::string format = evolve_format;
      if (format.empty()) {
        const auto n = evolve_output.size();
        format = (n >= 5 && evolve_output.compare(n - 5, 5, ".json") == 0) ? "json" : "csv";
      }
      const auto quantities = split_list(evolve_quantities);
      if (format == "json" && !quantities.empty()) {
        throw UsageError("--quantities applies to csv output only");
      }
      emit(evolve_output, out, [&](std::ostream& os) {
        if (format == "json") {
          os << trajectory_to_json(input.scenario, bundle).dump() << '\n';
        } else {
          write_csv(os, input.scenario, bundle, quantities);
        }
      });
      return kOk;
    }

    if (*verify) {
      Input input = prepare(verify_source, verify_overrides);
      VerifyOptions options;
      options.node_stride = node_stride;
      options.tolerance_scale = tolerance_scale;
      options.threads = threads;
      VerificationReport report;
      try {
        const EvolutionBundle bundle = evolve_or_reuse(input, log);
        report = run_suite(bundle, input.scenario, options);
      } catch (const Error& e) {
        if (!is_numerical(e.code())) throw;
        report = integration_failure_report(input.scenario, e, options);
        if (!report.ok()) throw;
        log.info(std::string("integration aborted as the scenario allows: ") + e.what());
      }
      if (!verify_output.empty()) {
        emit(verify_output, out,
             [&](std::ostream& os) { os << report.to_json().dump(2) << '\n'; });
      }
      out << report.to_table();
      if (!report.ok()) {
        return fail(err, kVerificationFailed,
                    std::to_string(report.unexpected()) + " unexpected check outcome(s)");
      }
      return kOk;
    }

    if (*spectrum) {
      Input input = prepare(spectrum_source, spectrum_overrides);
      const Observable* obs = input.scenario.find_observable(spectrum_observable);
      if (!obs) {
        throw SchemaError("/observables/" + spectrum_observable, "no such observable");
      }
      std::vector<double> times;
      for (const auto& item : split_list(spectrum_times)) {
        try {
          std::size_t used = 0;
          times.push_back(std::stod(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
          throw UsageError("--times: '" + item + "' is not a number");
        }
      }
      const EvolutionBundle bundle = evolve_or_reuse(input, log);
      emit(spectrum_output, out, [&](std::ostream& os) {
        os << "t,picture,index,re,im\n";
        for (double t : times) {
          const std::size_t k = bundle.nearest(t);
          const double tk = bundle.grid[k];
          const TaggedOperator o_s = schrodinger_operator(*obs, tk);
          const std::pair<const char*, CMatrix> pictures[] = {
              {"S", o_s.matrix},
              {"H", to_heisenberg(o_s, bundle, k).matrix},
              {"HL", to_heisenberg_like(o_s, bundle, k).matrix}};
          for (const auto& [label, m] : pictures) {
            const auto eigs = sorted_spectrum(eigenvalues(m), 1e-9);
            for (std::size_t i = 0; i < eigs.size(); ++i) {
              char line[160];
              std::snprintf(line, sizeof(line), "%.17g,%s,%zu,%.17g,%.17g\n", tk, label, i,
                            eigs[i].real(), eigs[i].imag());
              os << line;
            }
          }
        }
      });
      return kOk;
    }

    if (*demo) {
      if (demo_list) {
        for (const auto& name : builtin_model_names()) out << name << '\n';
        return kOk;
      }
      if (demo_name.empty()) throw UsageError("demo: model name required (or --list)");
      std::map<std::string, double> overrides;
      for (const auto& kv : demo_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        try {
          overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::logic_error&) {
          throw UsageError("--set: '" + kv + "' has a non-numeric value");
        }
      }
      const Scenario s = builtin_model(demo_name, overrides);
      emit(demo_output, out,
           [&](std::ostream& os) { os << scenario_to_json(s).dump(2) << '\n'; });
      return kOk;
    }
  } catch (const UsageError& e) {
    return fail(err, kUsage, e.what());
  } catch (const Error& e) {
    const int code = is_numerical(e.code()) || e.code() == ErrorCode::TagViolation ||
                             e.code() == ErrorCode::DimensionMismatch ||
                             e.code() == ErrorCode::NotHermitian
                         ? kNumericalFailure
                         : kScenarioInvalid;
    return fail(err, code, std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    return fail(err, kNumericalFailure, e.what());
  }
  return fail(err, kUsage, "no command given");
}

}  // namespace metricbundle::cli
