#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "metricbundle/evolution.hpp"
#include "metricbundle/model.hpp"

namespace metricbundle::cli {

// Process exit codes. Every failure path maps onto exactly one of these.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kScenarioInvalid = 2,
  kNumericalFailure = 3,
  kVerificationFailed = 4,
};

// Built-in two-level models. Defaults: s = 1, t0 = 0, t1 = 10, step = 1e-3.
//
//   hermitian-rabi             H = s sx, identity metric
//   pt-dimer-unbroken          H = s sx + i g sz, g = 0.5 s, stationary metric
//   pt-dimer-broken            g = 1.5 s, identity metric
//   pt-ep                      g = s (exceptional point), identity metric
//   driven-dimer               g(t) = 0.5 sin(t), identity metric at t0
//   time-dependent-observable  unbroken dimer plus O(t) = cos(t) sx + sin(t) sy
//
// Overrides: "s", "gamma", "t0", "t1", "step".
std::vector<std::string> builtin_model_names();
Scenario builtin_model(const std::string& name,
                       const std::map<std::string, double>& overrides = {});
std::vector<Scenario> builtin_models();

// A scenario, or a previously exported trajectory with its scenario.
struct Input {
  Scenario scenario;
  std::optional<EvolutionBundle> bundle;
};

// `source` is either "demo:<name>" or a path to a scenario or trajectory
// JSON document. Stationary metrics are solved here so that a broken phase
// is reported before any integration starts.
Input load_input(const std::string& source);
Scenario load_scenario(const std::string& source);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metricbundle::cli
