#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metricbundle/error.hpp"
#include "metricbundle/evolution.hpp"
#include "metricbundle/model.hpp"

namespace metricbundle {

// Whether a check is allowed to fail. Scenario-declared expected failures
// (broken PT phase) are MayFail; the conventional-transport negative
// control is MustFail for non-Hermitian dynamics.
enum class Expectation { MustPass, MayFail, MustFail };

const char* to_string(Expectation e) noexcept;

struct CheckResult {
  std::string name;
  std::string observable;          // empty when not observable-specific
  std::optional<std::size_t> node; // empty for aggregate checks
  double time = 0.0;
  double residual = 0.0;
  double budget = 0.0;
  bool pass = false;               // residual <= budget
  Expectation expectation = Expectation::MustPass;
  std::string error;               // set when the computation itself threw

  bool unexpected() const noexcept {
    return (expectation == Expectation::MustPass && !pass) ||
           (expectation == Expectation::MustFail && pass);
  }
};

struct VerifyOptions {
  // Full suite at every n-th node; first and last node always included.
  std::size_t node_stride = 10;
  double tolerance_scale = 1.0;
  unsigned threads = 1;
  Tolerance tol{};
};

// Combined integrator budget
//   c_step * step^4 * (t1 - t0)  +  c_round * eps * dim^2.
inline constexpr double kBudgetStepCoefficient = 10.0;
inline constexpr double kBudgetRoundingCoefficient = 1e4;

double budget(const IntegratorConfig& config, double duration, Index dim);

struct VerificationReport {
  std::string scenario_digest;
  std::optional<std::string> scenario_name;
  IntegratorConfig integrator;
  double t0 = 0.0;
  double t1 = 0.0;
  Index dim = 0;
  std::size_t nodes = 0;
  std::size_t node_stride = 0;
  double tolerance_scale = 1.0;
  double budget = 0.0;
  std::vector<CheckResult> checks;

  std::size_t passed() const;
  std::size_t failed() const;
  std::size_t expected_failures() const;  // failed, but allowed to
  std::size_t unexpected() const;
  bool ok() const { return unexpected() == 0; }

  // Worst residual among checks with this name (and observable, if given).
  double worst(const std::string& name, const std::string& observable = {}) const;

  nlohmann::json to_json() const;
  // One row per check name / observable, aggregated over nodes.
  std::string to_table() const;
};

// FNV-1a over the canonical scenario document.
std::string scenario_digest(const Scenario& scenario);

std::vector<std::size_t> sample_nodes(std::size_t count, std::size_t stride);

VerificationReport run_suite(const EvolutionBundle& bundle,
                             const Scenario& scenario,
                             const VerifyOptions& options = {});

// Report for a run whose integration aborted (NonFinite, ...): a single
// failed "integrate" check, expected when the scenario lists it.
VerificationReport integration_failure_report(const Scenario& scenario,
                                              const Error& error,
                                              const VerifyOptions& options = {});

}  // namespace metricbundle
