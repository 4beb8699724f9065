#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "metricbundle/matops.hpp"
#include "metricbundle/profile.hpp"

namespace metricbundle {

// coefficient(t) * matrix
struct Term {
  ProfileExpr coefficient;
  CMatrix matrix;
};

// sum_k c_k(t) M_k. Nothing requires the result to be Hermitian.
struct HamiltonianSpec {
  Index dim = 0;
  std::vector<Term> terms;
};

// Sum of weighted terms at time t. Throws ExprError(Eval) and
// Error(DimensionMismatch) for an empty or ragged term list.
CMatrix assemble(const std::vector<Term>& terms, double t);
CMatrix assemble(const HamiltonianSpec& spec, double t);
// Analytic time derivative of the same sum.
CMatrix assemble_derivative(const std::vector<Term>& terms, double t);

// An operator O_S(t). `plain_matrix` records that the scenario document
// gave a bare constant matrix rather than a term list, so it can be
// written back in the same form.
struct Observable {
  std::string name;
  std::vector<Term> terms;
  bool plain_matrix = true;

  CMatrix at(double t) const { return assemble(terms, t); }
  CMatrix derivative_at(double t) const { return assemble_derivative(terms, t); }
  bool time_dependent() const;
};

Observable constant_observable(std::string name, CMatrix matrix);

struct MetricInit {
  enum class Mode { Identity, Explicit, Stationary };
  Mode mode = Mode::Identity;
  std::optional<CMatrix> matrix;  // Explicit only
};

struct IntegratorConfig {
  enum class Method { Rk4, Rk4Richardson };
  Method method = Method::Rk4;
  double step = 1e-3;
  // Optional knobs; absent fields are not written back to documents.
  std::optional<std::size_t> max_steps;
  std::optional<double> error_tolerance;  // Richardson local error target
  std::optional<bool> project_metric;     // G <- (G + G^dagger)/2 per step

  std::size_t step_limit() const { return max_steps.value_or(10'000'000); }
  double local_error_target() const { return error_tolerance.value_or(1e-12); }
  bool projects_metric() const { return project_metric.value_or(false); }
};

const char* to_string(IntegratorConfig::Method method) noexcept;

struct Scenario {
  std::optional<std::string> name;
  HamiltonianSpec hamiltonian;
  MetricInit metric;
  CVector psi0;
  std::vector<Observable> observables;
  double t0 = 0.0;
  double t1 = 1.0;
  IntegratorConfig integrator;
  // Check names that the physics permits to fail (broken PT phase, ...).
  std::vector<std::string> expected_failures;

  Index dim() const noexcept { return hamiltonian.dim; }
  const Observable* find_observable(const std::string& name) const;
};

// Structural validation; throws SchemaError naming the offending field.
void validate(const Scenario& scenario, const Tolerance& tol = {});

// Resolves G(t0) from the metric init mode. Stationary solves against
// H(t0) and may throw StationaryMetricError.
CMatrix initial_metric(const Scenario& scenario, const Tolerance& tol = {});

struct StationaryMetric {
  CMatrix metric;
  double residual = 0.0;        // ||G H - H^dagger G||_F
  std::size_t nullspace_dim = 0;
  bool non_unique = false;      // nullspace_dim > 1
};

// Hermitian positive-definite G with G H = H^dagger G, normalised to
// trace(G) = dim. When several independent solutions exist, the one closest
// to the identity in Frobenius norm is returned.
StationaryMetric solve_stationary_metric(const CMatrix& h,
                                         const Tolerance& tol = {});

}  // namespace metricbundle
