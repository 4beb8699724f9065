#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "metricbundle/error.hpp"
#include "metricbundle/verify.hpp"
#include "support.hpp"

using namespace metricbundle;
using mbtest::I;

namespace {

Scenario two_level(const CMatrix& h, MetricInit::Mode mode, double t1 = 10.0,
                   double step = 1e-3, const std::string& coeff = "1") {
  Scenario s;
  s.name = "test";
  s.hamiltonian.dim = 2;
  s.hamiltonian.terms = {{ProfileExpr::parse(coeff), h}};
  s.metric.mode = mode;
  s.psi0 = CVector::Zero(2);
  s.psi0(0) = 1.0;
  s.observables = {constant_observable("sigma_x", mbtest::sx()),
                   constant_observable("sigma_y", mbtest::sy()),
                   constant_observable("sigma_z", mbtest::sz())};
  s.t1 = t1;
  s.integrator.step = step;
  return s;
}

VerificationReport verify(const Scenario& s, VerifyOptions options = {}) {
  return run_suite(integrate(s), s, options);
}

}  // namespace

TEST(Budget, QuarticStepTermAndRoundingFloor) {
  IntegratorConfig c;
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor = kBudgetRoundingCoefficient * eps * 4.0;
  c.step = 1e-300;
  EXPECT_DOUBLE_EQ(budget(c, 10.0, 2), floor);
  c.step = 0.1;
  const double a = budget(c, 10.0, 2) - floor;
  c.step = 0.05;
  const double b = budget(c, 10.0, 2) - floor;
  EXPECT_NEAR(a / b, 16.0, 1e-9);
  c.step = 1e-3;
  EXPECT_NEAR(budget(c, 10.0, 2), kBudgetStepCoefficient * 1e-11 + floor, 1e-24);
}

TEST(SampleNodes, StrideAndBoundaries) {
  EXPECT_EQ(sample_nodes(0, 10), std::vector<std::size_t>{});
  EXPECT_EQ(sample_nodes(1, 10), std::vector<std::size_t>{0});
  EXPECT_EQ(sample_nodes(11, 10), (std::vector<std::size_t>{0, 10}));
  EXPECT_EQ(sample_nodes(12, 10), (std::vector<std::size_t>{0, 10, 11}));
  EXPECT_EQ(sample_nodes(4, 0), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(RunSuite, HermitianScenarioPassesEverything) {
  const auto r = verify(two_level(mbtest::sx(), MetricInit::Mode::Identity));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.failed(), 0u);
  for (const auto& c : r.checks) {
    if (c.name == "heisenberg_eom" || c.name == "heisenberg_like_eom") continue;
    EXPECT_LE(c.residual, 1e-8) << c.name << " " << c.observable;
  }
  EXPECT_EQ(r.dim, 2);
  EXPECT_EQ(r.nodes, 10001u);
  EXPECT_GT(r.budget, 0.0);
}

TEST(RunSuite, ZeroHamiltonianLeavesNothingToMeasure) {
  const auto r = verify(two_level(CMatrix::Zero(2, 2), MetricInit::Mode::Identity, 1.0, 1e-2));
  EXPECT_TRUE(r.ok());
  for (const auto& c : r.checks) {
    EXPECT_LE(c.residual, 1e-14) << c.name << " " << c.observable;
  }
}

TEST(RunSuite, EveryCheckFamilyIsPresent) {
  const auto r = verify(two_level(mbtest::pt_dimer(1.0, 0.5), MetricInit::Mode::Stationary, 2.0));
  for (const char* name :
       {"inverse_left_right", "inverse_right_left", "propagator_state", "metric_hermitian",
        "metric_positive", "metric_closed_form", "vielbein_metric", "hflat_residual",
        "expectation_h", "expectation_hl", "isospectral_h", "isospectral_hl",
        "heisenberg_eom", "heisenberg_like_eom", "commutator_transport", "negative_control"}) {
    const auto n = std::count_if(r.checks.begin(), r.checks.end(),
                                 [&](const CheckResult& c) { return c.name == name; });
    EXPECT_GT(n, 0) << name;
  }
  for (const auto& c : r.checks) EXPECT_EQ(c.pass, c.residual <= c.budget) << c.name;
}

TEST(RunSuite, NegativeControlFailsForNonHermitianDynamics) {
  const auto r = verify(two_level(mbtest::pt_dimer(1.0, 0.5), MetricInit::Mode::Stationary, 3.0));
  EXPECT_TRUE(r.ok());
  const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                               [](const CheckResult& c) { return c.name == "negative_control"; });
  ASSERT_NE(it, r.checks.end());
  EXPECT_EQ(it->expectation, Expectation::MustFail);
  EXPECT_FALSE(it->pass);
  EXPECT_FALSE(it->unexpected());
}

TEST(RunSuite, NegativeControlPassesForHermitianDynamics) {
  const auto r = verify(two_level(mbtest::sx(), MetricInit::Mode::Identity, 3.0));
  const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                               [](const CheckResult& c) { return c.name == "negative_control"; });
  ASSERT_NE(it, r.checks.end());
  EXPECT_EQ(it->expectation, Expectation::MustPass);
  EXPECT_TRUE(it->pass);
}

TEST(RunSuite, BrokenPhaseFailuresAreAnnotated) {
  Scenario s = two_level(mbtest::pt_dimer(1.0, 1.5), MetricInit::Mode::Identity);
  auto raw = verify(s);
  EXPECT_FALSE(raw.ok());
  EXPECT_GT(raw.worst("metric_positive"), raw.budget);

  s.expected_failures = {"metric_positive", "inverse_left_right", "inverse_right_left",
                         "expectation_h", "expectation_hl", "isospectral_h",
                         "isospectral_hl", "commutator_transport", "heisenberg_like_eom",
                         "heisenberg_eom"};
  const auto r = verify(s);
  EXPECT_TRUE(r.ok()) << r.to_table();
  EXPECT_GT(r.expected_failures(), 0u);
  EXPECT_EQ(r.expected_failures(), r.failed());
}

TEST(RunSuite, ComputationErrorsBecomeFailedChecks) {
  // A singular explicit vielbein cannot occur through integrate(), so
  // corrupt a bundle by hand.
  Scenario s = two_level(mbtest::sx(), MetricInit::Mode::Identity, 0.1, 1e-2);
  auto b = integrate(s);
  b.vielbein[5] = CMatrix::Zero(2, 2);
  const auto r = run_suite(b, s, VerifyOptions{1});
  EXPECT_FALSE(r.ok());
  bool saw_error = false;
  for (const auto& c : r.checks) {
    if (!c.error.empty()) {
      saw_error = true;
      EXPECT_FALSE(c.pass);
      EXPECT_TRUE(std::isinf(c.residual));
      ASSERT_TRUE(c.node.has_value());
      EXPECT_GE(*c.node, 4u) << c.name;  // node 5 or a differencing neighbour
      EXPECT_LE(*c.node, 6u) << c.name;
    }
  }
  EXPECT_TRUE(saw_error);
}

TEST(RunSuite, DeterministicAndThreadInvariant) {
  const Scenario s = two_level(mbtest::pt_dimer(1.0, 0.5), MetricInit::Mode::Identity, 2.0,
                               1e-3, "1 + 0.3*sin(t)");
  const auto b = integrate(s);
  VerifyOptions one;
  VerifyOptions many;
  many.threads = 4;
  const std::string a = run_suite(b, s, one).to_json().dump();
  EXPECT_EQ(run_suite(b, s, one).to_json().dump(), a);
  EXPECT_EQ(run_suite(b, s, many).to_json().dump(), a);
  EXPECT_EQ(run_suite(integrate(s), s, one).to_json().dump(), a);
}

TEST(RunSuite, ToleranceScaleMultipliesBudgets) {
  const Scenario s = two_level(mbtest::sx(), MetricInit::Mode::Identity, 1.0, 1e-2);
  const auto b = integrate(s);
  VerifyOptions o;
  const auto base = run_suite(b, s, o);
  o.tolerance_scale = 3.0;
  const auto scaled = run_suite(b, s, o);
  EXPECT_DOUBLE_EQ(scaled.budget, 3.0 * base.budget);
  ASSERT_EQ(scaled.checks.size(), base.checks.size());
  for (std::size_t i = 0; i < base.checks.size(); ++i) {
    if (base.checks[i].name.find("eom") != std::string::npos) continue;
    EXPECT_DOUBLE_EQ(scaled.checks[i].budget, 3.0 * base.checks[i].budget)
        << base.checks[i].name;
  }
}

TEST(RunSuite, MonotoneConvergenceOverHalvings) {
  const CMatrix h = mbtest::pt_dimer(1.0, 0.5);
  double prev_inv = 1e300, prev_metric = 1e300;
  for (double step : {0.1, 0.05, 0.025, 0.0125}) {
    const auto r = verify(two_level(h, MetricInit::Mode::Identity, 10.0, step));
    const double inv = r.worst("inverse_left_right");
    const double metric = r.worst("metric_closed_form");
    EXPECT_LE(inv, prev_inv) << step;
    EXPECT_LE(metric, prev_metric) << step;
    prev_inv = inv;
    prev_metric = metric;
  }
}

TEST(Report, JsonAndTable) {
  Scenario s = two_level(mbtest::sx(), MetricInit::Mode::Identity, 1.0, 1e-2);
  const auto r = verify(s);
  const auto j = r.to_json();
  EXPECT_EQ(j["scenario_digest"], r.scenario_digest);
  EXPECT_EQ(j["integrator"]["method"], "rk4");
  EXPECT_EQ(j["summary"]["unexpected"], 0);
  EXPECT_EQ(j["checks"].size(), r.checks.size());
  const std::string table = r.to_table();
  EXPECT_NE(table.find("inverse_left_right"), std::string::npos);
  EXPECT_NE(table.find("summary:"), std::string::npos);
}

TEST(Report, DigestTracksScenarioContent) {
  Scenario s = two_level(mbtest::sx(), MetricInit::Mode::Identity, 1.0, 1e-2);
  const std::string d = scenario_digest(s);
  EXPECT_EQ(d.rfind("fnv1a64:", 0), 0u);
  EXPECT_EQ(scenario_digest(s), d);
  s.t1 = 2.0;
  EXPECT_NE(scenario_digest(s), d);
}

TEST(Report, IntegrationFailure) {
  Scenario s = two_level(mbtest::pt_dimer(1.0, 5.0), MetricInit::Mode::Identity);
  try {
    integrate(s);
    FAIL();
  } catch (const Error& e) {
    const auto r = integration_failure_report(s, e);
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_EQ(r.checks[0].name, "integrate");
    EXPECT_FALSE(r.ok());
    s.expected_failures = {"integrate"};
    EXPECT_TRUE(integration_failure_report(s, e).ok());
    EXPECT_TRUE(r.to_json()["checks"][0]["residual"].is_null());
  }
}
