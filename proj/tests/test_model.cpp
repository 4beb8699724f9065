#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "metricbundle/error.hpp"
#include "metricbundle/model.hpp"
#include "support.hpp"

using namespace metricbundle;
using mbtest::I;

namespace {

Scenario minimal() {
  Scenario s;
  s.hamiltonian.dim = 2;
  s.hamiltonian.terms = {{ProfileExpr::parse("1"), mbtest::sx()}};
  s.psi0 = CVector::Zero(2);
  s.psi0(0) = 1.0;
  s.observables = {constant_observable("sz", mbtest::sz())};
  s.t0 = 0.0;
  s.t1 = 1.0;
  return s;
}

std::string schema_pointer(const Scenario& s) {
  try {
    validate(s);
  } catch (const SchemaError& e) {
    return e.pointer();
  }
  return "<valid>";
}

// Real 8x4 system for G = a0 I + a1 sx + a2 sy + a3 sz with
// G H - H^dagger G = 0, and its kernel as Hermitian matrices.
std::vector<CMatrix> pauli_kernel(const CMatrix& h) {
  const CMatrix basis[4] = {CMatrix::Identity(2, 2), mbtest::sx(), mbtest::sy(),
                            mbtest::sz()};
  Eigen::MatrixXd a(8, 4);
  for (int k = 0; k < 4; ++k) {
    const CMatrix r = basis[k] * h - h.adjoint() * basis[k];
    for (int i = 0; i < 4; ++i) {
      a(i, k) = r(i / 2, i % 2).real();
      a(4 + i, k) = r(i / 2, i % 2).imag();
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  const Eigen::MatrixXd ker = lu.kernel();
  std::vector<CMatrix> out;
  if (lu.rank() == 4) return out;
  for (Index c = 0; c < ker.cols(); ++c) {
    CMatrix g = CMatrix::Zero(2, 2);
    for (int k = 0; k < 4; ++k) g += ker(k, c) * basis[k];
    out.push_back(g);
  }
  return out;
}

// Orthogonal projection of the identity onto span(kernel), trace-normalised.
CMatrix closest_to_identity(std::vector<CMatrix> kernel) {
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      kernel[i] -= (kernel[j].adjoint() * kernel[i]).trace().real() * kernel[j];
    }
    kernel[i] /= kernel[i].norm();
  }
  CMatrix p = CMatrix::Zero(2, 2);
  for (const auto& b : kernel) p += b.trace().real() * b;
  return p * (2.0 / p.trace().real());
}

}  // namespace

TEST(Assemble, Examples) {
  const std::vector<Term> single = {{ProfileExpr::parse("1"), mbtest::sx()}};
  for (double t : {0.0, 1.0, 7.5}) EXPECT_EQ(assemble(single, t), mbtest::sx());

  const std::vector<Term> pair = {{ProfileExpr::parse("1"), mbtest::sx()},
                                  {ProfileExpr::parse("0.5"), I * mbtest::sz()}};
  EXPECT_EQ(assemble(pair, 0.0), mbtest::sx() + 0.5 * I * mbtest::sz());

  const std::vector<Term> cosine = {{ProfileExpr::parse("cos(t)"), mbtest::sx()}};
  EXPECT_LE((assemble(cosine, std::numbers::pi) + mbtest::sx()).norm(), 1e-15);
}

TEST(Assemble, Errors) {
  EXPECT_THROW(assemble(std::vector<Term>{}, 0.0), Error);
  const std::vector<Term> ragged = {{ProfileExpr::parse("1"), mbtest::sx()},
                                    {ProfileExpr::parse("1"), CMatrix::Identity(3, 3)}};
  try {
    assemble(ragged, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  const std::vector<Term> bad = {{ProfileExpr::parse("1/t"), mbtest::sx()}};
  try {
    assemble(bad, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Eval);
  }
}

TEST(Assemble, DerivativeMatchesCentralDifference) {
  const std::vector<Term> terms = {{ProfileExpr::parse("sin(2*t)"), mbtest::sx()},
                                   {ProfileExpr::parse("t^2"), I * mbtest::sz()},
                                   {ProfileExpr::parse("3"), mbtest::sy()}};
  const double h = 1e-4;
  for (double t : {0.1, 1.3, 4.0}) {
    const CMatrix fd = (assemble(terms, t + h) - assemble(terms, t - h)) / (2 * h);
    EXPECT_LE((assemble_derivative(terms, t) - fd).norm(), 1e-7);
  }
}

TEST(Observable, TimeDependence) {
  EXPECT_FALSE(constant_observable("x", mbtest::sx()).time_dependent());
  Observable rot;
  rot.name = "rot";
  rot.plain_matrix = false;
  rot.terms = {{ProfileExpr::parse("cos(t)"), mbtest::sx()},
               {ProfileExpr::parse("sin(t)"), mbtest::sy()}};
  EXPECT_TRUE(rot.time_dependent());
  EXPECT_LE((rot.derivative_at(0.0) - mbtest::sy()).norm(), 1e-15);
}

TEST(Validate, AcceptsMinimal) { EXPECT_EQ(schema_pointer(minimal()), "<valid>"); }

TEST(Validate, NamesTheOffendingField) {
  {
    Scenario s = minimal();
    s.psi0 = CVector::Zero(3);
    EXPECT_EQ(schema_pointer(s), "/psi0");
  }
  {
    Scenario s = minimal();
    s.hamiltonian.terms.push_back({ProfileExpr::parse("1"), CMatrix::Identity(3, 3)});
    EXPECT_EQ(schema_pointer(s), "/hamiltonian/1/matrix");
  }
  {
    Scenario s = minimal();
    s.observables[0].terms[0].matrix = CMatrix::Identity(3, 3);
    EXPECT_EQ(schema_pointer(s), "/observables/sz");
  }
  {
    Scenario s = minimal();
    s.t1 = s.t0;
    EXPECT_EQ(schema_pointer(s), "/t1");
  }
  {
    Scenario s = minimal();
    s.integrator.step = 2.0;
    EXPECT_EQ(schema_pointer(s), "/integrator/step");
  }
  {
    Scenario s = minimal();
    s.integrator.step = 1e-6;
    s.integrator.max_steps = 1000;
    EXPECT_EQ(schema_pointer(s), "/integrator/step");
  }
  {
    Scenario s = minimal();
    s.metric.mode = MetricInit::Mode::Explicit;
    EXPECT_EQ(schema_pointer(s), "/metric/matrix");
    s.metric.matrix = mbtest::sz();  // Hermitian, indefinite
    EXPECT_EQ(schema_pointer(s), "/metric/matrix");
    s.metric.matrix = mbtest::pt_dimer(1.0, 0.5);  // not Hermitian
    EXPECT_EQ(schema_pointer(s), "/metric/matrix");
    s.metric.matrix = 2.0 * CMatrix::Identity(2, 2);
    EXPECT_EQ(schema_pointer(s), "<valid>");
  }
  {
    Scenario s = minimal();
    s.hamiltonian.dim = 0;
    EXPECT_EQ(schema_pointer(s), "/dim");
  }
}

TEST(InitialMetric, Modes) {
  Scenario s = minimal();
  EXPECT_EQ(initial_metric(s), CMatrix::Identity(2, 2));
  s.metric.mode = MetricInit::Mode::Explicit;
  s.metric.matrix = 3.0 * CMatrix::Identity(2, 2);
  EXPECT_EQ(initial_metric(s), 3.0 * CMatrix::Identity(2, 2));
  s.metric.mode = MetricInit::Mode::Stationary;
  s.metric.matrix.reset();
  EXPECT_LE((initial_metric(s) - CMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(StationaryMetric, HermitianGivesIdentity) {
  const auto m = solve_stationary_metric(mbtest::sx());
  EXPECT_LE((m.metric - CMatrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE(m.residual, 1e-12);
  EXPECT_TRUE(m.non_unique);
}

TEST(StationaryMetric, UnbrokenDimerMatchesNullspaceOracle) {
  const CMatrix h = mbtest::pt_dimer(1.0, 0.5);
  const auto kernel = pauli_kernel(h);
  ASSERT_EQ(kernel.size(), 2u);
  const CMatrix oracle = closest_to_identity(kernel);
  // Hand value: I + 0.5 sy = [[1, -0.5i], [0.5i, 1]].
  CMatrix hand(2, 2);
  hand << 1.0, Complex(0, -0.5), Complex(0, 0.5), 1.0;
  EXPECT_LE((oracle - hand).norm(), 1e-12);

  const auto m = solve_stationary_metric(h);
  EXPECT_LE((m.metric - oracle).norm(), 1e-10);
  EXPECT_LE(m.residual, 1e-10);
  EXPECT_LE((m.metric * h - h.adjoint() * m.metric).norm(), 1e-10);
  EXPECT_GT(min_eig_hermitian(m.metric), 0.0);
  EXPECT_NEAR(m.metric.trace().real(), 2.0, 1e-12);
  EXPECT_EQ(m.nullspace_dim, 2u);
}

TEST(StationaryMetric, BrokenPhaseHasNoPositiveSolution) {
  const CMatrix h = mbtest::pt_dimer(1.0, 1.5);
  // Oracle: every kernel element is indefinite.
  const auto kernel = pauli_kernel(h);
  ASSERT_EQ(kernel.size(), 2u);
  for (int k = 0; k < 64; ++k) {
    const double a = std::cos(k * std::numbers::pi / 32), b = std::sin(k * std::numbers::pi / 32);
    const CMatrix g = a * kernel[0] + b * kernel[1];
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()));
    EXPECT_LT(es.eigenvalues().minCoeff() * es.eigenvalues().maxCoeff(), 0.0);
  }
  try {
    solve_stationary_metric(h);
    FAIL();
  } catch (const StationaryMetricError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPositiveDefiniteSolution);
    EXPECT_FALSE(e.degenerate());
  }
}

TEST(StationaryMetric, ExceptionalPointIsDegenerate) {
  try {
    solve_stationary_metric(mbtest::pt_dimer(1.0, 1.0));
    FAIL();
  } catch (const StationaryMetricError& e) {
    EXPECT_TRUE(e.degenerate());
  }
}

TEST(StationaryMetric, RandomQuasiHermitianProperty) {
  // H = S D S^{-1} with real spectrum admits G = (S S^dagger)^{-1}.
  std::mt19937_64 rng(31);
  for (int k = 0; k < 40; ++k) {
    const Index n = 2 + k % 4;
    const CMatrix s = mbtest::random_spd(rng, n, 1.0) + mbtest::random_matrix(rng, n, 0.3);
    CMatrix d = CMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) d(i, i) = double(i) - 0.5 * double(n) + 0.37;
    const CMatrix h = s * d * s.inverse();
    const auto m = solve_stationary_metric(h);
    EXPECT_LE(m.residual, 1e-9 * (1 + h.norm()));
    EXPECT_GT(min_eig_hermitian(m.metric), 0.0);
    EXPECT_NEAR(m.metric.trace().real(), double(n), 1e-9);
    EXPECT_EQ(m.nullspace_dim, std::size_t(n));
  }
}

TEST(IntegratorConfig, Defaults) {
  IntegratorConfig c;
  EXPECT_EQ(c.step, 1e-3);
  EXPECT_EQ(c.step_limit(), 10'000'000u);
  EXPECT_FALSE(c.projects_metric());
  EXPECT_STREQ(to_string(IntegratorConfig::Method::Rk4), "rk4");
  EXPECT_STREQ(to_string(IntegratorConfig::Method::Rk4Richardson), "rk4-richardson");
}
