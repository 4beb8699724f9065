#include "metricbundle/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metricbundle/error.hpp"

namespace metricbundle {

namespace {

// The five co-evolved channels.
struct Flow {
  CVector psi;
  CMatrix g;
  CMatrix ur;
  CMatrix ul;
  CMatrix e;
};

Flow derivative(const CMatrix& h, const Flow& y) {
  return {rhs_state(h, y.psi), rhs_metric(h, y.g), rhs_right_prop(h, y.ur),
          rhs_left_prop(h, y.ul), rhs_vielbein(h, y.e)};
}

// y + a * k
Flow shifted(const Flow& y, double a, const Flow& k) {
  return {y.psi + a * k.psi, y.g + a * k.g, y.ur + a * k.ur, y.ul + a * k.ul,
          y.e + a * k.e};
}

// One classical RK4 step. All channels see the same H samples: one
// assemble() per distinct stage time.
Flow rk4_step(const HamiltonianSpec& spec, double t, double h, const Flow& y) {
  const CMatrix h0 = assemble(spec, t);
  const CMatrix hm = assemble(spec, t + 0.5 * h);
  const CMatrix h1 = assemble(spec, t + h);
  const Flow k1 = derivative(h0, y);
  const Flow k2 = derivative(hm, shifted(y, 0.5 * h, k1));
  const Flow k3 = derivative(hm, shifted(y, 0.5 * h, k2));
  const Flow k4 = derivative(h1, shifted(y, h, k3));
  const double w = h / 6.0;
  return {y.psi + w * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi),
          y.g + w * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g),
          y.ur + w * (k1.ur + 2.0 * k2.ur + 2.0 * k3.ur + k4.ur),
          y.ul + w * (k1.ul + 2.0 * k2.ul + 2.0 * k3.ul + k4.ul),
          y.e + w * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e)};
}

template <typename M>
double relative_gap(const M& a, const M& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

double flow_gap(const Flow& a, const Flow& b) {
  return std::max({relative_gap(a.psi, b.psi), relative_gap(a.g, b.g),
                   relative_gap(a.ur, b.ur), relative_gap(a.ul, b.ul),
                   relative_gap(a.e, b.e)});
}

class Stepper {
 public:
  Stepper(const Scenario& s) : spec_(s.hamiltonian), cfg_(s.integrator) {}

  // Advances one grid interval. Returns the local error estimate (0 for
  // the fixed-step method).
  double advance(Flow& y, double t, double h) {
    if (cfg_.method == IntegratorConfig::Method::Rk4) {
      count(1);
      y = rk4_step(spec_, t, h, y);
      return 0.0;
    }
    double err = 0.0;
    y = halving(y, t, h, 0, err);
    return err;
  }

  std::size_t substeps() const noexcept { return substeps_; }

 private:
  void count(std::size_t n) {
    substeps_ += n;
    if (substeps_ > cfg_.step_limit()) {
      throw Error(ErrorCode::StepLimitExceeded,
                  "integration needs more than " +
                      std::to_string(cfg_.step_limit()) + " steps");
    }
  }

  // Step-doubling control: compare one step of size h with two of h/2.
  // The RK4 error ratio between them is 16, so (half - full)/15 estimates
  // the error of the half-step result, which is the one kept.
  Flow halving(const Flow& y, double t, double h, int depth, double& err) {
    count(3);
    const Flow full = rk4_step(spec_, t, h, y);
    const Flow mid = rk4_step(spec_, t, 0.5 * h, y);
    const Flow half = rk4_step(spec_, t + 0.5 * h, 0.5 * h, mid);
    const double estimate = flow_gap(half, full) / 15.0;
    if (estimate <= cfg_.local_error_target() || depth >= kMaxDepth) {
      err = std::max(err, estimate);
      return half;
    }
    const Flow left = halving(y, t, 0.5 * h, depth + 1, err);
    return halving(left, t + 0.5 * h, 0.5 * h, depth + 1, err);
  }

  static constexpr int kMaxDepth = 20;

  const HamiltonianSpec& spec_;
  const IntegratorConfig& cfg_;
  std::size_t substeps_ = 0;
};

template <typename M>
bool blown_up(const M& m) {
  return !m.allFinite() || m.cwiseAbs().maxCoeff() > kBlowUpMagnitude;
}

void check_finite(const Flow& y, std::size_t node, double t) {
  if (blown_up(y.psi)) throw NonFiniteError(node, "psi", t);
  if (blown_up(y.g)) throw NonFiniteError(node, "G", t);
  if (blown_up(y.ur)) throw NonFiniteError(node, "U_R", t);
  if (blown_up(y.ul)) throw NonFiniteError(node, "U_L", t);
  if (blown_up(y.e)) throw NonFiniteError(node, "E", t);
}

}  // namespace

CVector rhs_state(const CMatrix& h, const CVector& psi) {
  return -kI * (h * psi);
}

CMatrix rhs_metric(const CMatrix& h, const CMatrix& g) {
  return kI * (g * h - h.adjoint() * g);
}

CMatrix rhs_right_prop(const CMatrix& h, const CMatrix& u) {
  return -kI * (h * u);
}

CMatrix rhs_left_prop(const CMatrix& h, const CMatrix& u) {
  return kI * (u * h);
}

CMatrix rhs_vielbein(const CMatrix& h, const CMatrix& e) {
  return kI * (e * h);
}

std::size_t EvolutionBundle::nearest(double t) const {
  if (grid.empty()) return 0;
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.end()) return grid.size() - 1;
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  if (hi == 0) return 0;
  return (t - grid[hi - 1] <= grid[hi] - t) ? hi - 1 : hi;
}

EvolutionBundle integrate(const Scenario& scenario, const Tolerance& tol) {
  validate(scenario, tol);
  return integrate(scenario, initial_metric(scenario, tol), tol);
}

EvolutionBundle integrate(const Scenario& scenario, const CMatrix& g0,
                          const Tolerance& tol) {
  validate(scenario, tol);
  const Index dim = scenario.dim();
  if (g0.rows() != dim || g0.cols() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "integrate: G(t0) has wrong dimension");
  }
  const double span = scenario.t1 - scenario.t0;
  const auto steps = static_cast<std::size_t>(
      std::max(1.0, std::ceil(span / scenario.integrator.step - 1e-9)));
  if (steps > scenario.integrator.step_limit()) {
    throw Error(ErrorCode::StepLimitExceeded,
                "integration needs " + std::to_string(steps) + " steps");
  }
  const double h = span / static_cast<double>(steps);

  Flow y{scenario.psi0, g0, identity(dim), identity(dim), cholesky_upper(g0, tol)};

  EvolutionBundle bundle;
  const std::size_t nodes = steps + 1;
  bundle.grid.reserve(nodes);
  bundle.right.reserve(nodes);
  bundle.left.reserve(nodes);
  bundle.metric.reserve(nodes);
  bundle.vielbein.reserve(nodes);
  bundle.psi.reserve(nodes);
  auto record = [&](double t) {
    bundle.grid.push_back(t);
    bundle.psi.push_back(y.psi);
    bundle.metric.push_back(y.g);
    bundle.right.push_back(y.ur);
    bundle.left.push_back(y.ul);
    bundle.vielbein.push_back(y.e);
  };
  record(scenario.t0);

  const bool richardson =
      scenario.integrator.method == IntegratorConfig::Method::Rk4Richardson;
  if (richardson) bundle.local_error.reserve(steps);
  const bool project = scenario.integrator.projects_metric();

  Stepper stepper(scenario);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = scenario.t0 + static_cast<double>(k) * h;
    const double err = stepper.advance(y, t, h);
    if (project) y.g = 0.5 * (y.g + y.g.adjoint());
    const double t_next = (k + 1 == steps)
                              ? scenario.t1
                              : scenario.t0 + static_cast<double>(k + 1) * h;
    check_finite(y, k + 1, t_next);
    if (richardson) bundle.local_error.push_back(err);
    record(t_next);
  }
  bundle.substeps = stepper.substeps();
  return bundle;
}

CMatrix closed_form_metric(const EvolutionBundle& bundle, std::size_t index) {
  const CMatrix& ul = bundle.left.at(index);
  return ul.adjoint() * bundle.metric.front() * ul;
}

}  // namespace metricbundle
