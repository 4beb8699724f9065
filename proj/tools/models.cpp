#include <charconv>
#include <string>

#include "cli.hpp"
#include "metricbundle/error.hpp"

namespace metricbundle::cli {

namespace {

std::string literal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Params {
  double s = 1.0;
  double gamma = 0.0;
  double t0 = 0.0;
  double t1 = 10.0;
  double step = 1e-3;
};

Params resolve(double default_gamma_ratio,
               const std::map<std::string, double>& overrides) {
  Params p;
  if (auto it = overrides.find("s"); it != overrides.end()) p.s = it->second;
  p.gamma = default_gamma_ratio * p.s;
  for (const auto& [key, value] : overrides) {
    if (key == "s") continue;
    if (key == "gamma") p.gamma = value;
    else if (key == "t0") p.t0 = value;
    else if (key == "t1") p.t1 = value;
    else if (key == "step") p.step = value;
    else {
      throw SchemaError("/" + key, "unknown model parameter (expected s, gamma, t0, t1, step)");
    }
  }
  return p;
}

Scenario base(const std::string& name, const Params& p) {
  Scenario s;
  s.name = name;
  s.hamiltonian.dim = 2;
  s.psi0 = CVector(2);
  s.psi0 << 1.0, 0.0;
  s.observables = {constant_observable("sigma_x", pauli_x()),
                   constant_observable("sigma_y", pauli_y()),
                   constant_observable("sigma_z", pauli_z())};
  s.t0 = p.t0;
  s.t1 = p.t1;
  s.integrator.method = IntegratorConfig::Method::Rk4;
  s.integrator.step = p.step;
  return s;
}

// s sx + gamma(t) i sz, with gamma given as a profile expression.
void pt_dimer(Scenario& s, const Params& p, const std::string& gamma_profile) {
  s.hamiltonian.terms = {
      {ProfileExpr::parse(literal(p.s)), pauli_x()},
      {ProfileExpr::parse(gamma_profile), kI * pauli_z()},
  };
}

}  // namespace

std::vector<std::string> builtin_model_names() {
  return {"hermitian-rabi", "pt-dimer-unbroken", "pt-dimer-broken",
          "pt-ep",          "driven-dimer",      "time-dependent-observable"};
}

Scenario builtin_model(const std::string& name,
                       const std::map<std::string, double>& overrides) {
  if (name == "hermitian-rabi") {
    const Params p = resolve(0.0, overrides);
    Scenario s = base(name, p);
    s.hamiltonian.terms = {{ProfileExpr::parse(literal(p.s)), pauli_x()}};
    s.metric.mode = MetricInit::Mode::Identity;
    validate(s);
    return s;
  }
  if (name == "pt-dimer-unbroken" || name == "time-dependent-observable") {
    const Params p = resolve(0.5, overrides);
    Scenario s = base(name, p);
    pt_dimer(s, p, literal(p.gamma));
    s.metric.mode = MetricInit::Mode::Stationary;
    if (name == "time-dependent-observable") {
      Observable rotating;
      rotating.name = "rotating";
      rotating.plain_matrix = false;
      rotating.terms = {{ProfileExpr::parse("cos(t)"), pauli_x()},
                        {ProfileExpr::parse("sin(t)"), pauli_y()}};
      s.observables.push_back(std::move(rotating));
    }
    validate(s);
    return s;
  }
  if (name == "pt-dimer-broken") {
    const Params p = resolve(1.5, overrides);
    Scenario s = base(name, p);
    pt_dimer(s, p, literal(p.gamma));
    s.metric.mode = MetricInit::Mode::Identity;
    // Complex-conjugate eigenvalues: G(t) becomes numerically singular
    // while the propagators grow exponentially, so every identity that
    // needs an accurate inverse loses precision.
    s.expected_failures = {
        "integrate",          "metric_positive",     "inverse_left_right",
        "inverse_right_left", "propagator_state",    "metric_hermitian",
        "metric_closed_form", "vielbein_metric",     "hflat_residual",
        "expectation_h",      "expectation_hl",      "isospectral_h",
        "isospectral_hl",     "heisenberg_eom",      "heisenberg_like_eom",
        "commutator_transport"};
    validate(s);
    return s;
  }
  if (name == "pt-ep") {
    const Params p = resolve(1.0, overrides);
    Scenario s = base(name, p);
    pt_dimer(s, p, literal(p.gamma));
    s.metric.mode = MetricInit::Mode::Identity;
    validate(s);
    return s;
  }
  if (name == "driven-dimer") {
    const Params p = resolve(0.5, overrides);
    Scenario s = base(name, p);
    pt_dimer(s, p, literal(p.gamma) + "*sin(t)");
    s.metric.mode = MetricInit::Mode::Identity;
    validate(s);
    return s;
  }
  throw Error(ErrorCode::UnknownModel, "unknown model '" + name + "'");
}

std::vector<Scenario> builtin_models() {
  std::vector<Scenario> out;
  for (const auto& name : builtin_model_names()) out.push_back(builtin_model(name));
  return out;
}

}  // namespace metricbundle::cli
