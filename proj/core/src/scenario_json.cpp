#include "metricbundle/scenario_json.hpp"

#include <cmath>
#include <cstdint>

#include "metricbundle/error.hpp"

namespace metricbundle {

using nlohmann::json;

namespace {

// Integral values are written as JSON integers so that "1" and "0" in a
// hand-written document survive a read/write cycle unchanged.
json number_to_json(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 9.0e15 &&
      !(v == 0.0 && std::signbit(v))) {
    return json(static_cast<std::int64_t>(v));
  }
  return json(v);
}

double number_from_json(const json& j, const std::string& pointer) {
  if (!j.is_number()) throw SchemaError(pointer, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(pointer, "non-finite number");
  return v;
}

const json& member(const json& obj, const char* key, const std::string& base) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(base + "/" + key, "missing required field");
  }
  return *it;
}

ProfileExpr coefficient_from_json(const json& j, const std::string& pointer) {
  if (!j.is_string()) throw SchemaError(pointer, "expected an expression string");
  try {
    return ProfileExpr::parse(j.get<std::string>());
  } catch (const ExprError& e) {
    throw SchemaError(pointer, e.what());
  }
}

std::vector<Term> terms_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(pointer, "expected a non-empty array of terms");
  }
  std::vector<Term> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string base = pointer + "/" + std::to_string(i);
    const json& term = j[i];
    if (!term.is_object()) throw SchemaError(base, "expected an object");
    terms.push_back({coefficient_from_json(member(term, "coeff", base), base + "/coeff"),
                     matrix_from_json(member(term, "matrix", base), base + "/matrix")});
  }
  return terms;
}

json terms_to_json(const std::vector<Term>& terms) {
  json out = json::array();
  for (const auto& term : terms) {
    out.push_back({{"coeff", term.coefficient.source()},
                   {"matrix", matrix_to_json(term.matrix)}});
  }
  return out;
}

// A term list is an array of objects; a plain matrix is an array of rows.
bool looks_like_terms(const json& j) {
  return j.is_array() && !j.empty() && j.front().is_object();
}

}  // namespace

json complex_to_json(Complex z) {
  return json::array({number_to_json(z.real()), number_to_json(z.imag())});
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const CVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Complex complex_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.size() != 2) {
    throw SchemaError(pointer, "expected a complex number [re, im]");
  }
  return {number_from_json(j[0], pointer + "/0"),
          number_from_json(j[1], pointer + "/1")};
}

CMatrix matrix_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(pointer, "expected a non-empty array of rows");
  }
  const auto n = static_cast<Index>(j.size());
  CMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const std::string row_ptr = pointer + "/" + std::to_string(i);
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw SchemaError(row_ptr, "expected a row of " + std::to_string(n) +
                                     " complex entries (matrix must be square)");
    }
    for (Index k = 0; k < n; ++k) {
      m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)],
                                  row_ptr + "/" + std::to_string(k));
    }
  }
  return m;
}

CVector vector_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(pointer, "expected a non-empty array of complex numbers");
  }
  CVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = complex_from_json(j[i], pointer + "/" + std::to_string(i));
  }
  return v;
}

json scenario_to_json(const Scenario& s) {
  json doc;
  if (s.name) doc["name"] = *s.name;
  doc["dim"] = s.dim();
  doc["hamiltonian"] = terms_to_json(s.hamiltonian.terms);

  json metric;
  switch (s.metric.mode) {
    case MetricInit::Mode::Identity: metric["mode"] = "identity"; break;
    case MetricInit::Mode::Explicit: metric["mode"] = "explicit"; break;
    case MetricInit::Mode::Stationary: metric["mode"] = "stationary"; break;
  }
  if (s.metric.matrix) metric["matrix"] = matrix_to_json(*s.metric.matrix);
  doc["metric"] = std::move(metric);

  doc["psi0"] = vector_to_json(s.psi0);

  json observables = json::object();
  for (const auto& obs : s.observables) {
    observables[obs.name] = obs.plain_matrix ? matrix_to_json(obs.terms.front().matrix)
                                             : terms_to_json(obs.terms);
  }
  doc["observables"] = std::move(observables);

  doc["t0"] = number_to_json(s.t0);
  doc["t1"] = number_to_json(s.t1);

  json integrator;
  integrator["method"] = to_string(s.integrator.method);
  integrator["step"] = number_to_json(s.integrator.step);
  if (s.integrator.max_steps) integrator["max_steps"] = *s.integrator.max_steps;
  if (s.integrator.error_tolerance) {
    integrator["error_tolerance"] = number_to_json(*s.integrator.error_tolerance);
  }
  if (s.integrator.project_metric) {
    integrator["project_metric"] = *s.integrator.project_metric;
  }
  doc["integrator"] = std::move(integrator);

  if (!s.expected_failures.empty()) doc["expected_failures"] = s.expected_failures;
  return doc;
}

Scenario scenario_from_json(const json& doc, const Tolerance& tol) {
  if (!doc.is_object()) throw SchemaError("", "scenario must be a JSON object");
  Scenario s;

  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw SchemaError("/name", "expected a string");
    s.name = it->get<std::string>();
  }

  const json& dim = member(doc, "dim", "");
  if (!dim.is_number_integer() || dim.get<long long>() < 1) {
    throw SchemaError("/dim", "must be a positive integer");
  }
  s.hamiltonian.dim = static_cast<Index>(dim.get<long long>());
  s.hamiltonian.terms = terms_from_json(member(doc, "hamiltonian", ""), "/hamiltonian");

  const json& metric = member(doc, "metric", "");
  if (!metric.is_object()) throw SchemaError("/metric", "expected an object");
  const json& mode = member(metric, "mode", "/metric");
  const std::string mode_name = mode.is_string() ? mode.get<std::string>() : "";
  if (mode_name == "identity") {
    s.metric.mode = MetricInit::Mode::Identity;
  } else if (mode_name == "explicit") {
    s.metric.mode = MetricInit::Mode::Explicit;
  } else if (mode_name == "stationary") {
    s.metric.mode = MetricInit::Mode::Stationary;
  } else {
    throw SchemaError("/metric/mode", "expected identity, explicit or stationary");
  }
  if (const auto it = metric.find("matrix"); it != metric.end()) {
    s.metric.matrix = matrix_from_json(*it, "/metric/matrix");
  }

  s.psi0 = vector_from_json(member(doc, "psi0", ""), "/psi0");

  const json& observables = member(doc, "observables", "");
  if (!observables.is_object()) {
    throw SchemaError("/observables", "expected an object keyed by name");
  }
  for (const auto& [name, value] : observables.items()) {
    const std::string base = "/observables/" + name;
    Observable obs;
    obs.name = name;
    if (looks_like_terms(value)) {
      obs.terms = terms_from_json(value, base);
      obs.plain_matrix = false;
    } else {
      obs.terms.push_back({ProfileExpr::constant(1.0), matrix_from_json(value, base)});
      obs.plain_matrix = true;
    }
    s.observables.push_back(std::move(obs));
  }

  s.t0 = number_from_json(member(doc, "t0", ""), "/t0");
  s.t1 = number_from_json(member(doc, "t1", ""), "/t1");

  const json& integrator = member(doc, "integrator", "");
  if (!integrator.is_object()) throw SchemaError("/integrator", "expected an object");
  const json& method = member(integrator, "method", "/integrator");
  const std::string method_name = method.is_string() ? method.get<std::string>() : "";
  if (method_name == "rk4") {
    s.integrator.method = IntegratorConfig::Method::Rk4;
  } else if (method_name == "rk4-richardson") {
    s.integrator.method = IntegratorConfig::Method::Rk4Richardson;
  } else {
    throw SchemaError("/integrator/method", "expected rk4 or rk4-richardson");
  }
  s.integrator.step = number_from_json(member(integrator, "step", "/integrator"),
                                       "/integrator/step");
  if (const auto it = integrator.find("max_steps"); it != integrator.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) {
      throw SchemaError("/integrator/max_steps", "expected a positive integer");
    }
    s.integrator.max_steps = it->get<std::size_t>();
  }
  if (const auto it = integrator.find("error_tolerance"); it != integrator.end()) {
    s.integrator.error_tolerance = number_from_json(*it, "/integrator/error_tolerance");
  }
  if (const auto it = integrator.find("project_metric"); it != integrator.end()) {
    if (!it->is_boolean()) throw SchemaError("/integrator/project_metric", "expected a boolean");
    s.integrator.project_metric = it->get<bool>();
  }

  if (const auto it = doc.find("expected_failures"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("/expected_failures", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) {
        throw SchemaError("/expected_failures/" + std::to_string(i), "expected a string");
      }
      s.expected_failures.push_back((*it)[i].get<std::string>());
    }
  }

  validate(s, tol);
  return s;
}

}  // namespace metricbundle
