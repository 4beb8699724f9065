#pragma once

#include <string>

#include <json.hpp>

#include "metricbundle/model.hpp"

namespace metricbundle {

// Scenario documents:
//
//   {
//     "dim": 2,
//     "hamiltonian": [{"coeff": "1", "matrix": [[[0,0],[1,0]], [[1,0],[0,0]]]}],
//     "metric": {"mode": "identity" | "explicit" | "stationary", "matrix": ...},
//     "psi0": [[1,0],[0,0]],
//     "observables": {"sigma_z": <matrix>, "rotating": [{"coeff": ..., "matrix": ...}]},
//     "t0": 0, "t1": 10,
//     "integrator": {"method": "rk4" | "rk4-richardson", "step": 0.001}
//   }
//
// Complex numbers are always [re, im]. Optional keys: "name",
// "expected_failures", and integrator "max_steps", "error_tolerance",
// "project_metric". Writing a parsed document reproduces it exactly.

nlohmann::json complex_to_json(Complex z);
nlohmann::json matrix_to_json(const CMatrix& m);
nlohmann::json vector_to_json(const CVector& v);

// Parsers throw SchemaError with `pointer` prefixed to the failing path.
Complex complex_from_json(const nlohmann::json& j, const std::string& pointer);
CMatrix matrix_from_json(const nlohmann::json& j, const std::string& pointer);
CVector vector_from_json(const nlohmann::json& j, const std::string& pointer);

nlohmann::json scenario_to_json(const Scenario& scenario);
// Parses and validates. Does not resolve a stationary metric.
Scenario scenario_from_json(const nlohmann::json& doc, const Tolerance& tol = {});

}  // namespace metricbundle
