#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "metricbundle/evolution.hpp"
#include "metricbundle/model.hpp"

namespace metricbundle {

// Full-bundle export: {"format": "metricbundle-trajectory", "version": 1,
// "scenario": {...}, "bundle": {"grid", "psi", "metric", "right", "left",
// "vielbein"}}. Doubles are written with round-trip precision, so a
// re-ingested trajectory is bitwise identical to the one exported.
nlohmann::json trajectory_to_json(const Scenario& scenario,
                                  const EvolutionBundle& bundle);

struct Trajectory {
  Scenario scenario;
  EvolutionBundle bundle;
};

bool is_trajectory_document(const nlohmann::json& doc);
Trajectory trajectory_from_json(const nlohmann::json& doc, const Tolerance& tol = {});

// Plot-ready CSV: column `t`, then two columns (`_re`, `_im`) per complex
// quantity. `quantities` may name observables (S-picture expectation),
// "norm", "psi", "G", "U_R", "U_L" or "E"; empty means every observable.
// Throws SchemaError for an unknown quantity.
void write_csv(std::ostream& out, const Scenario& scenario,
               const EvolutionBundle& bundle,
               const std::vector<std::string>& quantities = {});

}  // namespace metricbundle
