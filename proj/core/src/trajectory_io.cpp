#include "metricbundle/trajectory_io.hpp"

#include <cstdio>
#include <functional>

#include "metricbundle/error.hpp"
#include "metricbundle/representations.hpp"
#include "metricbundle/scenario_json.hpp"

namespace metricbundle {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "metricbundle-trajectory";

json matrices_to_json(const std::vector<CMatrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<CMatrix> matrices_from_json(const json& j, const std::string& pointer,
                                        std::size_t expected) {
  if (!j.is_array() || j.size() != expected) {
    throw SchemaError(pointer, "expected " + std::to_string(expected) + " matrices");
  }
  std::vector<CMatrix> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(matrix_from_json(j[i], pointer + "/" + std::to_string(i)));
  }
  return out;
}

void append_number(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

struct Column {
  std::string header;
  std::function<Complex(std::size_t)> value;
};

void matrix_columns(std::vector<Column>& cols, const std::string& label,
                    const std::vector<CMatrix>& channel, Index dim) {
  for (Index i = 0; i < dim; ++i) {
    for (Index k = 0; k < dim; ++k) {
      cols.push_back({label + "_" + std::to_string(i) + "_" + std::to_string(k),
                      [&channel, i, k](std::size_t n) { return channel[n](i, k); }});
    }
  }
}

}  // namespace

json trajectory_to_json(const Scenario& scenario, const EvolutionBundle& bundle) {
  json psi = json::array();
  for (const auto& v : bundle.psi) psi.push_back(vector_to_json(v));
  json out;
  out["format"] = kFormat;
  out["version"] = 1;
  out["scenario"] = scenario_to_json(scenario);
  out["bundle"] = {{"grid", bundle.grid},
                   {"psi", std::move(psi)},
                   {"metric", matrices_to_json(bundle.metric)},
                   {"right", matrices_to_json(bundle.right)},
                   {"left", matrices_to_json(bundle.left)},
                   {"vielbein", matrices_to_json(bundle.vielbein)}};
  return out;
}

bool is_trajectory_document(const json& doc) {
  return doc.is_object() && doc.contains("format") && doc["format"] == kFormat;
}

Trajectory trajectory_from_json(const json& doc, const Tolerance& tol) {
  if (!is_trajectory_document(doc)) {
    throw SchemaError("/format", std::string("expected \"") + kFormat + "\"");
  }
  if (!doc.contains("scenario")) throw SchemaError("/scenario", "missing required field");
  if (!doc.contains("bundle")) throw SchemaError("/bundle", "missing required field");
  Trajectory tr{scenario_from_json(doc["scenario"], tol), {}};
  const json& b = doc["bundle"];
  if (!b.contains("grid") || !b["grid"].is_array() || b["grid"].empty()) {
    throw SchemaError("/bundle/grid", "expected a non-empty array of times");
  }
  for (std::size_t i = 0; i < b["grid"].size(); ++i) {
    const json& t = b["grid"][i];
    if (!t.is_number()) {
      throw SchemaError("/bundle/grid/" + std::to_string(i), "expected a number");
    }
    tr.bundle.grid.push_back(t.get<double>());
  }
  const std::size_t n = tr.bundle.grid.size();
  if (!b.contains("psi") || !b["psi"].is_array() || b["psi"].size() != n) {
    throw SchemaError("/bundle/psi", "expected " + std::to_string(n) + " vectors");
  }
  for (std::size_t i = 0; i < n; ++i) {
    tr.bundle.psi.push_back(
        vector_from_json(b["psi"][i], "/bundle/psi/" + std::to_string(i)));
  }
  for (const char* key : {"metric", "right", "left", "vielbein"}) {
    if (!b.contains(key)) {
      throw SchemaError(std::string("/bundle/") + key, "missing required field");
    }
  }
  tr.bundle.metric = matrices_from_json(b["metric"], "/bundle/metric", n);
  tr.bundle.right = matrices_from_json(b["right"], "/bundle/right", n);
  tr.bundle.left = matrices_from_json(b["left"], "/bundle/left", n);
  tr.bundle.vielbein = matrices_from_json(b["vielbein"], "/bundle/vielbein", n);
  const Index dim = tr.scenario.dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (tr.bundle.psi[i].size() != dim || tr.bundle.metric[i].rows() != dim ||
        tr.bundle.right[i].rows() != dim || tr.bundle.left[i].rows() != dim ||
        tr.bundle.vielbein[i].rows() != dim) {
      throw SchemaError("/bundle", "node " + std::to_string(i) +
                                       " does not match the scenario dimension");
    }
  }
  return tr;
}

void write_csv(std::ostream& out, const Scenario& scenario,
               const EvolutionBundle& bundle,
               const std::vector<std::string>& quantities) {
  std::vector<std::string> wanted = quantities;
  if (wanted.empty()) {
    for (const auto& obs : scenario.observables) wanted.push_back(obs.name);
  }
  const Index dim = bundle.dim();
  std::vector<Column> cols;
  for (const auto& q : wanted) {
    if (const Observable* obs = scenario.find_observable(q)) {
      cols.push_back({q, [&bundle, obs](std::size_t n) {
                        return expectation_S(bundle, n, obs->at(bundle.grid[n]));
                      }});
    } else if (q == "norm") {
      cols.push_back({q, [&bundle, dim](std::size_t n) {
                        return expectation_S(bundle, n, identity(dim));
                      }});
    } else if (q == "psi") {
      for (Index i = 0; i < dim; ++i) {
        cols.push_back({"psi_" + std::to_string(i),
                        [&bundle, i](std::size_t n) { return bundle.psi[n](i); }});
      }
    } else if (q == "G") {
      matrix_columns(cols, q, bundle.metric, dim);
    } else if (q == "U_R") {
      matrix_columns(cols, q, bundle.right, dim);
    } else if (q == "U_L") {
      matrix_columns(cols, q, bundle.left, dim);
    } else if (q == "E") {
      matrix_columns(cols, q, bundle.vielbein, dim);
    } else {
      throw SchemaError("/quantities", "unknown quantity '" + q + "'");
    }
  }

  std::string line = "t";
  for (const auto& c : cols) line += "," + c.header + "_re," + c.header + "_im";
  out << line << '\n';
  for (std::size_t n = 0; n < bundle.size(); ++n) {
    line.clear();
    append_number(line, bundle.grid[n]);
    for (const auto& c : cols) {
      const Complex z = c.value(n);
      line += ',';
      append_number(line, z.real());
      line += ',';
      append_number(line, z.imag());
    }
    out << line << '\n';
  }
}

}  // namespace metricbundle
