#pragma once

#include <cstddef>
#include <vector>

#include "metricbundle/matops.hpp"
#include "metricbundle/model.hpp"

namespace metricbundle {

// Right-hand sides of the coupled flow driven by H = H_S(t).
CVector rhs_state(const CMatrix& h, const CVector& psi);       // -i H psi
CMatrix rhs_metric(const CMatrix& h, const CMatrix& g);        // i (G H - H^dagger G)
CMatrix rhs_right_prop(const CMatrix& h, const CMatrix& u);    // -i H U_R
CMatrix rhs_left_prop(const CMatrix& h, const CMatrix& u);     // i U_L H
CMatrix rhs_vielbein(const CMatrix& h, const CMatrix& e);      // i E H  (zero hermitized generator)

// Time-gridded record of one integration run. All channels are aligned to
// `grid`; node 0 holds the initial data (U_R = U_L = I, E = chol(G0)).
struct EvolutionBundle {
  std::vector<double> grid;
  std::vector<CMatrix> right;     // U_R(t, t0)
  std::vector<CMatrix> left;      // U_L(t, t0)
  std::vector<CMatrix> metric;    // G(t)
  std::vector<CMatrix> vielbein;  // E(t)
  std::vector<CVector> psi;       // |psi(t)>
  // Richardson runs only: estimated local error of each step (size
  // grid.size() - 1), and the number of substeps actually taken.
  std::vector<double> local_error;
  std::size_t substeps = 0;

  std::size_t size() const noexcept { return grid.size(); }
  Index dim() const noexcept { return psi.empty() ? 0 : psi.front().size(); }
  double step() const noexcept {
    return grid.size() > 1 ? grid[1] - grid[0] : 0.0;
  }
  // Index of the node nearest to t.
  std::size_t nearest(double t) const;
};

// Integrates state, metric, both propagators and the vielbein with shared
// RK4 stages. Throws StepLimitExceeded, or NonFiniteError when any entry
// leaves the finite range (|z| > 1e12).
EvolutionBundle integrate(const Scenario& scenario, const Tolerance& tol = {});

// Same, with an already resolved initial metric.
EvolutionBundle integrate(const Scenario& scenario, const CMatrix& g0,
                          const Tolerance& tol = {});

// U_L^dagger G(t0) U_L at node `index`: the closed-form transport of the
// initial metric, for comparison with the integrated channel.
CMatrix closed_form_metric(const EvolutionBundle& bundle, std::size_t index);

inline constexpr double kBlowUpMagnitude = 1e12;

}  // namespace metricbundle
