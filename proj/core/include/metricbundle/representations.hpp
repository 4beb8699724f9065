#pragma once

#include <cstddef>

#include "metricbundle/evolution.hpp"
#include "metricbundle/matops.hpp"
#include "metricbundle/model.hpp"

namespace metricbundle {

// Schrodinger, Heisenberg, Heisenberg-like (vielbein), and the diagnostic
// tag for the conventional U^dagger transport that is *not* a valid picture
// change for non-Hermitian H.
enum class Picture { Schrodinger, Heisenberg, HeisenbergLike, NaiveDagger };

const char* to_string(Picture picture) noexcept;

// `dual` stores the components of the bra as a column: the bra acts as
// dual.transpose() * ket.
struct TaggedState {
  Picture rep = Picture::Schrodinger;
  CVector ket;
  CVector dual;
  double time = 0.0;
};

struct TaggedOperator {
  Picture rep = Picture::Schrodinger;
  CMatrix matrix;
  double time = 0.0;
};

TaggedOperator schrodinger_operator(CMatrix matrix, double time);
TaggedOperator schrodinger_operator(const Observable& obs, double time);
// (d/dt O_S)(t) from the observable's profile terms.
TaggedOperator schrodinger_operator_derivative(const Observable& obs, double time);

// Metricised Schrodinger state at node `index`: dual = G(t)^T conj(psi).
TaggedState schrodinger_state(const EvolutionBundle& bundle, std::size_t index);

// <psi(t)| G(t) O |psi(t)>
Complex expectation_S(const EvolutionBundle& bundle, std::size_t index,
                      const CMatrix& obs);

// O_H = U_L O_S U_R, with U_L standing in for U_R^{-1}.
TaggedOperator to_heisenberg(const TaggedOperator& obs_s,
                             const EvolutionBundle& bundle, std::size_t index);

// O_HL = E O_S E^{-1}. Throws Singular when E is not safely invertible.
TaggedOperator to_heisenberg_like(const TaggedOperator& obs_s,
                                  const EvolutionBundle& bundle,
                                  std::size_t index, const Tolerance& tol = {});

// |psi>_H = psi(t0), dual = psi(t0)^dagger G(t0).
TaggedState heisenberg_state(const EvolutionBundle& bundle);
// |psi>_HL = E(t0) psi(t0), dual = its Hermitian conjugate.
TaggedState heisenberg_like_state(const EvolutionBundle& bundle);

Complex expectation_H(const TaggedState& state, const TaggedOperator& obs);
Complex expectation_HL(const TaggedState& state, const TaggedOperator& obs);

// i [H_H, O_H] + (dO/dt)_H. All three must carry the Heisenberg tag and
// the same time.
CMatrix heisenberg_rhs(const TaggedOperator& obs_h, const TaggedOperator& h_h,
                       const TaggedOperator& dt_obs_h);
// The same bracket for Heisenberg-like operators.
CMatrix heisenberg_like_rhs(const TaggedOperator& obs_hl,
                            const TaggedOperator& h_hl,
                            const TaggedOperator& dt_obs_hl);

// E H E^{-1} + i (dE/dt) E^{-1}
CMatrix hermitized_hamiltonian(const CMatrix& h_s, const CMatrix& e,
                               const CMatrix& de_dt, const Tolerance& tol = {});

// || [A_H, B_H] - ([A, B])_H ||_F / max(1, ||([A, B])_H||_F)
double commutator_transport_check(const TaggedOperator& a_s,
                                  const TaggedOperator& b_s,
                                  const EvolutionBundle& bundle,
                                  std::size_t index);

// Conventional U_R^dagger O U_R, tagged NaiveDagger.
TaggedOperator naive_dagger_transport(const TaggedOperator& obs_s,
                                      const EvolutionBundle& bundle,
                                      std::size_t index);

// The commutator residual above with naive transport in place of
// to_heisenberg.
double naive_commutator_residual(const TaggedOperator& a_s,
                                 const TaggedOperator& b_s,
                                 const EvolutionBundle& bundle,
                                 std::size_t index);

}  // namespace metricbundle
