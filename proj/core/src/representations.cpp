#include "metricbundle/representations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metricbundle/error.hpp"

namespace metricbundle {

namespace {

void require_tag(Picture actual, Picture wanted, const char* where) {
  if (actual != wanted) {
    throw Error(ErrorCode::TagViolation,
                std::string(where) + ": expected " + to_string(wanted) +
                    " operand, got " + to_string(actual));
  }
}

void require_node_time(const TaggedOperator& op, const EvolutionBundle& bundle,
                       std::size_t index, const char* where) {
  if (index >= bundle.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(where) + ": node " + std::to_string(index) +
                    " outside the grid");
  }
  const double t = bundle.grid[index];
  if (std::abs(op.time - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw Error(ErrorCode::TagViolation,
                std::string(where) + ": operator time " + std::to_string(op.time) +
                    " does not match node time " + std::to_string(t));
  }
  if (op.matrix.rows() != bundle.dim() || op.matrix.cols() != bundle.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(where) + ": operator dimension mismatch");
  }
}

void require_same_time(const TaggedOperator& a, const TaggedOperator& b,
                       const char* where) {
  if (std::abs(a.time - b.time) > 1e-9 * std::max(1.0, std::abs(a.time))) {
    throw Error(ErrorCode::TagViolation,
                std::string(where) + ": operands belong to different times");
  }
}

Complex bilinear(const CVector& dual, const CMatrix& op, const CVector& ket) {
  if (dual.size() != op.rows() || ket.size() != op.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "expectation: dimension mismatch");
  }
  return dual.transpose() * (op * ket);
}

}  // namespace

const char* to_string(Picture picture) noexcept {
  switch (picture) {
    case Picture::Schrodinger: return "S";
    case Picture::Heisenberg: return "H";
    case Picture::HeisenbergLike: return "HL";
    case Picture::NaiveDagger: return "naive";
  }
  return "?";
}

TaggedOperator schrodinger_operator(CMatrix matrix, double time) {
  return {Picture::Schrodinger, std::move(matrix), time};
}

TaggedOperator schrodinger_operator(const Observable& obs, double time) {
  return {Picture::Schrodinger, obs.at(time), time};
}

TaggedOperator schrodinger_operator_derivative(const Observable& obs, double time) {
  return {Picture::Schrodinger, obs.derivative_at(time), time};
}

TaggedState schrodinger_state(const EvolutionBundle& bundle, std::size_t index) {
  const CVector& psi = bundle.psi.at(index);
  return {Picture::Schrodinger, psi,
          bundle.metric.at(index).transpose() * psi.conjugate(),
          bundle.grid.at(index)};
}

Complex expectation_S(const EvolutionBundle& bundle, std::size_t index,
                      const CMatrix& obs) {
  const TaggedState state = schrodinger_state(bundle, index);
  return bilinear(state.dual, obs, state.ket);
}

TaggedOperator to_heisenberg(const TaggedOperator& obs_s,
                             const EvolutionBundle& bundle, std::size_t index) {
  require_tag(obs_s.rep, Picture::Schrodinger, "to_heisenberg");
  require_node_time(obs_s, bundle, index, "to_heisenberg");
  return {Picture::Heisenberg,
          bundle.left[index] * obs_s.matrix * bundle.right[index], obs_s.time};
}

TaggedOperator to_heisenberg_like(const TaggedOperator& obs_s,
                                  const EvolutionBundle& bundle,
                                  std::size_t index, const Tolerance& tol) {
  require_tag(obs_s.rep, Picture::Schrodinger, "to_heisenberg_like");
  require_node_time(obs_s, bundle, index, "to_heisenberg_like");
  const CMatrix& e = bundle.vielbein[index];
  return {Picture::HeisenbergLike, e * obs_s.matrix * inverse(e, tol), obs_s.time};
}

TaggedState heisenberg_state(const EvolutionBundle& bundle) {
  const CVector& psi0 = bundle.psi.front();
  return {Picture::Heisenberg, psi0,
          bundle.metric.front().transpose() * psi0.conjugate(), bundle.grid.front()};
}

TaggedState heisenberg_like_state(const EvolutionBundle& bundle) {
  const CVector& psi0 = bundle.psi.front();
  const CMatrix& e0 = bundle.vielbein.front();
  CVector ket = e0 * psi0;
  // psi0^dagger E0^dagger, stored as bra components.
  CVector dual = (psi0.adjoint() * e0.adjoint()).transpose();
  return {Picture::HeisenbergLike, std::move(ket), std::move(dual),
          bundle.grid.front()};
}

Complex expectation_H(const TaggedState& state, const TaggedOperator& obs) {
  require_tag(state.rep, Picture::Heisenberg, "expectation_H");
  require_tag(obs.rep, Picture::Heisenberg, "expectation_H");
  return bilinear(state.dual, obs.matrix, state.ket);
}

Complex expectation_HL(const TaggedState& state, const TaggedOperator& obs) {
  require_tag(state.rep, Picture::HeisenbergLike, "expectation_HL");
  require_tag(obs.rep, Picture::HeisenbergLike, "expectation_HL");
  return bilinear(state.dual, obs.matrix, state.ket);
}

CMatrix heisenberg_rhs(const TaggedOperator& obs_h, const TaggedOperator& h_h,
                       const TaggedOperator& dt_obs_h) {
  for (const auto* op : {&obs_h, &h_h, &dt_obs_h}) {
    require_tag(op->rep, Picture::Heisenberg, "heisenberg_rhs");
  }
  require_same_time(obs_h, h_h, "heisenberg_rhs");
  require_same_time(obs_h, dt_obs_h, "heisenberg_rhs");
  return kI * commutator(h_h.matrix, obs_h.matrix) + dt_obs_h.matrix;
}

CMatrix heisenberg_like_rhs(const TaggedOperator& obs_hl,
                            const TaggedOperator& h_hl,
                            const TaggedOperator& dt_obs_hl) {
  for (const auto* op : {&obs_hl, &h_hl, &dt_obs_hl}) {
    require_tag(op->rep, Picture::HeisenbergLike, "heisenberg_like_rhs");
  }
  require_same_time(obs_hl, h_hl, "heisenberg_like_rhs");
  require_same_time(obs_hl, dt_obs_hl, "heisenberg_like_rhs");
  return kI * commutator(h_hl.matrix, obs_hl.matrix) + dt_obs_hl.matrix;
}

CMatrix hermitized_hamiltonian(const CMatrix& h_s, const CMatrix& e,
                               const CMatrix& de_dt, const Tolerance& tol) {
  require_same_dim(h_s, e, "hermitized_hamiltonian");
  require_same_dim(e, de_dt, "hermitized_hamiltonian");
  const CMatrix e_inv = inverse(e, tol);
  return e * h_s * e_inv + kI * de_dt * e_inv;
}

double commutator_transport_check(const TaggedOperator& a_s,
                                  const TaggedOperator& b_s,
                                  const EvolutionBundle& bundle,
                                  std::size_t index) {
  const TaggedOperator a_h = to_heisenberg(a_s, bundle, index);
  const TaggedOperator b_h = to_heisenberg(b_s, bundle, index);
  const TaggedOperator ab_h = to_heisenberg(
      schrodinger_operator(commutator(a_s.matrix, b_s.matrix), a_s.time), bundle,
      index);
  return (commutator(a_h.matrix, b_h.matrix) - ab_h.matrix).norm() /
         std::max(1.0, ab_h.matrix.norm());
}

TaggedOperator naive_dagger_transport(const TaggedOperator& obs_s,
                                      const EvolutionBundle& bundle,
                                      std::size_t index) {
  require_tag(obs_s.rep, Picture::Schrodinger, "naive_dagger_transport");
  require_node_time(obs_s, bundle, index, "naive_dagger_transport");
  const CMatrix& u = bundle.right[index];
  return {Picture::NaiveDagger, u.adjoint() * obs_s.matrix * u, obs_s.time};
}

double naive_commutator_residual(const TaggedOperator& a_s,
                                 const TaggedOperator& b_s,
                                 const EvolutionBundle& bundle,
                                 std::size_t index) {
  const TaggedOperator a_n = naive_dagger_transport(a_s, bundle, index);
  const TaggedOperator b_n = naive_dagger_transport(b_s, bundle, index);
  const TaggedOperator ab_n = naive_dagger_transport(
      schrodinger_operator(commutator(a_s.matrix, b_s.matrix), a_s.time), bundle,
      index);
  return (commutator(a_n.matrix, b_n.matrix) - ab_n.matrix).norm() /
         std::max(1.0, ab_n.matrix.norm());
}

}  // namespace metricbundle
