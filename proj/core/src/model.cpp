#include "metricbundle/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "metricbundle/error.hpp"

namespace metricbundle {

namespace {

void require_terms(const std::vector<Term>& terms) {
  if (terms.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "assemble: empty term list");
  }
  const Index dim = terms.front().matrix.rows();
  for (const auto& term : terms) {
    require_square(term.matrix, "assemble");
    if (term.matrix.rows() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "assemble: terms have mismatched dimensions");
    }
  }
}

std::string index_pointer(const std::string& base, std::size_t i) {
  return base + "/" + std::to_string(i);
}

void require_matrix_dim(const CMatrix& m, Index dim, const std::string& pointer) {
  if (m.rows() != dim || m.cols() != dim) {
    throw SchemaError(pointer, "expected a " + std::to_string(dim) + "x" +
                                   std::to_string(dim) + " matrix, got " +
                                   std::to_string(m.rows()) + "x" +
                                   std::to_string(m.cols()));
  }
  if (!all_finite(m)) throw SchemaError(pointer, "non-finite entry");
}

// Orthonormal (Frobenius) basis of the n^2-dimensional real space of
// Hermitian n x n matrices.
std::vector<CMatrix> hermitian_basis(Index n) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  const double r = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i) {
    CMatrix b = CMatrix::Zero(n, n);
    b(i, i) = 1.0;
    basis.push_back(std::move(b));
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      CMatrix re = CMatrix::Zero(n, n);
      re(i, j) = r;
      re(j, i) = r;
      basis.push_back(std::move(re));
      CMatrix im = CMatrix::Zero(n, n);
      im(i, j) = -kI * r;
      im(j, i) = kI * r;
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

struct Spectrum {
  double min = 0.0;
  double max = 0.0;
};

Spectrum hermitian_extremes(const CMatrix& g) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (g + g.adjoint()),
                                                Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

CMatrix normalized(const CMatrix& g) {
  return g * (static_cast<double>(g.rows()) / g.trace().real());
}

// G = (V V^dagger)^{-1} from the right eigenvectors V of H. Valid whenever H
// is diagonalisable with a real spectrum.
std::optional<CMatrix> biorthogonal_metric(const CMatrix& h,
                                           const Tolerance& tol) {
  Eigen::ComplexEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const double scale = std::max(1.0, h.norm());
  for (Index i = 0; i < h.rows(); ++i) {
    if (std::abs(solver.eigenvalues()(i).imag()) > 1e-9 * scale) {
      return std::nullopt;
    }
  }
  const CMatrix& v = solver.eigenvectors();
  try {
    const CMatrix v_inv = inverse(v, tol);
    return v_inv.adjoint() * v_inv;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

CMatrix assemble(const std::vector<Term>& terms, double t) {
  require_terms(terms);
  const Index dim = terms.front().matrix.rows();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& term : terms) {
    out += term.coefficient.eval(t) * term.matrix;
  }
  return out;
}

CMatrix assemble(const HamiltonianSpec& spec, double t) {
  return assemble(spec.terms, t);
}

CMatrix assemble_derivative(const std::vector<Term>& terms, double t) {
  require_terms(terms);
  const Index dim = terms.front().matrix.rows();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& term : terms) {
    if (!term.coefficient.depends_on_time()) continue;
    out += term.coefficient.derivative().eval(t) * term.matrix;
  }
  return out;
}

bool Observable::time_dependent() const {
  return std::any_of(terms.begin(), terms.end(), [](const Term& term) {
    return term.coefficient.depends_on_time();
  });
}

Observable constant_observable(std::string name, CMatrix matrix) {
  Observable obs;
  obs.name = std::move(name);
  obs.terms.push_back({ProfileExpr::constant(1.0), std::move(matrix)});
  obs.plain_matrix = true;
  return obs;
}

const char* to_string(IntegratorConfig::Method method) noexcept {
  switch (method) {
    case IntegratorConfig::Method::Rk4: return "rk4";
    case IntegratorConfig::Method::Rk4Richardson: return "rk4-richardson";
  }
  return "rk4";
}

const Observable* Scenario::find_observable(const std::string& wanted) const {
  for (const auto& obs : observables) {
    if (obs.name == wanted) return &obs;
  }
  return nullptr;
}

void validate(const Scenario& s, const Tolerance& tol) {
  const Index dim = s.hamiltonian.dim;
  if (dim < 1) throw SchemaError("/dim", "must be a positive integer");
  if (s.hamiltonian.terms.empty()) {
    throw SchemaError("/hamiltonian", "needs at least one term");
  }
  for (std::size_t i = 0; i < s.hamiltonian.terms.size(); ++i) {
    require_matrix_dim(s.hamiltonian.terms[i].matrix, dim,
                       index_pointer("/hamiltonian", i) + "/matrix");
  }
  if (s.psi0.size() != dim) {
    throw SchemaError("/psi0", "expected " + std::to_string(dim) +
                                   " components, got " +
                                   std::to_string(s.psi0.size()));
  }
  if (!all_finite(s.psi0)) throw SchemaError("/psi0", "non-finite entry");
  for (const auto& obs : s.observables) {
    const std::string base = "/observables/" + obs.name;
    if (obs.terms.empty()) throw SchemaError(base, "needs at least one term");
    for (std::size_t i = 0; i < obs.terms.size(); ++i) {
      require_matrix_dim(obs.terms[i].matrix, dim,
                         obs.plain_matrix ? base
                                          : index_pointer(base, i) + "/matrix");
    }
  }
  if (!std::isfinite(s.t0) || !std::isfinite(s.t1)) {
    throw SchemaError("/t1", "time bounds must be finite");
  }
  if (!(s.t1 > s.t0)) throw SchemaError("/t1", "must exceed t0");
  const double span = s.t1 - s.t0;
  const auto& cfg = s.integrator;
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
    throw SchemaError("/integrator/step", "must be a positive real");
  }
  if (cfg.step > span * (1.0 + 1e-12)) {
    throw SchemaError("/integrator/step", "exceeds t1 - t0");
  }
  if (cfg.max_steps && *cfg.max_steps == 0) {
    throw SchemaError("/integrator/max_steps", "must be positive");
  }
  if (cfg.error_tolerance && !(*cfg.error_tolerance > 0.0)) {
    throw SchemaError("/integrator/error_tolerance", "must be positive");
  }
  const double steps = std::ceil(span / cfg.step - 1e-9);
  if (steps > static_cast<double>(cfg.step_limit())) {
    throw SchemaError("/integrator/step",
                      "needs " + std::to_string(static_cast<long long>(steps)) +
                          " steps, above max_steps " +
                          std::to_string(cfg.step_limit()));
  }
  if (s.metric.mode == MetricInit::Mode::Explicit) {
    if (!s.metric.matrix) {
      throw SchemaError("/metric/matrix", "required for explicit mode");
    }
    const CMatrix& g = *s.metric.matrix;
    require_matrix_dim(g, dim, "/metric/matrix");
    if ((g - g.adjoint()).norm() > tol.allowed(g.norm())) {
      throw SchemaError("/metric/matrix", "not Hermitian");
    }
    if (hermitian_extremes(g).min <= 0.0) {
      throw SchemaError("/metric/matrix", "not positive-definite");
    }
  }
}

CMatrix initial_metric(const Scenario& s, const Tolerance& tol) {
  switch (s.metric.mode) {
    case MetricInit::Mode::Identity:
      return identity(s.dim());
    case MetricInit::Mode::Explicit:
      return *s.metric.matrix;
    case MetricInit::Mode::Stationary:
      return solve_stationary_metric(assemble(s.hamiltonian, s.t0), tol).metric;
  }
  return identity(s.dim());
}

StationaryMetric solve_stationary_metric(const CMatrix& h, const Tolerance& tol) {
  require_square(h, "solve_stationary_metric");
  const Index n = h.rows();
  const auto basis = hermitian_basis(n);
  const Index params = static_cast<Index>(basis.size());

  // Real matrix of the map B -> B H - H^dagger B, stacked (Re, Im).
  Eigen::MatrixXd map(2 * n * n, params);
  for (Index m = 0; m < params; ++m) {
    const CMatrix& b = basis[static_cast<std::size_t>(m)];
    const CMatrix image = b * h - h.adjoint() * b;
    for (Index k = 0; k < n * n; ++k) {
      const Complex z = image(k % n, k / n);
      map(k, m) = z.real();
      map(n * n + k, m) = z.imag();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double threshold = 1e-9 * std::max(1.0, sigma(0));

  std::vector<CMatrix> nullspace;
  for (Index k = 0; k < params; ++k) {
    if (sigma(k) > threshold) continue;
    CMatrix g = CMatrix::Zero(n, n);
    for (Index m = 0; m < params; ++m) {
      g += svd.matrixV()(m, k) * basis[static_cast<std::size_t>(m)];
    }
    nullspace.push_back(std::move(g));
  }
  if (nullspace.empty()) {
    throw StationaryMetricError(
        false, "G H = H^dagger G admits no nonzero Hermitian solution");
  }

  StationaryMetric result;
  result.nullspace_dim = nullspace.size();
  result.non_unique = nullspace.size() > 1;

  // Orthogonal projection of the identity onto the solution space.
  CMatrix candidate = CMatrix::Zero(n, n);
  for (const auto& g : nullspace) candidate += g.trace().real() * g;
  if (candidate.norm() < 1e-12) candidate = nullspace.front();
  if (candidate.trace().real() < 0.0) candidate = -candidate;

  auto accept = [&](const CMatrix& g) {
    result.metric = normalized(g);
    result.metric = 0.5 * (result.metric + result.metric.adjoint());
    result.residual = (result.metric * h - h.adjoint() * result.metric).norm();
    return result;
  };

  const Spectrum spec = hermitian_extremes(candidate);
  const double pd_margin = 1e-9;
  if (spec.min > pd_margin * spec.max) return accept(candidate);

  // The projection can be indefinite even when a PD solution exists in a
  // higher-dimensional solution space; the biorthogonal metric is PD by
  // construction whenever it exists.
  if (auto g = biorthogonal_metric(h, tol)) {
    const CMatrix gn = normalized(*g);
    const double residual = (gn * h - h.adjoint() * gn).norm();
    const Spectrum s2 = hermitian_extremes(gn);
    if (residual <= 1e-10 * gn.norm() * std::max(1.0, h.norm()) &&
        s2.min > pd_margin * s2.max) {
      return accept(*g);
    }
  }

  const bool degenerate = spec.max > 0.0 && spec.min >= -1e-8 * spec.max;
  if (degenerate) {
    throw StationaryMetricError(
        true, "stationary metric is only semi-definite (exceptional point)");
  }
  throw StationaryMetricError(
      false, "no positive-definite stationary metric (broken phase)");
}

}  // namespace metricbundle
