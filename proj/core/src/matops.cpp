#include "metricbundle/matops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace metricbundle {

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": expected a non-empty square matrix, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a.rows()) +
                    " vs " + std::to_string(b.rows()));
  }
}

bool all_finite(const CMatrix& a) noexcept {
  return a.allFinite();
}

bool all_finite(const CVector& v) noexcept {
  return v.allFinite();
}

CMatrix identity(Index dim) {
  return CMatrix::Identity(dim, dim);
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

CMatrix mul(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "mul");
  return a * b;
}

CMatrix adjoint(const CMatrix& a) {
  return a.adjoint();
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

CMatrix inverse(const CMatrix& a, const Tolerance& tol) {
  require_square(a, "inverse");
  if (!a.allFinite()) {
    throw Error(ErrorCode::Singular, "inverse: matrix has non-finite entries");
  }
  Eigen::PartialPivLU<CMatrix> lu(a);
  const auto& packed = lu.matrixLU();
  for (Index i = 0; i < packed.rows(); ++i) {
    if (packed(i, i) == Complex(0.0)) {
      throw Error(ErrorCode::Singular, "inverse: zero pivot at row " +
                                           std::to_string(i));
    }
  }
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > tol.cond_cap) {
    throw Error(ErrorCode::Singular,
                "inverse: condition estimate " + std::to_string(1.0 / rcond) +
                    " exceeds cap " + std::to_string(tol.cond_cap));
  }
  return lu.inverse();
}

CMatrix cholesky_upper(const CMatrix& g, const Tolerance& tol) {
  require_square(g, "cholesky_upper");
  const double skew = (g - g.adjoint()).norm();
  if (!(skew <= tol.allowed(g.norm()))) {
    throw Error(ErrorCode::NotHermitian,
                "cholesky_upper: ||G - G^dagger||_F = " + std::to_string(skew));
  }
  const Index n = g.rows();
  CMatrix e = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    // Row i of E from column i of G:  G_ij = sum_{k<=i} conj(E_ki) E_kj.
    double pivot = g(i, i).real();
    for (Index k = 0; k < i; ++k) pivot -= std::norm(e(k, i));
    if (!(pivot > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky_upper: leading minor " + std::to_string(i + 1) +
                      " is not positive (pivot " + std::to_string(pivot) + ")");
    }
    const double d = std::sqrt(pivot);
    e(i, i) = d;
    for (Index j = i + 1; j < n; ++j) {
      Complex s = g(i, j);
      for (Index k = 0; k < i; ++k) s -= std::conj(e(k, i)) * e(k, j);
      e(i, j) = s / d;
    }
  }
  return e;
}

std::vector<Complex> eigenvalues(const CMatrix& a) {
  require_square(a, "eigenvalues");
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure,
                "eigenvalues: QR iteration did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double hermitian_deviation(const CMatrix& a) {
  return (a - a.adjoint()).norm() / std::max(1.0, a.norm());
}

double min_eig_hermitian(const CMatrix& g, const Tolerance& tol) {
  require_square(g, "min_eig_hermitian");
  const double skew = (g - g.adjoint()).norm();
  if (!(skew <= tol.allowed(g.norm()))) {
    throw Error(ErrorCode::NotHermitian,
                "min_eig_hermitian: ||G - G^dagger||_F = " +
                    std::to_string(skew));
  }
  const CMatrix sym = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure,
                "min_eig_hermitian: eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

std::vector<Complex> sorted_spectrum(std::vector<Complex> eigs,
                                     double cluster) {
  std::sort(eigs.begin(), eigs.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  // Real parts that agree up to `cluster` are rounding siblings; order
  // each such run by imaginary part so conjugate pairs line up.
  std::size_t begin = 0;
  while (begin < eigs.size()) {
    std::size_t end = begin + 1;
    while (end < eigs.size() &&
           eigs[end].real() - eigs[end - 1].real() <= cluster) {
      ++end;
    }
    std::sort(eigs.begin() + static_cast<std::ptrdiff_t>(begin),
              eigs.begin() + static_cast<std::ptrdiff_t>(end),
              [](Complex x, Complex y) { return x.imag() < y.imag(); });
    begin = end;
  }
  return eigs;
}

double spectrum_distance(const std::vector<Complex>& a,
                         const std::vector<Complex>& b, double cluster) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const auto sa = sorted_spectrum(a, cluster);
  const auto sb = sorted_spectrum(b, cluster);
  double worst = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    worst = std::max(worst, std::abs(sa[i] - sb[i]));
  }
  return worst;
}

bool spectra_match(const CMatrix& a, const CMatrix& b, const Tolerance& tol) {
  const double allowed = tol.allowed(a.norm());
  return spectrum_distance(eigenvalues(a), eigenvalues(b), allowed) <= allowed;
}

}  // namespace metricbundle
