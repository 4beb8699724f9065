#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "metricbundle/error.hpp"

namespace metricbundle {

using Complex = std::complex<double>;
using Index = Eigen::Index;

// Dense square complex matrix; carries Hamiltonians, metrics, propagators,
// vielbeins and observables alike.
using CMatrix = Eigen::MatrixXcd;
// Kets, and the components of dual (bra) states stored as plain columns.
using CVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

struct Tolerance {
  double atol = 1e-12;
  double rtol = 1e-10;
  // Largest acceptable 1-norm condition estimate before inverse() reports
  // Singular. Near an exceptional point both the vielbein and the
  // propagators degrade and we want that to be loud.
  double cond_cap = 1e12;

  double allowed(double scale) const noexcept { return atol + rtol * scale; }
};

// Validation helpers. Both throw Error(DimensionMismatch / NonFinite).
void require_square(const CMatrix& a, const char* what);
void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what);
bool all_finite(const CMatrix& a) noexcept;
bool all_finite(const CVector& v) noexcept;

CMatrix identity(Index dim);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

CMatrix mul(const CMatrix& a, const CMatrix& b);
CMatrix adjoint(const CMatrix& a);
CMatrix commutator(const CMatrix& a, const CMatrix& b);

// Inverse through partial-pivot LU. Throws Singular when a pivot vanishes
// or the reciprocal condition estimate exceeds `tol.cond_cap`.
CMatrix inverse(const CMatrix& a, const Tolerance& tol = {});

// Upper-triangular factor E with positive real diagonal and G = E^dagger E.
// Throws NotHermitian or NotPositiveDefinite.
CMatrix cholesky_upper(const CMatrix& g, const Tolerance& tol = {});

// All eigenvalues with multiplicity, unordered.
std::vector<Complex> eigenvalues(const CMatrix& a);

// ||a - a^dagger||_F / max(1, ||a||_F)
double hermitian_deviation(const CMatrix& a);

// Smallest eigenvalue of a Hermitian matrix; throws NotHermitian.
double min_eig_hermitian(const CMatrix& g, const Tolerance& tol = {});

// Canonical ordering for spectrum comparison: ascending real part, with
// entries whose real parts agree within `cluster` ordered by imaginary part.
std::vector<Complex> sorted_spectrum(std::vector<Complex> eigs,
                                     double cluster);

// Largest pairwise distance between two spectra after canonical ordering.
// Returns +inf when the multiset sizes differ.
double spectrum_distance(const std::vector<Complex>& a,
                         const std::vector<Complex>& b, double cluster);

// Eigenvalue multisets of a and b agree within atol + rtol * ||a||_F.
bool spectra_match(const CMatrix& a, const CMatrix& b, const Tolerance& tol);

}  // namespace metricbundle
