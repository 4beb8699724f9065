#pragma once

// Shared generators and reference computations for the test binaries.
// Nothing here calls into the library except for plain data types.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "metricbundle/matops.hpp"

namespace mbtest {

using metricbundle::CMatrix;
using metricbundle::Complex;
using metricbundle::CVector;
using metricbundle::Index;

inline CMatrix sx() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
inline CMatrix sy() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
  return m;
}
inline CMatrix sz() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
inline const Complex I{0.0, 1.0};

// PT dimer s sx + i g sz.
inline CMatrix pt_dimer(double s, double g) { return s * sx() + I * g * sz(); }

inline CMatrix random_matrix(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  CMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, Index n, double scale = 1.0) {
  const CMatrix a = random_matrix(rng, n, scale);
  return 0.5 * (a + a.adjoint());
}

// A^dagger A + shift I: Hermitian positive definite with smallest eigenvalue
// at least `shift`.
inline CMatrix random_spd(std::mt19937_64& rng, Index n, double shift = 0.5) {
  const CMatrix a = random_matrix(rng, n, 1.0 / std::sqrt(double(n)));
  return a.adjoint() * a + shift * CMatrix::Identity(n, n);
}

inline CVector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
  return v;
}

// exp(-i H t) by Pade scaling-and-squaring in Eigen's unsupported module.
inline CMatrix propagator(const CMatrix& h, double t) {
  const CMatrix a = (Complex(0.0, -t) * h).eval();
  return a.exp();
}

inline double fro(const CMatrix& m) { return m.norm(); }

}  // namespace mbtest
