// Copyright 2026 The vibcoh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "vibcoh/errors.hpp"

namespace vibcoh {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Largest elementwise deviation from Hermiticity.
inline double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// exp(-i h t) for Hermitian h, via eigendecomposition. Exactly unitary up to
// rounding, which is what the truncated-space generators need.
inline CMatrix unitary_from_hermitian(const CMatrix& h, double t = 1.0) {
  const CMatrix hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hs);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed in unitary_from_hermitian");
  }
  const Eigen::VectorXd& w = es.eigenvalues();
  CVector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    phases(k) = std::exp(-kI * w(k) * t);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// exp(g) for anti-Hermitian g.
inline CMatrix exp_antihermitian(const CMatrix& g) {
  return unitary_from_hermitian(kI * g, 1.0);
}

// Inverse square root of a Hermitian positive-definite matrix.
inline CMatrix inverse_sqrt_hermitian(const CMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (s + s.adjoint()));
  const Eigen::VectorXd& w = es.eigenvalues();
  if (w.minCoeff() <= 0.0) {
    throw NumericalError("matrix is not positive definite");
  }
  Eigen::VectorXd inv = w.array().sqrt().inverse();
  return es.eigenvectors() * inv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

inline CMatrix sqrt_hermitian_psd(const CMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (s + s.adjoint()));
  Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).array().sqrt();
  return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace vibcoh
