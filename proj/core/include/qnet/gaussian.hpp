// Copyright 2026 The qnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Phase-space conventions used throughout qnet:
//   a = x + i p, vacuum variance 1 per quadrature,
//   quadrature vectors ordered (x_1..x_n, p_1..p_n),
//   Omega = [[0, I], [-I, 0]],
//   squeezing in dB = 10 log10(variance).

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qnet/errors.hpp"

namespace qnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kVacuumVariance = 1.0;
inline constexpr double kStructuralTolerance = 1e-10;
inline constexpr double kInputTolerance = 1e-8;
inline constexpr double kUncertaintyTolerance = 1e-9;

Matrix symplectic_form(int modes);

double db_to_variance(double db);
double variance_to_db(double variance);

// 2n x 2n quadrature covariance matrix of an n-mode Gaussian state.
class CovarianceMatrix {
 public:
  // Validates symmetry and V + i Omega >= 0. Throws InputError.
  explicit CovarianceMatrix(Matrix data);

  static CovarianceMatrix vacuum(int modes);
  // diag(1/s_1..1/s_n, s_1..s_n): independent p-squeezed modes.
  static CovarianceMatrix squeezed(std::span<const double> p_variances);

  int modes() const { return modes_; }
  const Matrix& data() const { return data_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

  Matrix x_block() const { return data_.topLeftCorner(modes_, modes_); }
  Matrix p_block() const { return data_.bottomRightCorner(modes_, modes_); }

  // Smallest eigenvalue of V + i Omega.
  double uncertainty_margin() const;

 private:
  int modes_;
  Matrix data_;
};

// n x n unitary b = U a on annihilation operators, held as U = X + iY.
class ModeUnitary {
 public:
  // Throws InputError carrying the residual when ||U U^dag - I||_max > 1e-8.
  explicit ModeUnitary(ComplexMatrix u);
  static ModeUnitary from_parts(const Matrix& real, const Matrix& imag);
  static ModeUnitary identity(int modes);

  int modes() const { return static_cast<int>(u_.rows()); }
  const ComplexMatrix& matrix() const { return u_; }
  Matrix real() const { return u_.real(); }
  Matrix imag() const { return u_.imag(); }

  ModeUnitary adjoint() const;
  ModeUnitary operator*(const ModeUnitary& rhs) const;

 private:
  ComplexMatrix u_;
};

double unitarity_residual(const ComplexMatrix& u);
// Polar projection onto the nearest unitary (Frobenius norm).
ComplexMatrix nearest_unitary(const ComplexMatrix& u);

// Real 2n x 2n map on quadrature vectors with S Omega S^T = Omega.
class SymplecticMatrix {
 public:
  // Validates the symplectic condition to kInputTolerance.
  explicit SymplecticMatrix(Matrix data);
  static SymplecticMatrix identity(int modes);

  int modes() const { return static_cast<int>(data_.rows() / 2); }
  const Matrix& data() const { return data_; }

 private:
  Matrix data_;
};

double symplectic_residual(const Matrix& s);

// Ordered per-mode p-quadrature variances (vacuum = 1).
class SqueezingProfile {
 public:
  SqueezingProfile() = default;
  explicit SqueezingProfile(std::vector<double> variances);
  static SqueezingProfile from_db(std::span<const double> db);
  static SqueezingProfile uniform(int modes, double variance);

  int size() const { return static_cast<int>(variances_.size()); }
  bool empty() const { return variances_.empty(); }
  const std::vector<double>& variances() const { return variances_; }
  double operator[](std::size_t i) const { return variances_[i]; }
  std::vector<double> db() const;

  // Most squeezed first; ties keep their original order.
  SqueezingProfile sorted() const;
  // First `count` entries of sorted().
  SqueezingProfile leading(int count) const;
  int squeezed_count(double tolerance = 1e-9) const;

  friend bool operator==(const SqueezingProfile&, const SqueezingProfile&) = default;

 private:
  std::vector<double> variances_;
};

// U = X + iY  ->  [[X, -Y], [Y, X]].
SymplecticMatrix unitary_to_symplectic(const ModeUnitary& u);

// S V S^T.
CovarianceMatrix apply_symplectic(const SymplecticMatrix& s, const CovarianceMatrix& v);

// Beamsplitter loss: V' = G V G + (I - G^2), G = diag(sqrt(1 - eta)) on both blocks.
CovarianceMatrix apply_loss(const CovarianceMatrix& v, std::span<const double> eta);
CovarianceMatrix apply_loss(const CovarianceMatrix& v, double eta);

// u^T V u.
double quadrature_variance(const CovarianceMatrix& v, const Vector& u);

struct EigenmodeDecomposition {
  // Rows are eigenmodes in the pixel basis (same convention as a squeezer
  // unitary: a_eigen = basis * a_pixel).
  ModeUnitary basis;
  // p-quadrature variances, ascending.
  SqueezingProfile profile;
  // Off-diagonal Frobenius norm of the x-block in the p-block eigenbasis.
  double residual;
};

// Diagonalizes the p-block and reports how far the x-block is from being
// diagonal in the same basis. Eigenvectors are real, with their
// largest-magnitude component positive; inside a degenerate eigenvalue group
// they are ordered lexicographically by component. The basis within such a
// group is not unique.
EigenmodeDecomposition eigenmode_extract(const CovarianceMatrix& v);

}  // namespace qnet
